#!/usr/bin/env python3
"""Print the attack-cost comparison rows for all built-in parameter sets.

Published reference values are shown alongside for the rows that have
them, with the matching tolerance used by the acceptance suite.
"""

import sys

from ranklab import estimator as es

REFERENCE = {
    # preset -> attack -> (bits, tolerance)
    "new2rollo-i-128": {"mm": (205, 3), "smplus": (202, 2), "comb": (212, 2)},
    "new2rollo-i-192": {"mm": (226, 3), "smplus": (223, 2), "comb": (282, 2)},
    "new2rollo-i-256": {"mm": (371, 3), "smplus": (366, 2), "comb": (375, 2)},
    "rollo-i-128-spe": {"mm": (212, 3), "smplus": (214, 2), "comb": (196, 2)},
    "rollo-i-192-spe": {"mm": (242, 3), "smplus": (241, 2), "comb": (251, 2)},
    "rollo-i-256-spe": {"mm": (380, 3), "smplus": (376, 2), "comb": (353, 2)},
    "minrank-sig-128": {"kernel": (166, 1)},
    "minrank-sig-192": {"kernel": (238, 1)},
    "minrank-sig-256": {"kernel": (311, 1)},
}


def main() -> int:
    ok = True
    for name, rows in es.attack_table().items():
        print(name)
        for e in rows:
            det = {k: v for k, v in e.detail.items() if k not in ("params", "N", "M")}
            ref = REFERENCE.get(name, {}).get(e.attack)
            note = ""
            if ref is not None:
                bits, tol = ref
                close = abs(e.bits - bits) <= tol
                ok = ok and close
                note = f"   [published {bits}, {'ok' if close else 'OFF'} +-{tol}]"
            print(f"  {e.attack:<8} {e.bits:7.1f} bits  {det}{note}")
    print("\nall published rows reproduced" if ok else "\nMISMATCH with published rows")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
