"""Instance files and run reports.

Instance files are JSON documents with exactly these keys:

  kind         "rd" | "minrank"
  q_char       characteristic p
  q_deg        s with q = p^s
  q_modulus    monic modulus of F_q over F_p, low coefficient first
               ([0, 1] for prime q)
  m            extension degree (rd) or matrix row count (minrank)
  ext_modulus  monic modulus of F_{q^m} over F_q (rd), [] for minrank
  n            code length / matrix column count
  k_or_K       code dimension (rd) / number of combination matrices (minrank)
  r            target rank
  generator    k x n matrix of element codes (rd only)
  received     length-n vector of element codes (rd only)
  matrices     K+1 matrices of base-field codes, constant one first (minrank)
  witness      optional; rd: {x, support, coeffs}; minrank: {x}

Element codes are the base-q little-endian packings used everywhere in the
package.  Parsers reject unknown keys, and moduli must match the package's
deterministic field construction (fields are not reconstructed from
arbitrary moduli).
"""

from __future__ import annotations

import dataclasses
import json
from typing import Dict, Union

import numpy as np

from ..galois import make_base_field, make_ext_field
from ..instances import MinRankInstance, RdInstance, RdWitness
from .. import matlin as ml

__all__ = ["write_instance", "read_instance", "report_text", "report_json"]

_RD_KEYS = {"kind", "q_char", "q_deg", "q_modulus", "m", "ext_modulus", "n",
            "k_or_K", "r", "generator", "received", "witness"}
_MR_KEYS = {"kind", "q_char", "q_deg", "q_modulus", "m", "ext_modulus", "n",
            "k_or_K", "r", "matrices", "witness"}


def _field_header(inst: Union[RdInstance, MinRankInstance]) -> Dict:
    if isinstance(inst, RdInstance):
        ext = inst.field
        base = ext.base
        prime = base.base
        return {
            "q_char": base.char,
            "q_deg": 1 if prime is None else base.degree,
            "q_modulus": [0, 1] if prime is None else list(base.modulus),
            "m": ext.degree,
            "ext_modulus": list(ext.modulus),
        }
    base = inst.field
    prime = base.base
    return {
        "q_char": base.char,
        "q_deg": 1 if prime is None else base.degree,
        "q_modulus": [0, 1] if prime is None else list(base.modulus),
        "m": inst.m,
        "ext_modulus": [],
    }


def write_instance(path: str, inst: Union[RdInstance, MinRankInstance]) -> None:
    doc: Dict = {"kind": "rd" if isinstance(inst, RdInstance) else "minrank"}
    doc.update(_field_header(inst))
    doc["n"] = inst.n
    doc["r"] = inst.r
    if isinstance(inst, RdInstance):
        doc["k_or_K"] = inst.k
        doc["generator"] = inst.gen.tolist()
        doc["received"] = inst.received.tolist()
        if inst.witness is not None:
            doc["witness"] = {
                "x": inst.witness.x.tolist(),
                "support": inst.witness.support.tolist(),
                "coeffs": inst.witness.coeffs.tolist(),
            }
    else:
        doc["k_or_K"] = inst.K
        doc["matrices"] = [mi.tolist() for mi in inst.mats]
        if inst.witness is not None:
            doc["witness"] = {"x": inst.witness.tolist()}
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_instance(path: str) -> Union[RdInstance, MinRankInstance]:
    with open(path) as fh:
        doc = json.load(fh)
    kind = doc.get("kind")
    if kind not in ("rd", "minrank"):
        raise ValueError(f"unknown instance kind {kind!r}")
    allowed = _RD_KEYS if kind == "rd" else _MR_KEYS
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown fields in instance file: {sorted(unknown)}")
    q = doc["q_char"] ** doc["q_deg"]
    base = make_base_field(q)
    base_mod = [0, 1] if base.base is None else list(base.modulus)
    if list(doc["q_modulus"]) != base_mod:
        raise ValueError("base-field modulus does not match the deterministic choice")
    if kind == "rd":
        ext = make_ext_field(q, doc["m"])
        if list(doc["ext_modulus"]) != list(ext.modulus):
            raise ValueError("extension modulus does not match the deterministic choice")
        gen = np.array(doc["generator"], dtype=np.int64)
        received = np.array(doc["received"], dtype=np.int64)
        witness = None
        if "witness" in doc:
            w = doc["witness"]
            x = np.array(w["x"], dtype=np.int64)
            support = np.array(w["support"], dtype=np.int64)
            coeffs = np.array(w["coeffs"], dtype=np.int64).reshape(doc["r"], doc["n"])
            error = ml.matmul(ext, support[None, :], coeffs)[0] if doc["r"] \
                else np.zeros(doc["n"], dtype=np.int64)
            witness = RdWitness(x, support, coeffs, error)
        inst = RdInstance(ext, doc["n"], doc["k_or_K"], doc["r"], gen, received,
                          witness)
        if witness is not None and not inst.verify_witness():
            raise ValueError("witness does not verify against the instance")
        return inst
    mats = tuple(np.array(mi, dtype=np.int64) for mi in doc["matrices"])
    if len(mats) != doc["k_or_K"] + 1:
        raise ValueError("matrix count does not match k_or_K + 1")
    witness = np.array(doc["witness"]["x"], dtype=np.int64) if "witness" in doc else None
    inst = MinRankInstance(base, doc["m"], doc["n"], doc["k_or_K"], doc["r"],
                           mats, witness)
    if witness is not None and not inst.verify_witness():
        raise ValueError("witness does not verify against the instance")
    return inst


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def report_json(obj) -> str:
    """Machine-readable report document for dataclass-like results."""
    def default(o):
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            return dataclasses.asdict(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, float) and o == float("inf"):
            return "inf"
        return str(o)
    return json.dumps(obj, default=default, indent=2)


def report_text(obj) -> str:
    """Human-oriented rendering for the report objects used by the CLI."""
    from .experiments import ExperimentReport

    if isinstance(obj, ExperimentReport):
        lines = [obj.one_line()]
        lines += [f"  {f}" for f in obj.failures]
        return "\n".join(lines)
    if isinstance(obj, dict):
        return "\n".join(f"{k}: {report_text(v)}" for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return str(list(obj))
        return "\n".join(report_text(v) for v in obj)
    return str(obj)
