"""JSON encodings of groups, functions, measures and semi-measures.

Atoms are written in canonical order (lexicographic by coordinates, ties
broken by weight phase) so that files are diffable.  Complex numbers are
``[re, im]`` pairs throughout.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import funcspace as fs
from .group import GroupSpec
from .measure import ConcreteMeasure
from .semimeasure import SemiMeasure

SCHEMA_VERSION = "1"


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _point(group: GroupSpec, p):
    p = np.asarray(p, dtype=float).reshape(-1)
    if group.is_finite:
        return [int(round(v)) for v in p]
    return float(p[0])


def _atoms_json(group, pts, w):
    tmp = ConcreteMeasure.from_atoms(group, pts, w)
    pts, w = tmp.canonical_atoms()
    return [{"point": _point(group, p), "weight": _cplx(v)} for p, v in zip(pts, w)]


def _atoms_from(group, items):
    if not items:
        return np.zeros((0, group.ndim)), np.zeros(0, dtype=complex)
    pts = np.array([np.atleast_1d(a["point"]) for a in items], dtype=float).reshape(-1, group.ndim)
    w = np.array([complex(*a["weight"]) for a in items])
    return pts, w


def measure_to_json(mu: ConcreteMeasure) -> dict:
    g = mu.group
    dens = None
    if mu.density is not None:
        dens = fs.CompactFunction(g, mu.density).to_json()
    sc = None
    if mu.sc_weights is not None:
        sc = {"atoms": _atoms_json(g, mu.sc_points, mu.sc_weights), "level": int(mu.sc_level)}
    return {
        "group": g.to_json(),
        "atoms": _atoms_json(g, mu.atom_points, mu.atom_weights),
        "ac_density": dens,
        "sc_part": sc,
    }


def measure_from_json(d: dict) -> ConcreteMeasure:
    g = GroupSpec.from_json(d["group"])
    pts, w = _atoms_from(g, d.get("atoms", []))
    dens = None
    if d.get("ac_density") is not None:
        dens = fs.CompactFunction.from_json(g, d["ac_density"]).samples
    sc_p = sc_w = lvl = None
    if d.get("sc_part") is not None:
        sc_p, sc_w = _atoms_from(g, d["sc_part"]["atoms"])
        lvl = d["sc_part"]["level"]
    return ConcreteMeasure(g, pts, w, dens, sc_p, sc_w, lvl)


def semimeasure_to_json(sm: SemiMeasure) -> dict:
    return {"group": sm.group.to_json(), "dual_measure": measure_to_json(sm.dual_measure),
            "provenance": sm.provenance}


def semimeasure_from_json(d: dict) -> SemiMeasure:
    g = GroupSpec.from_json(d["group"])
    nu = measure_from_json(d["dual_measure"])
    return SemiMeasure(g, nu, d.get("provenance", "constructed_from_dual"))


def k2_from_json(d: dict, group: GroupSpec | None = None) -> fs.K2Function:
    g = GroupSpec.from_json(d["group"]) if group is None else group
    return fs.K2Function.from_json(g, d)


def k2_to_json(f: fs.K2Function) -> dict:
    return {"group": f.group.to_json(), **f.to_json()}


# -- schemas ---------------------------------------------------------------------


SCHEMA_FILE = f"eberlein.v{SCHEMA_VERSION}.schema.json"
KINDS = ("group", "compact_fn", "measure", "semimeasure", "k2_function")


def load_schema(kind: str) -> dict:
    """The versioned schema document, rooted at the definition for ``kind``."""
    if kind not in KINDS:
        raise ValueError(f"unknown schema kind {kind!r}")
    base = json.loads(resources.files("eberlein").joinpath("schemas", SCHEMA_FILE).read_text())
    return {**base, "$ref": f"#/$defs/{kind}"}


def validate(doc: dict, kind: str) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not match the schema."""
    jsonschema.validate(doc, load_schema(kind), cls=jsonschema.Draft202012Validator)


def detect_kind(doc: dict) -> str:
    if "dual_measure" in doc:
        return "semimeasure"
    if "terms" in doc:
        return "k2_function"
    return "measure"


# -- files ------------------------------------------------------------------------


def write_atomic(path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, doc: dict) -> None:
    write_atomic(path, json.dumps(doc, indent=2, sort_keys=False) + "\n")


def write_csv(path, header, rows) -> None:
    import io as _io

    buf = _io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    write_atomic(path, buf.getvalue())


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
