"""Fixture files: JSON schema, loading and construction of the triples they describe."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ..algebra import BasedAlgebra
from ..crossed import MAX_CROSSED_DIM, base_algebra
from ..errors import NcgxError, SchemaError
from ..groups import FiniteGroup, GroupModel, Weight, WindowedZ, cyclic, symmetric3
from ..hochschild import OP_PAIR, HochschildChain
from ..opalg import ComplexOperator, HilbertSpace, Tolerance, diagonal, identity
from ..triples import SpectralTripleData, group_triple

FIXTURE_SCHEMA_ID = "ncgx.fixture/1"

_MATRIX = {
    "type": "array", "minItems": 1,
    "items": {"type": "array", "minItems": 1,
              "items": {"oneOf": [{"type": "number"},
                                  {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}},
}
_GROUP = {
    "type": "object", "required": ["kind"],
    "properties": {
        "kind": {"enum": ["windowed_z", "cyclic", "symmetric3", "table"]},
        "N": {"type": "integer"}, "n": {"type": "integer", "minimum": 1},
        "table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
    },
}
_WEIGHT = {
    "type": "object", "required": ["kind"],
    "properties": {
        "kind": {"enum": ["inclusion", "absolute", "constant", "values"]},
        "value": {"type": "number"},
        "values": {"type": "array", "items": {"type": "number"}},
    },
}
SCHEMA = {
    "type": "object",
    "required": ["schema", "name", "base"],
    "properties": {
        "schema": {"const": FIXTURE_SCHEMA_ID},
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "base": {
            "type": "object", "required": ["kind"],
            "properties": {
                "kind": {"enum": ["group_triple", "matrices"]},
                "group": _GROUP, "weight": _WEIGHT,
                "radius": {"type": "integer", "minimum": 0},
                "real": {"type": "boolean"},
                "dim": {"type": "integer", "minimum": 1},
                "algebra": {"type": "array", "minItems": 1, "items": _MATRIX},
                "D": _MATRIX, "grading": _MATRIX, "J": _MATRIX,
            },
        },
        "group": _GROUP,
        "weight": _WEIGHT,
        "action": {
            "type": "object", "required": ["kind"],
            "properties": {
                "kind": {"enum": ["trivial", "rotation", "phase", "table"]},
                "theta": {"type": "number"}, "theta_over_2pi": {"type": "number"},
                "unitaries": {"type": "object", "additionalProperties": _MATRIX},
            },
        },
        "star": {"enum": ["inverse", "identity"]},
        "representation": {"enum": ["pi1_lambda", "pi2_gamma"]},
        "real_variant": {"enum": ["hat", "tilde", None]},
        "orientation": {
            "type": "object", "required": ["g", "chain"],
            "properties": {
                "g": {"type": "integer"},
                "chain": {
                    "type": "object", "required": ["terms"],
                    "properties": {
                        "module": {"enum": ["op_pair", "plain"]},
                        "degree": {"type": "integer", "minimum": 0},
                        "terms": {"type": "array", "items": {
                            "type": "object", "required": ["coeff", "labels"],
                            "properties": {"coeff": {"type": "array", "items": {"type": "number"},
                                                     "minItems": 2, "maxItems": 2},
                                           "labels": {"type": "array", "items": {"type": "integer"}}}}},
                    },
                },
            },
        },
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "margins": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "g_max": {"type": "integer", "minimum": 0},
    },
    "dependentRequired": {"action": ["group", "weight"], "real_variant": ["action"], "orientation": ["action"]},
}


def parse_matrix(rows) -> np.ndarray:
    return np.array([[complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in row] for row in rows])


def parse_group(cfg: dict) -> GroupModel:
    kind = cfg["kind"]
    if kind == "windowed_z":
        if "N" not in cfg:
            raise SchemaError("windowed_z needs N")
        return WindowedZ(cfg["N"])
    if kind == "cyclic":
        if "n" not in cfg:
            raise SchemaError("cyclic needs n")
        return cyclic(cfg["n"])
    if kind == "symmetric3":
        return symmetric3()
    if "table" not in cfg:
        raise SchemaError("table group needs a table")
    return FiniteGroup(cfg["table"])


def parse_weight(cfg: dict, G: GroupModel) -> Weight:
    kind = cfg["kind"]
    if kind in ("inclusion", "absolute"):
        if not isinstance(G, WindowedZ):
            raise SchemaError(f"{kind} weight needs a windowed_z group")
        return Weight.inclusion(G) if kind == "inclusion" else Weight.absolute(G)
    if kind == "constant":
        return Weight.constant(G, cfg.get("value", 0.0))
    if "values" not in cfg:
        raise SchemaError("values weight needs values")
    return Weight(G, cfg["values"])


@dataclass
class Fixture:
    name: str
    raw: dict
    base: SpectralTripleData
    group: GroupModel | None
    weight: Weight | None
    star: str
    representation: str
    variant: str | None
    tolerance: Tolerance
    margins: dict = field(default_factory=dict)
    g_max: int = 2
    orientation: dict | None = None
    algebra: BasedAlgebra | None = None

    def margin(self, key: str, default: int) -> int:
        return int(self.margins.get(key, default))

    def orientation_chain(self) -> tuple:
        """(chain over the base algebra, g) from the fixture's orientation block."""
        if self.orientation is None:
            raise SchemaError(f"fixture {self.name} has no orientation block")
        cfg = self.orientation["chain"]
        A = self.algebra
        module = cfg.get("module", OP_PAIR)
        terms = []
        for t in cfg["terms"]:
            try:
                idx = [A.index(lab) for lab in t["labels"]]
            except KeyError as exc:
                raise SchemaError(f"chain label {exc} is not a basis label") from exc
            terms.append({"coeff": t["coeff"], "indices": idx})
        width = 2 if module == OP_PAIR else 1
        degree = cfg.get("degree", len(terms[0]["indices"]) - width if terms else 0)
        try:
            chain = HochschildChain.from_terms(A, degree, module, terms)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
        return chain, self.orientation["g"]


def _build_base(cfg: dict, tol: Tolerance) -> SpectralTripleData:
    if cfg["kind"] == "group_triple":
        if "group" not in cfg or "weight" not in cfg:
            raise SchemaError("group_triple base needs group and weight")
        H = parse_group(cfg["group"])
        t = group_triple(H, parse_weight(cfg["weight"], H), cfg.get("radius"), cfg.get("real", True))
        return t.replace(tolerance=tol)
    for key in ("dim", "algebra", "D"):
        if key not in cfg:
            raise SchemaError(f"matrices base needs {key}")
    n = cfg["dim"]
    space = HilbertSpace(n)

    def op(rows, antilinear=False):
        m = parse_matrix(rows)
        if m.shape != (n, n):
            raise SchemaError(f"matrix of shape {m.shape} does not fit dimension {n}")
        return ComplexOperator(m, space, antilinear)

    grading = op(cfg["grading"]) if "grading" in cfg else None
    J = op(cfg["J"], antilinear=True) if "J" in cfg else None
    return SpectralTripleData(space, [op(a) for a in cfg["algebra"]], op(cfg["D"]), grading=grading, J=J,
                              tolerance=tol)


def _theta(cfg: dict) -> float:
    if "theta" in cfg:
        return float(cfg["theta"])
    if "theta_over_2pi" in cfg:
        return 2 * np.pi * float(cfg["theta_over_2pi"])
    raise SchemaError("rotation and phase actions need theta or theta_over_2pi")


def _build_unitaries(cfg: dict, base: SpectralTripleData, G: GroupModel) -> dict:
    kind = cfg["kind"]
    space = base.space
    if kind == "trivial":
        return {g: identity(space) for g in G.elements}
    if kind in ("rotation", "phase") and not isinstance(G, WindowedZ):
        raise SchemaError(f"{kind} action needs a windowed_z acting group")
    if kind == "rotation":
        H = base.hilbert_group
        if not isinstance(H, WindowedZ):
            raise SchemaError("rotation action needs a group-triple base over windowed_z")
        th = _theta(cfg)
        ks = np.array(H.elements, dtype=float)
        return {g: diagonal(np.exp(1j * th * g * ks), space) for g in G.elements}
    if kind == "phase":
        th = _theta(cfg)
        return {g: diagonal(np.full(space.dim, np.exp(1j * th * g)), space) for g in G.elements}
    if not G.is_finite:
        raise SchemaError("table actions need a finite acting group")
    table = cfg.get("unitaries", {})
    out = {}
    for g in G.elements:
        rows = table.get(str(g))
        if rows is None:
            if g != G.identity:
                raise SchemaError(f"table action is missing u_{g}")
            out[g] = identity(space)
            continue
        m = parse_matrix(rows)
        if m.shape != (space.dim, space.dim):
            raise SchemaError(f"u_{g} has shape {m.shape}, base dimension is {space.dim}")
        out[g] = ComplexOperator(m, space)
    return out


def validate(raw) -> None:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{path}: {exc.message}") from exc


def build_fixture(raw: dict, tolerance: float | None = None) -> Fixture:
    validate(raw)
    tol = Tolerance(tolerance if tolerance is not None else raw.get("tolerance", 1e-9))
    try:
        base = _build_base(raw["base"], tol)
        G = W = None
        if "group" in raw:
            G = parse_group(raw["group"])
            W = parse_weight(raw.get("weight", {"kind": "constant"}), G)
        if "action" in raw:
            us = _build_unitaries(raw["action"], base, G)
            base = base.replace(unitaries=us, group=G)
        if G is not None:
            k = 1 if base.even else 2
            if base.space.dim * G.order * k > MAX_CROSSED_DIM:
                raise SchemaError(f"crossed dimension exceeds the cap {MAX_CROSSED_DIM}")
        algebra = base_algebra(base)
    except SchemaError:
        raise
    except (NcgxError, ValueError) as exc:
        raise SchemaError(f"fixture {raw.get('name')!r} is inconsistent: {exc}") from exc
    return Fixture(raw["name"], raw, base, G, W, raw.get("star", "inverse"), raw.get("representation", "pi2_gamma"),
                   raw.get("real_variant"), tol, dict(raw.get("margins", {})), raw.get("g_max", 2),
                   raw.get("orientation"), algebra)


def bundled_names() -> list:
    return sorted(p.name[:-5] for p in resources.files("ncgx").joinpath("fixtures").iterdir()
                  if p.name.endswith(".json"))


def read_fixture_json(ref: str) -> dict:
    """Parse a fixture given as a path or as the name of a bundled fixture."""
    path = Path(ref)
    try:
        if path.exists():
            text = path.read_text()
        elif ref in bundled_names():
            text = resources.files("ncgx").joinpath("fixtures", f"{ref}.json").read_text()
        else:
            raise SchemaError(f"no fixture file or bundled fixture named {ref!r}")
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    except OSError as exc:
        raise SchemaError(f"cannot read fixture: {exc}") from exc


def load_fixture(ref: str, tolerance: float | None = None) -> Fixture:
    return build_fixture(read_fixture_json(ref), tolerance)
