"""Built-in worked problems and problem-file ingestion.

Problem files are JSON with an explicit ``schema_version``.  Shape:

.. code-block:: json

    {
      "schema_version": 1,
      "space": {"type": "absolute_value"},
      "operator": {"builtin": "affine", "coeffs": [0.25, 0.25], "const": 1.0},
      "lambda": {"builtin": "coupled"},
      "start": [0.0, 0.0],
      "config": {"tol": 1e-10, "max_iter": 100000, "window": 8},
      "box": [-10.0, 10.0],
      "seed": 0
    }

Space types: ``absolute_value``, ``euclidean`` (with ``dim``),
``squared_difference``, ``finite`` (with ``n``/``matrix``).  Operators:
``{"builtin": "affine"|"min"|"max", ...}``, ``{"expr": "..."}``, or
``{"table": [...], "n": ...}`` on finite carriers.  Families follow the
same two shapes accepted everywhere: an explicit 1-based ``table`` or a
``builtin`` name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ProblemFormatError
from .lifting import (
    IndexFamily,
    MultiOperator,
    affine_operator,
    coupled_family,
    cyclic_family,
    expression_operator,
    family_from_dict,
    max_operator,
    min_operator,
    table_operator,
    tripled_family,
)
from .solver import SolverConfig
from .spaces import (
    DistanceSpace,
    FiniteDistanceSpace,
    absolute_value_space,
    euclidean_space,
    squared_difference_space,
)

SCHEMA_VERSION = 1


@dataclass
class Problem:
    """A fully specified solve setup plus its known answer, when one exists."""

    key: str
    title: str
    space: DistanceSpace
    operator: MultiOperator
    family: IndexFamily
    start: tuple
    config: SolverConfig = field(default_factory=SolverConfig)
    box: tuple = (-10.0, 10.0)
    seed: int = 0
    expected_fixed_point: tuple | None = None
    expected_fixed_point_set: frozenset | None = None
    notes: str = ""


def builtin_problems() -> dict:
    """The worked-problem catalog; expected answers are exact by construction."""
    problems = {}

    problems["P1"] = Problem(
        key="P1",
        title="coupled affine mean on the real line",
        space=absolute_value_space(),
        operator=affine_operator((0.25, 0.25), 1.0),
        family=coupled_family(),
        start=(0.0, 0.0),
        expected_fixed_point=(2.0, 2.0),
        notes="x = x/4 + y/4 + 1 paired with its swap; unique solution (2, 2).",
    )

    problems["P2"] = Problem(
        key="P2",
        title="tripled affine with outer-coordinate coupling",
        space=absolute_value_space(),
        operator=affine_operator((1.0 / 6.0, 0.0, 1.0 / 6.0), 1.0),
        family=tripled_family(),
        start=(0.0, 0.0, 0.0),
        expected_fixed_point=(1.5, 1.5, 1.5),
        notes="Slot equations reduce to a 3x3 linear system with solution (1.5, 1.5, 1.5).",
    )

    problems["P3"] = Problem(
        key="P3",
        title="cyclic mean of four coordinates",
        space=absolute_value_space(),
        operator=affine_operator((0.125, 0.125, 0.125, 0.125), 1.0),
        family=cyclic_family(4),
        start=(0.0, 0.0, 0.0, 0.0),
        expected_fixed_point=(2.0, 2.0, 2.0, 2.0),
        notes="x = (x1+x2+x3+x4)/8 + 1 in every slot; symmetric solution x = 2.",
    )

    problems["P4"] = Problem(
        key="P4",
        title="coupled affine mean under the squared-difference distance",
        space=squared_difference_space(),
        operator=affine_operator((0.25, 0.25), 1.0),
        family=coupled_family(),
        start=(0.0, 0.0),
        expected_fixed_point=(2.0, 2.0),
        notes="Same map as P1 on a relaxed-triangle (s = 2) symmetric space.",
    )

    lattice = FiniteDistanceSpace(
        [[0, 1, 2], [1, 0, 1], [2, 1, 0]], name="path metric on {0,1,2}"
    )
    problems["P5"] = Problem(
        key="P5",
        title="coupled min on a three-point chain",
        space=lattice,
        operator=table_operator(3, 2, [min(i, j) for i in range(3) for j in range(3)]),
        family=coupled_family(),
        start=(0, 2),
        expected_fixed_point=(0, 0),
        expected_fixed_point_set=frozenset({(0, 0), (1, 1), (2, 2)}),
        notes="Every diagonal pair is fixed; the start (0, 2) collapses to (0, 0).",
    )

    problems["P6"] = Problem(
        key="P6",
        title="increment modulo three (no fixed point)",
        space=FiniteDistanceSpace(
            [[0, 1, 2], [1, 0, 1], [2, 1, 0]], name="path metric on {0,1,2}"
        ),
        operator=table_operator(3, 1, [(i + 1) % 3 for i in range(3)]),
        family=cyclic_family(1),
        start=(0,),
        config=SolverConfig(max_iter=300),
        expected_fixed_point=None,
        expected_fixed_point_set=frozenset(),
        notes="x = x + 1 (mod 3) has no solution; the orbit cycles forever.",
    )

    return problems


# ---------------------------------------------------------------------------
# Problem-file parsing
# ---------------------------------------------------------------------------


def _fail(path: str, message: str):
    raise ProblemFormatError(f"{path}: {message}")


def _require(d: dict, key: str, path: str):
    if key not in d:
        _fail(path, f"missing required key {key!r}")
    return d[key]


def space_from_dict(d: dict, path: str = "space") -> DistanceSpace:
    kind = _require(d, "type", path)
    if kind == "absolute_value":
        return absolute_value_space()
    if kind == "euclidean":
        return euclidean_space(int(_require(d, "dim", path)))
    if kind == "squared_difference":
        return squared_difference_space()
    if kind == "finite":
        try:
            return FiniteDistanceSpace.from_dict(
                {"n": d.get("n", len(_require(d, "matrix", path))), "matrix": d["matrix"]}
            )
        except ValueError as exc:
            _fail(path, str(exc))
    _fail(path, f"unknown space type {kind!r}")


def operator_from_dict(d: dict, space: DistanceSpace, path: str = "operator") -> MultiOperator:
    if "builtin" in d:
        kind = d["builtin"]
        if kind == "affine":
            coeffs = _require(d, "coeffs", path)
            if not isinstance(coeffs, list) or not coeffs:
                _fail(path + ".coeffs", "expected a nonempty list of numbers")
            return affine_operator(coeffs, d.get("const", 0.0))
        if kind in ("min", "max"):
            m = int(_require(d, "m", path))
            return min_operator(m) if kind == "min" else max_operator(m)
        _fail(path, f"unknown builtin operator {kind!r}")
    if "expr" in d:
        return expression_operator(str(d["expr"]), int(_require(d, "m", path)))
    if "table" in d:
        if not isinstance(space, FiniteDistanceSpace):
            _fail(path, "table operators require a finite space")
        m = int(_require(d, "m", path))
        try:
            return table_operator(space.n, m, d["table"])
        except ValueError as exc:
            _fail(path + ".table", str(exc))
    _fail(path, "expected one of the keys 'builtin', 'expr', 'table'")


def config_from_dict(d: dict, path: str = "config") -> SolverConfig:
    known = {
        "tol",
        "max_iter",
        "window",
        "boundedness_horizon",
        "equality_tol",
        "divergence_guard",
    }
    unknown = set(d) - known
    if unknown:
        _fail(path, f"unknown config keys {sorted(unknown)}")
    try:
        return SolverConfig(**d)
    except (TypeError, ValueError) as exc:
        _fail(path, str(exc))


def problem_from_dict(d: dict, key: str = "file") -> Problem:
    version = _require(d, "schema_version", "schema_version")
    if version != SCHEMA_VERSION:
        _fail("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")
    space = space_from_dict(_require(d, "space", "space"))
    try:
        family = family_from_dict(_require(d, "lambda", "lambda"))
    except (ValueError, KeyError) as exc:
        _fail("lambda", str(exc))
    operator = operator_from_dict(_require(d, "operator", "operator"), space)
    if operator.m != family.m:
        _fail("operator", f"arity {operator.m} does not match family arity {family.m}")
    start = _require(d, "start", "start")
    if not isinstance(start, list) or len(start) != family.m:
        _fail("start", f"expected a list of {family.m} carrier points")
    if isinstance(space, FiniteDistanceSpace):
        start = tuple(int(v) for v in start)
    else:
        start = tuple(float(v) for v in start)
    config = config_from_dict(d.get("config", {}))
    box = d.get("box", [-10.0, 10.0])
    if not (isinstance(box, list) and len(box) == 2 and box[0] < box[1]):
        _fail("box", "expected [lo, hi] with lo < hi")
    expected = d.get("expected_fixed_point")
    if expected is not None:
        expected = tuple(expected)
    return Problem(
        key=key,
        title=str(d.get("title", key)),
        space=space,
        operator=operator,
        family=family,
        start=start,
        config=config,
        box=(float(box[0]), float(box[1])),
        seed=int(d.get("seed", 0)),
        expected_fixed_point=expected,
    )


def load_problem(path) -> Problem:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{p}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ProblemFormatError(f"{p}: top level must be an object")
    return problem_from_dict(data, key=p.stem)


def resolve_problem(name_or_path: str) -> Problem:
    """Look up a builtin key first, then fall back to a file path."""
    catalog = builtin_problems()
    if name_or_path in catalog:
        return catalog[name_or_path]
    return load_problem(name_or_path)


def with_overrides(problem: Problem, **config_overrides) -> Problem:
    """Copy of the problem with selected solver-config fields replaced."""
    updates = {k: v for k, v in config_overrides.items() if v is not None}
    if not updates:
        return problem
    return replace(problem, config=replace(problem.config, **updates))
