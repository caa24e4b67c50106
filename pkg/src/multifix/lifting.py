"""Argument-rearrangement families, operator lifting, and fixed-point residuals.

An m-argument operator F maps X^m to X.  A family of m index maps on
{1..m} (one per output slot) turns F into a self-map of X^m: output slot
i evaluates F on the input tuple rearranged by row i.  A tuple is a
*multiple fixed point* of F for the family when it is a fixed point of
that lifted self-map, i.e. every slot reproduces itself.

The classical multi-slot notions are particular families: the coupled
pattern swaps the two arguments in the second slot, the tripled pattern
uses rows (1,2,3), (2,1,2), (3,2,1), and the cyclic pattern of order N
rotates the arguments one step further per slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Callable, Sequence

from .spaces import DistanceSpace


@dataclass(frozen=True)
class IndexFamily:
    """m index maps {1..m} -> {1..m}, stored 0-based row-major.

    I/O uses 1-based entries (`table_1based`, `from_table`); everything
    internal is 0-based.
    """

    m: int
    rows: tuple

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError("family arity must be a positive integer")
        if len(self.rows) != self.m:
            raise ValueError(f"expected {self.m} rows, got {len(self.rows)}")
        for i, row in enumerate(self.rows):
            if len(row) != self.m:
                raise ValueError(f"row {i + 1} has length {len(row)}, expected {self.m}")
            for j, v in enumerate(row):
                if not isinstance(v, int) or not 0 <= v < self.m:
                    raise ValueError(
                        f"row {i + 1}, position {j + 1}: index {v!r} not in range"
                    )

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]]) -> "IndexFamily":
        """Build from a 1-based table, the external representation."""
        m = len(table)
        rows = tuple(tuple(int(v) - 1 for v in row) for row in table)
        return cls(m, rows)

    @property
    def table_1based(self) -> list:
        return [[v + 1 for v in row] for row in self.rows]

    def to_dict(self) -> dict:
        return {"m": self.m, "table": self.table_1based}


def family_from_dict(d: dict) -> IndexFamily:
    """Parse either an explicit table or a builtin family spec.

    Accepted shapes: ``{"m": int, "table": [[1-based ints]]}`` or
    ``{"builtin": "coupled" | "tripled" | "cyclic", "N": int}``.
    """
    if "builtin" in d:
        kind = d["builtin"]
        if kind == "coupled":
            return coupled_family()
        if kind == "tripled":
            return tripled_family()
        if kind == "cyclic":
            return cyclic_family(int(d["N"]))
        raise ValueError(f"unknown builtin family {kind!r}")
    fam = IndexFamily.from_table(d["table"])
    if "m" in d and d["m"] != fam.m:
        raise ValueError(f"declared m = {d['m']} does not match table size {fam.m}")
    return fam


class MultiOperator:
    """A total operator X^m -> X with a provenance description."""

    def __init__(self, m: int, func: Callable, description: str = "operator"):
        if not isinstance(m, int) or m < 1:
            raise ValueError("operator arity must be a positive integer")
        self.m = m
        self.func = func
        self.description = description

    def __call__(self, args: tuple):
        return self.func(args)

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"<MultiOperator m={self.m} {self.description!r}>"


def affine_operator(coeffs: Sequence[float], const: float = 0.0) -> MultiOperator:
    """F(x_1..x_m) = sum_i coeffs[i] * x_i + const on a scalar carrier."""
    cs = tuple(float(c) for c in coeffs)
    if not cs:
        raise ValueError("affine operator needs at least one coefficient")
    const = float(const)

    def func(args):
        return math.fsum(c * a for c, a in zip(cs, args)) + const

    desc = f"affine(coeffs={list(cs)}, const={const})"
    return MultiOperator(len(cs), func, desc)


def min_operator(m: int) -> MultiOperator:
    return MultiOperator(m, min, f"min of {m} arguments")


def max_operator(m: int) -> MultiOperator:
    return MultiOperator(m, max, f"max of {m} arguments")


def table_operator(n: int, m: int, table: Sequence[int]) -> MultiOperator:
    """Operator on the finite carrier {0..n-1} given by an explicit value table.

    ``table[k]`` is the value on the m-tuple of lexicographic rank k
    (first coordinate most significant).
    """
    if len(table) != n**m:
        raise ValueError(f"table length {len(table)} != {n}^{m}")
    tab = tuple(int(v) for v in table)
    for k, v in enumerate(tab):
        if not 0 <= v < n:
            raise ValueError(f"table[{k}] = {v} outside carrier {{0..{n - 1}}}")

    def func(args):
        idx = 0
        for a in args:
            idx = idx * n + a
        return tab[idx]

    return MultiOperator(m, func, f"table on {{0..{n - 1}}}^{m}")


_EXPR_NAMES = {
    "abs": abs,
    "min": min,
    "max": max,
    "sqrt": math.sqrt,
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "atan": math.atan,
    "pi": math.pi,
    "e": math.e,
}


def expression_operator(expr: str, m: int) -> MultiOperator:
    """Operator from an arithmetic expression in the variables x1..xm.

    The expression is evaluated with an empty builtin namespace plus a
    small math vocabulary; intended for locally authored problem files.
    """
    code = compile(expr, "<operator>", "eval")

    def func(args):
        scope = {f"x{i + 1}": a for i, a in enumerate(args)}
        scope.update(_EXPR_NAMES)
        return eval(code, {"__builtins__": {}}, scope)

    return MultiOperator(m, func, f"expr({expr!r})")


class LiftedOperator:
    """Self-map of X^m whose slot i applies the operator to the row-i rearrangement."""

    def __init__(self, operator: MultiOperator, family: IndexFamily):
        if operator.m != family.m:
            raise ValueError(
                f"arity mismatch: operator takes {operator.m} arguments, family has {family.m}"
            )
        self.operator = operator
        self.family = family

    def __call__(self, x: tuple) -> tuple:
        op = self.operator
        return tuple(op(tuple(x[j] for j in row)) for row in self.family.rows)


def lift(operator: MultiOperator, family: IndexFamily) -> LiftedOperator:
    return LiftedOperator(operator, family)


def is_multiple_fixed_point(
    operator: MultiOperator,
    family: IndexFamily,
    a: tuple,
    space: DistanceSpace,
    tol: float = 1e-12,
) -> tuple[bool, float]:
    """Residual test for a candidate multiple fixed point.

    The residual sums d(a_i, b_i) + d(b_i, a_i) over slots, where b is the
    lifted image of a: the two-way sum is what characterizes equality in
    a possibly asymmetric distance.  Returns ``(residual <= tol, residual)``.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    a = tuple(a)
    for p in a:
        space.check_point(p)
    b = lift(operator, family)(a)
    d = space.dist
    residual = math.fsum(d(x, y) + d(y, x) for x, y in zip(a, b))
    return residual <= tol, residual


def coupled_family() -> IndexFamily:
    """Rows (1,2) and (2,1): slot one keeps the order, slot two swaps."""
    return IndexFamily(2, ((0, 1), (1, 0)))


def tripled_family() -> IndexFamily:
    """Rows (1,2,3), (2,1,2), (3,2,1); the middle row is not surjective."""
    return IndexFamily(3, ((0, 1, 2), (1, 0, 1), (2, 1, 0)))


def cyclic_family(N: int) -> IndexFamily:
    """Row 1 is the identity; row i is the rotation starting at i."""
    if not isinstance(N, int) or N < 1:
        raise ValueError("cyclic family order must be a positive integer")
    rows = tuple(tuple((i + j) % N for j in range(N)) for i in range(N))
    return IndexFamily(N, rows)


@dataclass(frozen=True)
class FamilyConditionReport:
    """Structural predicates of a family.

    ``index_counts[t]`` counts how often argument position t+1 is used
    across the whole table; ``balanced`` requires every count to stay at
    most m, which is what the sum-form lifting inequality consumes.  The
    ``literal_union_condition`` (the union of all target preimages fills
    the domain) is tautologically true for every family -- each position
    maps somewhere -- and is reported for completeness.
    """

    surjective: tuple
    index_counts: tuple
    balanced: bool
    literal_union_condition: bool

    def to_dict(self) -> dict:
        return {
            "surjective": list(self.surjective),
            "index_counts": list(self.index_counts),
            "balanced": self.balanced,
            "literal_union_condition": self.literal_union_condition,
        }


def family_conditions(family: IndexFamily) -> FamilyConditionReport:
    m = family.m
    surjective = tuple(len(set(row)) == m for row in family.rows)
    counts = [0] * m
    for row in family.rows:
        for v in row:
            counts[v] += 1
    balanced = all(c <= m for c in counts)
    literal = all(
        len(set().union(*({j for j in range(m) if row[j] == t} for t in range(m)))) == m
        for row in family.rows
    )
    return FamilyConditionReport(
        surjective=surjective,
        index_counts=tuple(counts),
        balanced=balanced,
        literal_union_condition=literal,
    )


def all_tuples(n: int, m: int):
    """All m-tuples over {0..n-1} in lexicographic order."""
    return iproduct(range(n), repeat=m)
