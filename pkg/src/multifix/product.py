"""Product distances on m-fold powers: coordinatewise sup and sum forms.

For a base distance d on X, the power X^m carries two natural distances:
the sup form max_i d(x_i, y_i) and the sum form sum_i d(x_i, y_i).  Both
inherit every class flag of the base (symmetry, triangle laws, chaining,
ball separation, unique limits, completeness, and the relaxed-triangle
constant unchanged), and they are uniformly equivalent with the explicit
modulus

    sup form <= sum form <= m * sup form.

The sum form is evaluated with ``math.fsum`` (correctly rounded), which
makes the computed sandwich hold exactly, not just up to rounding: a
correctly rounded sum of nonnegative terms can neither fall below the
largest term nor exceed the rounded product m * max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import CarrierError, ResourceLimitError
from .spaces import (
    AxiomReport,
    DistanceClass,
    DistanceSpace,
    FiniteDistanceSpace,
    classify_finite,
)

#: Largest product carrier that may be materialized as an explicit matrix.
PRODUCT_CARRIER_GUARD = 10**6


class ProductMode(Enum):
    SUP = "sup"
    SUM = "sum"


class ProductDistanceSpace(DistanceSpace):
    """The m-fold power of a base space under the sup or sum distance.

    Points are m-tuples of base points.  Class flags and the
    relaxed-triangle constant are inherited from the base.
    """

    def __init__(self, base: DistanceSpace, arity: int, mode: ProductMode):
        if not isinstance(arity, int) or arity < 1:
            raise ValueError("product arity must be a positive integer")
        mode = ProductMode(mode)
        base_dist = base.dist
        if mode is ProductMode.SUP:
            dist = lambda x, y: max(base_dist(a, b) for a, b in zip(x, y))
        else:
            dist = lambda x, y: math.fsum(base_dist(a, b) for a, b in zip(x, y))
        super().__init__(
            dist=dist,
            declared_classes=base.declared_classes,
            s_constant=base.s_constant,
            name=f"{base.name}^{arity} ({mode.value})",
        )
        self.base = base
        self.arity = arity
        self.mode = mode

    def check_point(self, p) -> None:
        if not isinstance(p, tuple) or len(p) != self.arity:
            raise CarrierError(f"point {p!r} is not a {self.arity}-tuple")
        for v in p:
            self.base.check_point(v)


def product(base: DistanceSpace, m: int, mode: ProductMode = ProductMode.SUP) -> ProductDistanceSpace:
    """Build the m-fold product of ``base``; for m = 1 both modes equal the base."""
    return ProductDistanceSpace(base, m, mode)


def check_uniform_equivalence(base: DistanceSpace, m: int, pairs) -> bool:
    """Check sup <= sum <= m * sup on every sampled pair of m-tuples."""
    sup_space = ProductDistanceSpace(base, m, ProductMode.SUP)
    sum_space = ProductDistanceSpace(base, m, ProductMode.SUM)
    for x, y in pairs:
        dsup = sup_space.dist(x, y)
        dsum = sum_space.dist(x, y)
        if not (dsup <= dsum <= m * dsup):
            return False
    return True


# ---------------------------------------------------------------------------
# Lexicographic materialization of finite products
# ---------------------------------------------------------------------------


def encode_tuple(t, n: int) -> int:
    """Map an index tuple to its lexicographic rank, first coordinate most significant."""
    idx = 0
    for v in t:
        idx = idx * n + v
    return idx


def decode_index(idx: int, n: int, m: int) -> tuple:
    out = [0] * m
    for pos in range(m - 1, -1, -1):
        out[pos] = idx % n
        idx //= n
    return tuple(out)


def materialize_product(
    base: FiniteDistanceSpace, m: int, mode: ProductMode
) -> FiniteDistanceSpace:
    """Realize the product of a finite base as an explicit matrix.

    Carrier index of the tuple (i_1, ..., i_m) is its lexicographic rank.
    Guarded at ``PRODUCT_CARRIER_GUARD`` points.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("product arity must be a positive integer")
    size = base.n**m
    if size > PRODUCT_CARRIER_GUARD:
        raise ResourceLimitError(
            f"product carrier size {base.n}^{m} = {size} exceeds guard {PRODUCT_CARRIER_GUARD}"
        )
    tuples = [decode_index(i, base.n, m) for i in range(size)]
    M = base.matrix
    rows = []
    for x in tuples:
        if mode is ProductMode.SUP:
            rows.append([max(M[a][b] for a, b in zip(x, y)) for y in tuples])
        else:
            rows.append([math.fsum(M[a][b] for a, b in zip(x, y)) for y in tuples])
    return FiniteDistanceSpace(rows, name=f"{base.name}^{m} ({mode.value})")


@dataclass(frozen=True)
class ClassComparison:
    base_passed: bool
    sup_passed: bool
    sum_passed: bool

    @property
    def ok(self) -> bool:
        """Closure direction only: whatever the base passes, the products must pass."""
        return not self.base_passed or (self.sup_passed and self.sum_passed)

    def to_dict(self) -> dict:
        return {
            "base": self.base_passed,
            "sup": self.sup_passed,
            "sum": self.sum_passed,
            "ok": self.ok,
        }


@dataclass
class ClosureReport:
    """Closure comparison between a finite base and its two materialized products."""

    arity: int
    base_report: AxiomReport
    sup_report: AxiomReport
    sum_report: AxiomReport
    comparisons: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.comparisons.values())

    def to_dict(self) -> dict:
        return {
            "arity": self.arity,
            "ok": self.ok,
            "comparisons": {c.value: cmp.to_dict() for c, cmp in self.comparisons.items()},
            "base": self.base_report.to_dict(),
            "sup_product": self.sup_report.to_dict(),
            "sum_product": self.sum_report.to_dict(),
        }


def check_closure(base: FiniteDistanceSpace, m: int) -> ClosureReport:
    """Materialize both products of a finite base and compare class verdicts.

    Every decidable class the base passes must be passed by both
    products; the relaxed-triangle constants of the products never
    exceed the base's (check the reports' ``minimal_s``).
    """
    if base.fundamental_violation is not None:
        raise ValueError("base matrix violates the two-way separation axiom")
    base_report = classify_finite(base)
    sup_report = classify_finite(materialize_product(base, m, ProductMode.SUP))
    sum_report = classify_finite(materialize_product(base, m, ProductMode.SUM))
    comparisons = {
        cls: ClassComparison(
            base_report.passed(cls), sup_report.passed(cls), sum_report.passed(cls)
        )
        for cls in base_report.verdicts
    }
    return ClosureReport(
        arity=m,
        base_report=base_report,
        sup_report=sup_report,
        sum_report=sum_report,
        comparisons=comparisons,
    )
