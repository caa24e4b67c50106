"""Contraction-constant estimation and the lifting inequalities.

The *sup-form* constant of an m-argument operator F bounds
d(F(x), F(y)) by k * max_i d(x_i, y_i); the *sum-form* constant bounds
it by (k/m) * sum_i d(x_i, y_i).  When either holds with k < 1 the
lifted self-map contracts the corresponding product distance -- the
sum form additionally needs the family to be balanced, because the
per-slot rearranged sums over-count exactly the argument positions the
table repeats.

Finite carriers get exact constants by exhausting all tuple pairs;
continuous carriers get sampled estimates from a deterministic box
sampler.  Pairs whose denominator falls below ``DENOMINATOR_GUARD`` are
skipped and counted as degenerate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from itertools import product as iproduct

from .errors import DegenerateSampleError, ResourceLimitError
from .lifting import IndexFamily, MultiOperator, family_conditions, lift
from .spaces import DistanceSpace

DENOMINATOR_GUARD = 1e-300
#: Relative slack for inequality checks between computed floats.
RELATIVE_SLACK = 1e-12
PAIR_ENUMERATION_GUARD = 10**8


class ContractionMode(Enum):
    SUP_FORM = "sup"
    SUM_FORM = "sum"


@dataclass
class ContractionReport:
    mode: ContractionMode
    k_estimate: float
    witness: tuple | None
    sample_size: int
    exact: bool
    skipped_degenerate: int = 0

    def to_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            x, y = self.witness
            witness = [list(x), list(y)]
        return {
            "mode": self.mode.value,
            "k_estimate": self.k_estimate,
            "witness": witness,
            "sample_size": self.sample_size,
            "exact": self.exact,
            "skipped_degenerate": self.skipped_degenerate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ContractionReport":
        witness = d.get("witness")
        if witness is not None:
            witness = (tuple(witness[0]), tuple(witness[1]))
        return cls(
            mode=ContractionMode(d["mode"]),
            k_estimate=float(d["k_estimate"]),
            witness=witness,
            sample_size=int(d["sample_size"]),
            exact=bool(d["exact"]),
            skipped_degenerate=int(d.get("skipped_degenerate", 0)),
        )


def _stripe_pairs(size: int):
    """Endless deterministic (i, j) index pairs with i != j, in diagonal stripes."""
    stride = 1
    while True:
        for i in range(size):
            yield i, (i + stride) % size
        stride = stride % (size - 1) + 1 if size > 1 else 1


class BoxPairSampler:
    """Deterministic pair source on a scalar box [lo, hi].

    Interleaves three streams so that longer runs extend shorter ones
    (monotone prefixes): tuples shifted in all coordinates at once,
    tuples shifted in a single coordinate, and seeded uniform pairs.
    The first two streams walk a fixed lattice, which pins down the
    extremal ratio patterns of affine operators exactly; the uniform
    stream covers everything else.
    """

    exhaustive = False

    def __init__(self, box: tuple, m: int, seed: int = 0, grid_divisions: int = 16):
        lo, hi = float(box[0]), float(box[1])
        if not lo < hi:
            raise ValueError("box must satisfy lo < hi")
        if grid_divisions < 1:
            raise ValueError("grid_divisions must be positive")
        self.lo, self.hi = lo, hi
        self.m = m
        self.seed = seed
        self.grid = [lo + k * (hi - lo) / grid_divisions for k in range(grid_divisions + 1)]

    def pairs(self, count: int):
        if count is None or count < 1:
            raise ValueError("sample count must be a positive integer")
        m = self.m
        grid = self.grid
        rng = random.Random(self.seed)
        parallel = _stripe_pairs(len(grid))
        single = _stripe_pairs(len(grid))
        coord = 0
        for k in range(count):
            kind = k % 3
            if kind == 0:
                i, j = next(parallel)
                yield (grid[i],) * m, (grid[j],) * m
            elif kind == 1:
                i, j = next(single)
                x = (grid[i],) * m
                y = list(x)
                y[coord] = grid[j]
                coord = (coord + 1) % m
                yield x, tuple(y)
            else:
                yield (
                    tuple(rng.uniform(self.lo, self.hi) for _ in range(m)),
                    tuple(rng.uniform(self.lo, self.hi) for _ in range(m)),
                )


class ExhaustivePairSampler:
    """All ordered pairs of m-tuples over the finite carrier {0..n-1}."""

    exhaustive = True

    def __init__(self, n: int, m: int):
        total = n ** (2 * m)
        if total > PAIR_ENUMERATION_GUARD:
            raise ResourceLimitError(
                f"pair enumeration {n}^{2 * m} = {total} exceeds guard {PAIR_ENUMERATION_GUARD}"
            )
        self.n = n
        self.m = m

    def pairs(self, count=None):
        tuples = list(iproduct(range(self.n), repeat=self.m))
        for x in tuples:
            for y in tuples:
                yield x, y


def _estimate(operator, space, sampler, count, mode: ContractionMode) -> ContractionReport:
    dist = space.dist
    m = operator.m
    best = -1.0
    witness = None
    used = 0
    skipped = 0
    for x, y in sampler.pairs(count):
        if mode is ContractionMode.SUP_FORM:
            den = max(dist(a, b) for a, b in zip(x, y))
        else:
            den = math.fsum(dist(a, b) for a, b in zip(x, y))
        if den < DENOMINATOR_GUARD:
            skipped += 1
            continue
        num = dist(operator(x), operator(y))
        ratio = num / den if mode is ContractionMode.SUP_FORM else m * num / den
        used += 1
        if ratio > best:
            best = ratio
            witness = (x, y)
    if used == 0:
        raise DegenerateSampleError(
            f"all {skipped} sampled pairs were degenerate (zero separation)"
        )
    return ContractionReport(
        mode=mode,
        k_estimate=best,
        witness=witness,
        sample_size=used,
        exact=sampler.exhaustive,
        skipped_degenerate=skipped,
    )


def estimate_k_sup(operator: MultiOperator, space: DistanceSpace, sampler, count=None) -> ContractionReport:
    """Supremum of d(F(x), F(y)) / max_i d(x_i, y_i) over the sampled pairs."""
    return _estimate(operator, space, sampler, count, ContractionMode.SUP_FORM)


def estimate_k_sum(operator: MultiOperator, space: DistanceSpace, sampler, count=None) -> ContractionReport:
    """Supremum of m * d(F(x), F(y)) / sum_i d(x_i, y_i) over the sampled pairs."""
    return _estimate(operator, space, sampler, count, ContractionMode.SUM_FORM)


@dataclass(frozen=True)
class SupLiftingCheck:
    """Outcome of the sup-form lifting inequality on one pair of tuples.

    ``conclusion_holds`` is None when the per-slot hypothesis already
    fails, in which case no verdict about the conclusion is claimed.
    """

    hypothesis_met: bool
    conclusion_holds: bool | None
    lhs: float | None = None
    rhs: float | None = None
    failing_row: int | None = None

    def to_dict(self) -> dict:
        return {
            "hypothesis_met": self.hypothesis_met,
            "conclusion_holds": self.conclusion_holds,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "failing_row": self.failing_row,
        }


def check_sup_lifting(
    operator: MultiOperator,
    family: IndexFamily,
    space: DistanceSpace,
    a: tuple,
    b: tuple,
    k: float,
    rtol: float = RELATIVE_SLACK,
) -> SupLiftingCheck:
    """Verify that per-slot sup-form bounds force the lifted sup-form bound.

    Hypothesis, per slot i: d(F(a rearranged by row i), F(b rearranged))
    <= k * max_j d(a_j, b_j).  Conclusion: the sup distance between the
    lifted images is <= k times the sup distance of (a, b).  ``rtol``
    absorbs rounding in the computed products.
    """
    d = space.dist
    a, b = tuple(a), tuple(b)
    dm = max(d(x, y) for x, y in zip(a, b))
    rhs = k * dm
    bound = rhs * (1.0 + rtol)
    row_values = []
    for i, row in enumerate(family.rows):
        u = operator(tuple(a[j] for j in row))
        v = operator(tuple(b[j] for j in row))
        lhs_i = d(u, v)
        if lhs_i > bound:
            return SupLiftingCheck(False, None, lhs=lhs_i, rhs=rhs, failing_row=i + 1)
        row_values.append(lhs_i)
    lhs = max(row_values)
    return SupLiftingCheck(True, lhs <= bound, lhs=lhs, rhs=rhs)


@dataclass(frozen=True)
class SumLiftingCheck:
    """Outcome of the sum-form lifting inequality on one pair of tuples.

    ``condition_gate`` is ``"balanced"`` when the family satisfies the
    count condition the inequality chain needs, ``"literal-only"`` when
    only the tautological union condition holds; in the latter case the
    verdict is still computed but carries this warning.
    """

    hypothesis_met: bool
    condition_gate: str
    conclusion_holds: bool | None
    lhs: float | None = None
    rhs: float | None = None
    failing_row: int | None = None

    def to_dict(self) -> dict:
        return {
            "hypothesis_met": self.hypothesis_met,
            "condition_gate": self.condition_gate,
            "conclusion_holds": self.conclusion_holds,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "failing_row": self.failing_row,
        }


def check_sum_lifting(
    operator: MultiOperator,
    family: IndexFamily,
    space: DistanceSpace,
    a: tuple,
    b: tuple,
    k: float,
    rtol: float = RELATIVE_SLACK,
) -> SumLiftingCheck:
    """Verify that per-slot sum-form bounds force the lifted sum-form bound.

    Hypothesis, per slot i: d(F(a rearranged by row i), F(b rearranged))
    <= (k/m) * sum_j d(a_{row_i(j)}, b_{row_i(j)}) -- the sum runs over
    the *rearranged* coordinates, which is the bound a sum-form
    contraction supplies for those argument tuples.  Summing the slot
    bounds over-counts coordinate t by its usage count, which is why the
    conclusion needs the balanced gate for arbitrary distances.
    """
    d = space.dist
    m = family.m
    a, b = tuple(a), tuple(b)
    gate = "balanced" if family_conditions(family).balanced else "literal-only"
    row_values = []
    for i, row in enumerate(family.rows):
        u = operator(tuple(a[j] for j in row))
        v = operator(tuple(b[j] for j in row))
        lhs_i = d(u, v)
        rhs_i = (k / m) * math.fsum(d(a[j], b[j]) for j in row)
        if lhs_i > rhs_i * (1.0 + rtol):
            return SumLiftingCheck(False, gate, None, lhs=lhs_i, rhs=rhs_i, failing_row=i + 1)
        row_values.append(lhs_i)
    lhs = math.fsum(row_values)
    rhs = k * math.fsum(d(x, y) for x, y in zip(a, b))
    return SumLiftingCheck(True, gate, lhs <= rhs * (1.0 + rtol), lhs=lhs, rhs=rhs)
