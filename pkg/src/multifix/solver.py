"""Iteration engine for lifted operators: orbits, boundedness, certificates.

The orbit of a start tuple under the lifted self-map is generated
step by step while tracking, for both product distances, the forward and
backward step sizes and the symmetrized distance back to the start.
Stopping combines two rules: a run of ``window`` consecutive symmetrized
steps below ``tol``, after which the final iterate must additionally
pass the fixed-point residual certificate; and a blow-up guard on the
distance back to the start, whose failure is reported as suspected
divergence rather than silently iterating on.

A report labeled ``numerical_only`` means the space does not declare
completeness together with unique Cauchy limits, so a Converged status
is numerical evidence only, not a certificate backed by those
hypotheses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import NumericError
from .lifting import IndexFamily, MultiOperator, is_multiple_fixed_point, lift
from .spaces import (
    DistanceClass,
    DistanceSpace,
    FiniteDistanceSpace,
    SequenceTrace,
    is_strongly_asymptotically_regular,
)
from .product import ProductDistanceSpace, ProductMode


@dataclass(frozen=True)
class SolverConfig:
    """Iteration budget and the finite-horizon surrogate parameters."""

    tol: float = 1e-10
    max_iter: int = 10**5
    window: int = 8
    boundedness_horizon: int | None = None
    equality_tol: float = 1e-12
    divergence_guard: float = 1e12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not isinstance(self.max_iter, int) or self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")
        if not isinstance(self.window, int) or self.window < 1:
            raise ValueError("window must be a positive integer")
        if self.window >= self.max_iter:
            raise ValueError("window must be smaller than max_iter")
        if not self.equality_tol > 0:
            raise ValueError("equality_tol must be positive")
        if not self.divergence_guard > 0:
            raise ValueError("divergence_guard must be positive")

    @property
    def horizon(self) -> int:
        return self.max_iter if self.boundedness_horizon is None else self.boundedness_horizon


class SolveStatus(Enum):
    CONVERGED = "converged"
    MAX_ITER_EXCEEDED = "max_iter_exceeded"
    DIVERGENCE_SUSPECTED = "divergence_suspected"


def _point_finite(p) -> bool:
    if isinstance(p, tuple):
        return all(_point_finite(v) for v in p)
    if isinstance(p, float):
        return math.isfinite(p)
    return True


class PicardTrace:
    """Orbit of a lifted operator with step and origin-distance diagnostics.

    ``points[k]`` is the k-th iterate (``points[0]`` is the start); the
    step arrays hold, for each applied step, the forward and backward
    product distances in both forms; ``origin_sym_sup[k]`` and
    ``origin_sym_sum[k]`` are the symmetrized distances from the start to
    iterate k.
    """

    def __init__(
        self,
        space: DistanceSpace,
        family: IndexFamily,
        operator: MultiOperator,
        points,
        step_sup_fwd,
        step_sup_bwd,
        step_sum_fwd,
        step_sum_bwd,
        origin_sym_sup,
        origin_sym_sum,
        early_stopped: bool,
        guard_tripped: bool,
    ):
        self.space = space
        self.family = family
        self.operator = operator
        self.points = tuple(points)
        self.step_sup_fwd = tuple(step_sup_fwd)
        self.step_sup_bwd = tuple(step_sup_bwd)
        self.step_sum_fwd = tuple(step_sum_fwd)
        self.step_sum_bwd = tuple(step_sum_bwd)
        self.origin_sym_sup = tuple(origin_sym_sup)
        self.origin_sym_sum = tuple(origin_sym_sum)
        self.early_stopped = early_stopped
        self.guard_tripped = guard_tripped

    @property
    def iterations(self) -> int:
        return len(self.points) - 1

    def running_sup(self, horizon: int | None = None, form: str = "sup") -> float:
        vals = self.origin_sym_sup if form == "sup" else self.origin_sym_sum
        if horizon is not None:
            vals = vals[: horizon + 1]
        return max(vals)

    def as_sequence_trace(self, mode: ProductMode = ProductMode.SUP) -> SequenceTrace:
        return SequenceTrace(
            ProductDistanceSpace(self.space, self.family.m, mode), self.points
        )

    def export_records(self):
        """Line-oriented view: iteration, components, steps, running sup."""
        running = 0.0
        for k, p in enumerate(self.points):
            running = max(running, self.origin_sym_sup[k])
            yield {
                "iteration": k,
                "point": [list(v) if isinstance(v, tuple) else v for v in p],
                "step_sup_fwd": self.step_sup_fwd[k - 1] if k > 0 else None,
                "step_sum_fwd": self.step_sum_fwd[k - 1] if k > 0 else None,
                "running_sup": running,
            }


def picard_orbit(
    operator: MultiOperator,
    family: IndexFamily,
    a0,
    space: DistanceSpace,
    config: SolverConfig | None = None,
    *,
    early_stop: bool = True,
) -> PicardTrace:
    """Generate the orbit of ``a0`` under the lifted operator.

    Stops early after ``window`` consecutive symmetrized sup-form steps
    at or below ``tol`` (when ``early_stop``), when the symmetrized
    distance back to the start exceeds the divergence guard, or after
    ``max_iter`` applications.  Non-finite operator output raises
    :class:`NumericError` with the offending iteration.
    """
    config = config or SolverConfig()
    lifted = lift(operator, family)
    m = family.m
    a0 = tuple(a0)
    if len(a0) != m:
        raise ValueError(f"start point has {len(a0)} components, expected {m}")
    for p in a0:
        space.check_point(p)

    d = space.dist

    def dsup(x, y):
        return max(d(u, v) for u, v in zip(x, y))

    def dsum(x, y):
        return math.fsum(d(u, v) for u, v in zip(x, y))

    points = [a0]
    sup_fwd, sup_bwd, sum_fwd, sum_bwd = [], [], [], []
    origin_sup = [0.0]
    origin_sum = [0.0]
    small_run = 0
    early_stopped = False
    guard_tripped = False

    for it in range(1, config.max_iter + 1):
        prev = points[-1]
        nxt = lifted(prev)
        if not _point_finite(nxt):
            raise NumericError(
                f"operator produced a non-finite value at iteration {it}: {nxt!r}",
                iteration=it,
                point=nxt,
            )
        sf, sb = dsup(prev, nxt), dsup(nxt, prev)
        sup_fwd.append(sf)
        sup_bwd.append(sb)
        sum_fwd.append(dsum(prev, nxt))
        sum_bwd.append(dsum(nxt, prev))
        points.append(nxt)
        osym = dsup(a0, nxt) + dsup(nxt, a0)
        origin_sup.append(osym)
        origin_sum.append(dsum(a0, nxt) + dsum(nxt, a0))
        if osym > config.divergence_guard:
            guard_tripped = True
            break
        if early_stop:
            small_run = small_run + 1 if sf + sb <= config.tol else 0
            if small_run >= config.window:
                early_stopped = True
                break

    return PicardTrace(
        space,
        family,
        operator,
        points,
        sup_fwd,
        sup_bwd,
        sum_fwd,
        sum_bwd,
        origin_sup,
        origin_sum,
        early_stopped,
        guard_tripped,
    )


@dataclass(frozen=True)
class BoundednessReport:
    bounded: bool
    sup_form_sup: float
    sum_form_sup: float
    horizon: int

    def to_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "sup_form_sup": self.sup_form_sup,
            "sum_form_sup": self.sum_form_sup,
            "horizon": self.horizon,
        }


def check_boundedness(trace: PicardTrace, config: SolverConfig | None = None) -> BoundednessReport:
    """Finite-horizon orbit boundedness: symmetrized distances back to the start.

    The sup-form and sum-form running suprema bound each other (factor m),
    so the report carries both; the verdict applies the blow-up guard to
    the sup form.
    """
    config = config or SolverConfig()
    horizon = min(config.horizon, trace.iterations)
    sup_sup = trace.running_sup(horizon, "sup")
    sum_sup = trace.running_sup(horizon, "sum")
    bounded = math.isfinite(sup_sup) and sup_sup <= config.divergence_guard
    return BoundednessReport(bounded, sup_sup, sum_sup, horizon)


def rate_estimate(trace: PicardTrace, window: int = 8) -> float | None:
    """Geometric mean of successive sup-form step ratios over the tail.

    Requires at least ``window`` consecutive positive steps at the end of
    the trace; returns None otherwise (constant tails have zero steps).
    """
    steps = trace.step_sup_fwd
    i = len(steps)
    while i > 0 and steps[i - 1] > 0.0:
        i -= 1
    tail = steps[i:]
    if len(tail) < window or len(tail) < 2:
        return None
    use = tail[-(window + 1):]
    return (use[-1] / use[0]) ** (1.0 / (len(use) - 1))


@dataclass
class SolveReport:
    status: SolveStatus
    fixed_point: tuple | None
    residual: float
    iterations: int
    bounded: bool
    running_sup: float
    running_sup_sum: float
    rate_estimate: float | None
    numerical_only: bool
    trace: PicardTrace | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        fp = None
        if self.fixed_point is not None:
            fp = [list(v) if isinstance(v, tuple) else v for v in self.fixed_point]
        return {
            "status": self.status.value,
            "fixed_point": fp,
            "residual": self.residual,
            "iterations": self.iterations,
            "bounded": self.bounded,
            "running_sup": self.running_sup,
            "running_sup_sum": self.running_sup_sum,
            "rate_estimate": self.rate_estimate,
            "numerical_only": self.numerical_only,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolveReport":
        fp = d.get("fixed_point")
        if fp is not None:
            fp = tuple(tuple(v) if isinstance(v, list) else v for v in fp)
        return cls(
            status=SolveStatus(d["status"]),
            fixed_point=fp,
            residual=float(d["residual"]),
            iterations=int(d["iterations"]),
            bounded=bool(d["bounded"]),
            running_sup=float(d["running_sup"]),
            running_sup_sum=float(d["running_sup_sum"]),
            rate_estimate=None if d.get("rate_estimate") is None else float(d["rate_estimate"]),
            numerical_only=bool(d["numerical_only"]),
        )


def solve(
    operator: MultiOperator,
    family: IndexFamily,
    a0,
    space: DistanceSpace,
    config: SolverConfig | None = None,
) -> SolveReport:
    """Iterate the lifted operator from ``a0`` and certify the outcome.

    Converged requires the final iterate to pass the fixed-point
    residual certificate at ``tol`` -- a run of small steps alone is not
    accepted, and if the certificate fails after an early stop the
    remaining budget is spent without early stopping.  The divergence
    guard yields DivergenceSuspected; exhausting the budget without a
    certificate yields MaxIterExceeded.
    """
    config = config or SolverConfig()
    trace = picard_orbit(operator, family, a0, space, config, early_stop=True)

    if not trace.guard_tripped and trace.early_stopped:
        ok, _ = is_multiple_fixed_point(
            operator, family, trace.points[-1], space, config.tol
        )
        if not ok:
            # Small steps without a certificate: finish the budget honestly.
            trace = picard_orbit(operator, family, a0, space, config, early_stop=False)

    final = trace.points[-1]
    ok, residual = is_multiple_fixed_point(operator, family, final, space, config.tol)
    if trace.guard_tripped:
        status = SolveStatus.DIVERGENCE_SUSPECTED
    elif ok:
        status = SolveStatus.CONVERGED
    else:
        status = SolveStatus.MAX_ITER_EXCEEDED

    bound = check_boundedness(trace, config)
    rate = rate_estimate(trace, config.window)
    if rate is not None and not rate < 1.0:
        rate = None  # only contraction-rate evidence is reported
    numerical_only = not space.declares(DistanceClass.COMPLETE, DistanceClass.C_DISTANCE)

    return SolveReport(
        status=status,
        fixed_point=final if status is SolveStatus.CONVERGED else None,
        residual=residual,
        iterations=trace.iterations,
        bounded=bound.bounded,
        running_sup=bound.sup_form_sup,
        running_sup_sum=bound.sum_form_sup,
        rate_estimate=rate,
        numerical_only=numerical_only,
        trace=trace,
    )


@dataclass
class UniquenessReport:
    """Multi-start agreement probe.

    ``unique`` is None when some start failed to converge -- an
    inconclusive verdict, deliberately distinct from False.
    """

    conclusive: bool
    unique: bool | None
    endpoints: tuple
    statuses: tuple

    def to_dict(self) -> dict:
        return {
            "conclusive": self.conclusive,
            "unique": self.unique,
            "endpoints": [
                None if e is None else [list(v) if isinstance(v, tuple) else v for v in e]
                for e in self.endpoints
            ],
            "statuses": [s.value for s in self.statuses],
        }


def uniqueness_probe(
    operator: MultiOperator,
    family: IndexFamily,
    space: DistanceSpace,
    starts,
    config: SolverConfig | None = None,
) -> UniquenessReport:
    """Solve from every start and compare endpoints under the symmetrized distance."""
    config = config or SolverConfig()
    reports = [solve(operator, family, tuple(s), space, config) for s in starts]
    statuses = tuple(r.status for r in reports)
    endpoints = tuple(r.fixed_point for r in reports)
    if any(r.status is not SolveStatus.CONVERGED for r in reports):
        return UniquenessReport(False, None, endpoints, statuses)
    d = space.dist
    ok = True
    first = endpoints[0]
    for other in endpoints[1:]:
        sym = max(d(x, y) + d(y, x) for x, y in zip(first, other))
        if sym > config.equality_tol:
            ok = False
            break
    return UniquenessReport(True, ok, endpoints, statuses)


@dataclass
class RegularityReport:
    """Decidable surrogates for the orbit hypotheses of contractive iteration.

    ``asymptotically_regular`` checks vanishing symmetrized steps over
    the tail window; ``recurrence_found`` reports a pair of iterates
    within ``equality_tol`` of each other -- the finite-trace stand-in
    for an accumulation point.  ``declared_n_symmetric`` records whether
    the space declares the symmetric chaining setting those hypotheses
    are usually paired with.
    """

    declared_n_symmetric: bool
    asymptotically_regular: bool
    recurrence_found: bool
    recurrence_witness: tuple | None

    def to_dict(self) -> dict:
        return {
            "declared_n_symmetric": self.declared_n_symmetric,
            "asymptotically_regular": self.asymptotically_regular,
            "recurrence_found": self.recurrence_found,
            "recurrence_witness": None
            if self.recurrence_witness is None
            else list(self.recurrence_witness),
        }


def orbit_regularity_report(
    trace: PicardTrace,
    space: DistanceSpace,
    config: SolverConfig | None = None,
    scan_tail: int = 512,
) -> RegularityReport:
    """Check the step-vanishing and recurrence surrogates on an orbit.

    The recurrence scan is restricted to the last ``scan_tail`` points:
    the orbit is generated by a deterministic map, so an exact revisit
    anywhere forces a cycle that also shows up in the tail, and
    approximate recurrences of bounded orbits accumulate there as well.
    """
    config = config or SolverConfig()
    declared = space.declares(DistanceClass.SYMMETRIC, DistanceClass.N_DISTANCE)

    if len(trace.points) >= config.window + 1:
        seq = trace.as_sequence_trace(ProductMode.SUP)
        regular = is_strongly_asymptotically_regular(seq, config.tol, config.window)
    else:
        regular = False

    d = space.dist

    def sym(x, y):
        return max(d(u, v) + d(v, u) for u, v in zip(x, y))

    offset = max(0, len(trace.points) - scan_tail)
    tail = trace.points[offset:]
    witness = None
    for j in range(1, len(tail)):
        for i in range(j):
            if sym(tail[i], tail[j]) <= config.equality_tol:
                witness = (offset + i, offset + j)
                break
        if witness:
            break
    return RegularityReport(
        declared_n_symmetric=declared,
        asymptotically_regular=regular,
        recurrence_found=witness is not None,
        recurrence_witness=witness,
    )
