"""Distance spaces, their axiom hierarchy, and sequence diagnostics.

A *distance* on a set X is any nonnegative two-argument function d with
d(x, y) + d(y, x) = 0 exactly when x = y.  Nothing else is assumed: no
symmetry, no triangle inequality.  The stronger, classical properties are
tracked as individual :class:`DistanceClass` flags:

* ``SYMMETRIC``    -- d(x, y) = d(y, x);
* ``QUASIMETRIC``  -- triangle inequality d(x, y) <= d(x, z) + d(z, y);
* ``METRIC``       -- symmetric and quasimetric at once;
* ``N_DISTANCE``   -- pointwise chaining: for every x and eps > 0 some
  delta(x, eps) > 0 makes two short hops through any y imply a short
  direct distance;
* ``F_DISTANCE``   -- the chaining condition with delta depending on eps
  only;
* ``S_DISTANCE``   -- relaxed triangle inequality
  d(x, y) <= s * (d(x, z) + d(z, y)) for some s > 0;
* ``H_DISTANCE``   -- distinct points have disjoint balls of some common
  radius;
* ``C_DISTANCE``   -- convergent Cauchy sequences have a unique limit;
* ``COMPLETE``     -- every Cauchy sequence converges.

On finite carriers every flag above is decidable and
:func:`classify_finite` settles each one by exhaustive search.  On
continuous carriers the flags are trusted declarations supplied at
construction.

Limit notions (convergence, Cauchy-ness, asymptotic regularity of orbit
steps) are undecidable from finite prefixes, so the sequence predicates
here are finite-horizon surrogates parameterized by a tolerance and a
tail window.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

from .errors import CarrierError

#: Default tolerance for the finite-horizon limit surrogates.
DEFAULT_TOL = 1e-10
#: Default tail-window width for the finite-horizon limit surrogates.
DEFAULT_WINDOW = 8


class DistanceClass(Enum):
    """Flags for the distance-space hierarchy."""

    SYMMETRIC = "symmetric"
    QUASIMETRIC = "quasimetric"
    METRIC = "metric"
    N_DISTANCE = "n_distance"
    F_DISTANCE = "f_distance"
    S_DISTANCE = "s_distance"
    H_DISTANCE = "h_distance"
    C_DISTANCE = "c_distance"
    COMPLETE = "complete"


def normalize_classes(classes: Iterable[DistanceClass]) -> frozenset[DistanceClass]:
    """Close a declaration set under METRIC => SYMMETRIC and QUASIMETRIC."""
    out = set(classes)
    if DistanceClass.METRIC in out:
        out.add(DistanceClass.SYMMETRIC)
        out.add(DistanceClass.QUASIMETRIC)
    return frozenset(out)


def _is_scalar(p) -> bool:
    return isinstance(p, (int, float)) and not isinstance(p, bool) and math.isfinite(p)


class DistanceSpace:
    """A carrier with a raw distance callable and declared class flags.

    ``dist`` is the raw two-argument distance used by hot loops;
    :meth:`distance` validates carrier membership first.  Declared flags
    are trusted for continuous carriers; on finite carriers use
    :func:`classify_finite` to decide them instead.
    """

    def __init__(
        self,
        dist: Callable,
        declared_classes: Iterable[DistanceClass] = (),
        s_constant: float | None = None,
        name: str = "distance space",
        point_check: Callable | None = None,
    ):
        if s_constant is not None and not s_constant > 0:
            raise ValueError("s_constant must be positive")
        self.dist = dist
        self.declared_classes = normalize_classes(declared_classes)
        self.s_constant = s_constant
        self.name = name
        self._point_check = point_check

    def check_point(self, p) -> None:
        """Raise :class:`CarrierError` if ``p`` is not a carrier point."""
        if self._point_check is not None and not self._point_check(p):
            raise CarrierError(f"point {p!r} is outside the carrier of {self.name}")

    def distance(self, x, y) -> float:
        """Validated distance evaluation; deterministic, no mutation."""
        self.check_point(x)
        self.check_point(y)
        return self.dist(x, y)

    def ball_contains(self, center, r: float, y) -> bool:
        """True iff ``y`` lies in the open ball: distance(center, y) < r (strict)."""
        if not r > 0:
            raise ValueError("ball radius must be positive")
        return self.distance(center, y) < r

    def declares(self, *classes: DistanceClass) -> bool:
        return all(c in self.declared_classes for c in classes)

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"<{type(self).__name__} {self.name!r}>"


def absolute_value_space() -> DistanceSpace:
    """The real line with d(x, y) = |x - y|: a complete metric."""
    return DistanceSpace(
        dist=lambda x, y: abs(x - y),
        declared_classes=(
            DistanceClass.METRIC,
            DistanceClass.N_DISTANCE,
            DistanceClass.F_DISTANCE,
            DistanceClass.S_DISTANCE,
            DistanceClass.H_DISTANCE,
            DistanceClass.C_DISTANCE,
            DistanceClass.COMPLETE,
        ),
        s_constant=1.0,
        name="absolute value on R",
        point_check=_is_scalar,
    )


def euclidean_space(dim: int) -> DistanceSpace:
    """R^dim with the Euclidean metric; points are tuples of length ``dim``."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")

    def check(p):
        return isinstance(p, tuple) and len(p) == dim and all(_is_scalar(v) for v in p)

    return DistanceSpace(
        dist=lambda x, y: math.dist(x, y),
        declared_classes=(
            DistanceClass.METRIC,
            DistanceClass.N_DISTANCE,
            DistanceClass.F_DISTANCE,
            DistanceClass.S_DISTANCE,
            DistanceClass.H_DISTANCE,
            DistanceClass.C_DISTANCE,
            DistanceClass.COMPLETE,
        ),
        s_constant=1.0,
        name=f"euclidean R^{dim}",
        point_check=check,
    )


def squared_difference_space() -> DistanceSpace:
    """The real line with d(x, y) = |x - y|^2.

    Symmetric and complete, satisfies the relaxed triangle inequality with
    s = 2 (so also the chaining conditions and ball separation), but is
    not a quasimetric: |x - y|^2 can exceed |x - z|^2 + |z - y|^2.
    """
    return DistanceSpace(
        dist=lambda x, y: (x - y) * (x - y),
        declared_classes=(
            DistanceClass.SYMMETRIC,
            DistanceClass.N_DISTANCE,
            DistanceClass.F_DISTANCE,
            DistanceClass.S_DISTANCE,
            DistanceClass.H_DISTANCE,
            DistanceClass.C_DISTANCE,
            DistanceClass.COMPLETE,
        ),
        s_constant=2.0,
        name="squared difference on R",
        point_check=_is_scalar,
    )


class FiniteDistanceSpace(DistanceSpace):
    """Distance given by an explicit n-by-n nonnegative matrix over {0..n-1}.

    Construction rejects malformed shapes and negative entries outright.
    The two-way separation axiom (zero diagonal, positive two-way sums off
    the diagonal) is *not* enforced here: :func:`classify_finite` detects
    and reports violations as fundamental failures, so such matrices must
    be constructible.  When the axiom does hold the space is automatically
    complete (a Cauchy sequence over finitely many points is eventually
    constant), and the ``COMPLETE`` flag is declared.
    """

    def __init__(self, matrix: Sequence[Sequence[float]], name: str = "finite space"):
        n = len(matrix)
        if n < 1:
            raise ValueError("matrix must be nonempty")
        rows = []
        for i, row in enumerate(matrix):
            if len(row) != n:
                raise ValueError(f"matrix row {i} has length {len(row)}, expected {n}")
            vals = []
            for j, v in enumerate(row):
                v = float(v)
                if not math.isfinite(v) or v < 0.0:
                    raise ValueError(f"matrix[{i}][{j}] = {v!r} is not a nonnegative real")
                vals.append(v)
            rows.append(tuple(vals))
        self.n = n
        self.matrix = tuple(rows)
        self.fundamental_violation = self._find_fundamental_violation()
        declared = (DistanceClass.COMPLETE,) if self.fundamental_violation is None else ()
        super().__init__(dist=self._lookup, declared_classes=declared, name=name)

    def _find_fundamental_violation(self):
        # Witness conventions: (i, i) nonzero diagonal, (i, j) zero two-way sum.
        for i in range(self.n):
            if self.matrix[i][i] != 0.0:
                return (i, i)
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.matrix[i][j] + self.matrix[j][i] == 0.0:
                    return (i, j)
        return None

    def _lookup(self, i, j) -> float:
        self.check_point(i)
        self.check_point(j)
        return self.matrix[i][j]

    def check_point(self, p) -> None:
        if not (isinstance(p, int) and not isinstance(p, bool) and 0 <= p < self.n):
            raise CarrierError(f"point {p!r} is outside the carrier {{0..{self.n - 1}}}")

    def points(self) -> range:
        return range(self.n)

    def to_dict(self) -> dict:
        return {"n": self.n, "matrix": [list(row) for row in self.matrix]}

    @classmethod
    def from_dict(cls, d: dict, name: str = "finite space") -> "FiniteDistanceSpace":
        matrix = d["matrix"]
        if "n" in d and d["n"] != len(matrix):
            raise ValueError(f"declared n = {d['n']} does not match matrix size {len(matrix)}")
        return cls(matrix, name=name)


class SequenceTrace:
    """An iterate sequence with per-step forward/backward distances."""

    def __init__(self, space: DistanceSpace, points: Iterable, window_width: int | None = None):
        pts = tuple(points)
        if not pts:
            raise ValueError("trace needs at least one point")
        for p in pts:
            space.check_point(p)
        self.space = space
        self.points = pts
        self.step_fwd = tuple(space.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))
        self.step_bwd = tuple(space.dist(pts[i + 1], pts[i]) for i in range(len(pts) - 1))
        self.window_width = window_width

    def __len__(self) -> int:
        return len(self.points)

    def tail_pairwise(self, window: int):
        """Yield dist(x_n, x_m) for all ordered pairs among the last ``window`` points."""
        tail = self.points[-window:]
        for i, p in enumerate(tail):
            for j, q in enumerate(tail):
                if i != j:
                    yield self.space.dist(p, q)


def _check_window(trace: SequenceTrace, tol: float, window: int) -> None:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if not isinstance(window, int) or window < 1:
        raise ValueError("window must be a positive integer")
    if len(trace.points) < window + 1:
        raise ValueError(
            f"window {window} exceeds trace length {len(trace.points)} (need >= window + 1 points)"
        )


def is_cauchy(trace: SequenceTrace, tol: float, window: int) -> bool:
    """Finite-horizon Cauchy surrogate.

    True iff every pairwise distance, in both orders, among the last
    ``window`` iterates is <= tol.
    """
    _check_window(trace, tol, window)
    return all(d <= tol for d in trace.tail_pairwise(window))


def is_convergent_to(trace: SequenceTrace, limit, tol: float, window: int) -> bool:
    """Finite-horizon convergence surrogate against a candidate limit.

    The distance is evaluated *from* the candidate limit *to* each
    iterate, which matters for asymmetric distances: a sequence may
    converge to a point in this orientation while the reversed distances
    stay large.
    """
    _check_window(trace, tol, window)
    trace.space.check_point(limit)
    d = trace.space.dist
    return all(d(limit, p) <= tol for p in trace.points[-window:])


def is_strongly_asymptotically_regular(trace: SequenceTrace, tol: float, window: int) -> bool:
    """True iff the symmetrized step distance is <= tol over the last ``window`` steps."""
    _check_window(trace, tol, window)
    fwd = trace.step_fwd[-window:]
    bwd = trace.step_bwd[-window:]
    return all(f + b <= tol for f, b in zip(fwd, bwd))


# ---------------------------------------------------------------------------
# Exhaustive classification of finite spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassVerdict:
    passed: bool
    counterexample: tuple | None = None

    def to_dict(self) -> dict:
        ce = None if self.counterexample is None else list(self.counterexample)
        return {"passed": self.passed, "counterexample": ce}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassVerdict":
        ce = d.get("counterexample")
        return cls(bool(d["passed"]), None if ce is None else tuple(ce))


@dataclass
class AxiomReport:
    """Per-class verdicts with machine-checkable witnesses.

    Witness conventions (carrier indices):

    * fundamental: ``(i, i)`` nonzero diagonal, ``(i, j)`` zero two-way sum;
    * symmetry: ``(i, j)`` with d(i, j) != d(j, i);
    * triangle / relaxed triangle: ``(x, y, z)`` meaning
      d(x, y) > d(x, z) + d(z, y) (resp. no finite multiple works because
      the right side is zero while d(x, y) > 0);
    * chaining (N/F): ``(x, y, z, eps)`` with d(x, y) = d(y, z) = 0 but
      d(x, z) > eps, which defeats every delta;
    * ball separation: ``(x, y, z)`` with d(x, z) = d(y, z) = 0 for
      distinct x, y.

    ``n_delta_witness`` holds, when the chaining condition passes, one
    ``(x, eps, delta)`` triple per carrier point and per grid epsilon,
    with the largest grid delta that makes the implication hold.
    """

    fundamental: ClassVerdict
    verdicts: dict = field(default_factory=dict)
    minimal_s: float | None = None
    n_delta_witness: tuple | None = None

    def passed(self, cls: DistanceClass) -> bool:
        if not self.fundamental.passed:
            return False
        v = self.verdicts.get(cls)
        return v is not None and v.passed

    def counterexample(self, cls: DistanceClass):
        v = self.verdicts.get(cls)
        return None if v is None else v.counterexample

    def to_dict(self) -> dict:
        if self.minimal_s is None:
            s = None
        elif math.isinf(self.minimal_s):
            s = "inf"
        else:
            s = self.minimal_s
        witness = None
        if self.n_delta_witness is not None:
            witness = [list(w) for w in self.n_delta_witness]
        return {
            "fundamental": self.fundamental.to_dict(),
            "classes": {c.value: v.to_dict() for c, v in self.verdicts.items()},
            "minimal_s": s,
            "n_delta_witness": witness,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AxiomReport":
        s = d.get("minimal_s")
        if s == "inf":
            s = math.inf
        witness = d.get("n_delta_witness")
        if witness is not None:
            witness = tuple(tuple(w) for w in witness)
        return cls(
            fundamental=ClassVerdict.from_dict(d["fundamental"]),
            verdicts={
                DistanceClass(k): ClassVerdict.from_dict(v) for k, v in d["classes"].items()
            },
            minimal_s=s,
            n_delta_witness=witness,
        )


def classify_finite(space: FiniteDistanceSpace) -> AxiomReport:
    """Exhaustively decide every distance-class flag of a finite space.

    The two-way separation axiom is checked first; if it fails, the
    report carries only that fundamental failure.  Otherwise:

    * symmetry over all pairs, triangle inequality over all triples;
    * ``minimal_s`` is the supremum over triples with positive
      denominator of d(x, y) / (d(x, z) + d(z, y)); the relaxed triangle
      class passes iff that supremum is finite (a zero denominator under
      a positive numerator defeats every multiple);
    * the chaining conditions quantify delta and eps over the finite
      grid {positive distance values} plus half the smallest positive
      value.  That grid is sufficient: both implications are threshold
      conditions that only change where the antecedent or consequent
      sets change, i.e. at distance values.  On a finite carrier the
      delta with the smallest antecedent (below every positive value)
      decides existence, so the pointwise and uniform conditions agree;
    * ball separation checks min over z of max(d(x, z), d(y, z)) > 0 for
      each distinct pair; unique Cauchy limits are equivalent to it on
      finite carriers (a zero-two-hop witness makes a constant sequence
      converge to two points), and completeness always holds (Cauchy
      sequences over finitely many points are eventually constant).
    """
    n = space.n
    M = space.matrix

    if space.fundamental_violation is not None:
        return AxiomReport(fundamental=ClassVerdict(False, space.fundamental_violation))
    fundamental = ClassVerdict(True)

    verdicts: dict[DistanceClass, ClassVerdict] = {}

    sym_ce = None
    for i in range(n):
        for j in range(i + 1, n):
            if M[i][j] != M[j][i]:
                sym_ce = (i, j)
                break
        if sym_ce:
            break
    verdicts[DistanceClass.SYMMETRIC] = ClassVerdict(sym_ce is None, sym_ce)

    quasi_ce = None
    s_ce = None
    worst_ratio = 0.0
    for x in range(n):
        Mx = M[x]
        for y in range(n):
            if x == y:
                continue
            dxy = Mx[y]
            for z in range(n):
                through = Mx[z] + M[z][y]
                if quasi_ce is None and dxy > through:
                    quasi_ce = (x, y, z)
                if dxy > 0.0:
                    if through == 0.0:
                        if s_ce is None:
                            s_ce = (x, y, z)
                    else:
                        r = dxy / through
                        if r > worst_ratio:
                            worst_ratio = r
    verdicts[DistanceClass.QUASIMETRIC] = ClassVerdict(quasi_ce is None, quasi_ce)
    minimal_s = math.inf if s_ce is not None else worst_ratio
    verdicts[DistanceClass.S_DISTANCE] = ClassVerdict(s_ce is None, s_ce)

    metric_ce = sym_ce if sym_ce is not None else quasi_ce
    verdicts[DistanceClass.METRIC] = ClassVerdict(metric_ce is None, metric_ce)

    n_verdict, witnesses = _classify_chaining(n, M)
    verdicts[DistanceClass.N_DISTANCE] = n_verdict
    # On finite carriers the uniform-delta condition coincides with the
    # pointwise one: the minimum of finitely many positive deltas stays positive.
    verdicts[DistanceClass.F_DISTANCE] = n_verdict

    h_ce = None
    for x in range(n):
        for y in range(x + 1, n):
            for z in range(n):
                if M[x][z] == 0.0 and M[y][z] == 0.0:
                    h_ce = (x, y, z)
                    break
            if h_ce:
                break
        if h_ce:
            break
    verdicts[DistanceClass.H_DISTANCE] = ClassVerdict(h_ce is None, h_ce)
    verdicts[DistanceClass.C_DISTANCE] = ClassVerdict(h_ce is None, h_ce)
    verdicts[DistanceClass.COMPLETE] = ClassVerdict(True)

    return AxiomReport(
        fundamental=fundamental,
        verdicts=verdicts,
        minimal_s=minimal_s,
        n_delta_witness=witnesses,
    )


def _classify_chaining(n: int, M) -> tuple[ClassVerdict, tuple | None]:
    """Decide the chaining condition and build its (x, eps, delta) proof grid."""
    values = sorted({v for row in M for v in row if v > 0.0})
    grid = [values[0] / 2.0] + values if values else [1.0]

    witnesses = []
    counterexample = None
    for x in range(n):
        # A pair (y, z) joins the two-hop antecedent once delta reaches
        # max(d(x, y), d(y, z)); from then on it forces d(x, z) <= eps.
        items = []
        for y in range(n):
            dxy = M[x][y]
            row_y = M[y]
            Mx = M[x]
            for z in range(n):
                items.append((max(dxy, row_y[z]), Mx[z], y, z))
        items.sort(key=lambda t: -t[1])
        neg_targets = [-t[1] for t in items]
        prefix: list[tuple[float, tuple]] = []
        best = math.inf
        best_item = items[0] if items else None
        for it in items:
            if it[0] < best:
                best = it[0]
                best_item = it
            prefix.append((best, best_item))
        for eps in grid:
            idx = bisect_left(neg_targets, -eps)  # items forcing a target above eps
            if idx == 0:
                delta = grid[-1]
            else:
                bound, bad = prefix[idx - 1]
                if bound <= 0.0:
                    if counterexample is None:
                        counterexample = (x, bad[2], bad[3], eps)
                    delta = None
                else:
                    # Largest grid delta strictly below the first bad threshold;
                    # bound is a positive distance value, so grid[0] qualifies.
                    delta = grid[bisect_left(grid, bound) - 1]
            if delta is not None:
                witnesses.append((x, eps, delta))
        if counterexample is not None:
            return ClassVerdict(False, counterexample), None
    return ClassVerdict(True), tuple(witnesses)
