"""Exhaustive ground truth on finite instances.

Everything here is brute force by design: fixed points by enumerating
all m-tuples against the slot equations, contraction constants by
exhausting all tuple pairs, and solver cross-validation by iterating
from every start.  Two independent fixed-point enumerations (direct slot
equations vs. the materialized transition table of the lifted map) guard
the lexicographic tuple encoding, which is the most error-prone choice
in this layer.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from itertools import product as iproduct

from .errors import ResourceLimitError
from .lifting import IndexFamily, MultiOperator, family_conditions, table_operator
from .product import decode_index, encode_tuple
from .solver import SolveReport, SolveStatus, SolverConfig, solve
from .spaces import FiniteDistanceSpace

CARRIER_GUARD = 10**6
PAIR_GUARD = 10**8


@dataclass(frozen=True)
class FiniteInstance:
    """A finite space, an explicit operator table, and an index family.

    ``f_table[k]`` is the operator value on the m-tuple of lexicographic
    rank k.  ``label`` is free-form provenance (e.g. the seed of a random
    draw), echoed into reports.
    """

    space: FiniteDistanceSpace
    f_table: tuple
    family: IndexFamily
    label: str = ""

    def __post_init__(self):
        n, m = self.space.n, self.family.m
        size = n**m
        if size > CARRIER_GUARD:
            raise ResourceLimitError(
                f"instance carrier {n}^{m} = {size} exceeds guard {CARRIER_GUARD}"
            )
        if len(self.f_table) != size:
            raise ValueError(f"operator table length {len(self.f_table)} != {n}^{m}")
        for k, v in enumerate(self.f_table):
            if not isinstance(v, int) or not 0 <= v < n:
                raise ValueError(f"f_table[{k}] = {v!r} outside carrier {{0..{n - 1}}}")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def m(self) -> int:
        return self.family.m

    def operator(self) -> MultiOperator:
        return table_operator(self.n, self.m, self.f_table)

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "F_table": list(self.f_table),
            "lambda": self.family.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict, label: str = "") -> "FiniteInstance":
        from .lifting import family_from_dict

        return cls(
            space=FiniteDistanceSpace.from_dict(d["space"]),
            f_table=tuple(int(v) for v in d["F_table"]),
            family=family_from_dict(d["lambda"]),
            label=label,
        )


def enumerate_fixed_points(inst: FiniteInstance) -> frozenset:
    """Exact fixed-point set by checking every slot equation on every tuple."""
    n, m = inst.n, inst.m
    rows = inst.family.rows
    table = inst.f_table
    out = []
    for a in iproduct(range(n), repeat=m):
        for i, row in enumerate(rows):
            idx = 0
            for j in row:
                idx = idx * n + a[j]
            if table[idx] != a[i]:
                break
        else:
            out.append(a)
    return frozenset(out)


def lifted_transition_table(inst: FiniteInstance) -> tuple:
    """The lifted self-map materialized on lexicographic tuple ranks."""
    n, m = inst.n, inst.m
    rows = inst.family.rows
    table = inst.f_table
    out = []
    for p in range(n**m):
        a = decode_index(p, n, m)
        image = []
        for row in rows:
            idx = 0
            for j in row:
                idx = idx * n + a[j]
            image.append(table[idx])
        out.append(encode_tuple(image, n))
    return tuple(out)


def lifted_fixed_points(inst: FiniteInstance) -> frozenset:
    """Second enumeration path: fixed ranks of the materialized lifted map."""
    n, m = inst.n, inst.m
    return frozenset(
        decode_index(p, n, m)
        for p, q in enumerate(lifted_transition_table(inst))
        if p == q
    )


@dataclass(frozen=True)
class ExactConstants:
    """Exact contraction constants of the operator and of its lifted map.

    Infinite when some pair has positive image distance over a zero
    denominator, i.e. no finite constant works.
    """

    k_sup_f: float
    k_sum_f: float
    k_lifted_sup: float
    k_lifted_sum: float

    def to_dict(self) -> dict:
        def enc(v):
            return "inf" if math.isinf(v) else v

        return {
            "k_sup_f": enc(self.k_sup_f),
            "k_sum_f": enc(self.k_sum_f),
            "k_lifted_sup": enc(self.k_lifted_sup),
            "k_lifted_sum": enc(self.k_lifted_sum),
        }


def exact_contraction_constants(inst: FiniteInstance) -> ExactConstants:
    """Exhaust all tuple pairs for the four ratio suprema."""
    n, m = inst.n, inst.m
    if n ** (2 * m) > PAIR_GUARD:
        raise ResourceLimitError(
            f"pair enumeration {n}^{2 * m} exceeds guard {PAIR_GUARD}"
        )
    M = inst.space.matrix
    table = inst.f_table
    rows = inst.family.rows
    tuples = list(iproduct(range(n), repeat=m))

    f_img = []
    lifted_img = []
    for a in tuples:
        idx = 0
        for v in a:
            idx = idx * n + v
        f_img.append(table[idx])
        image = []
        for row in rows:
            ridx = 0
            for j in row:
                ridx = ridx * n + a[j]
            image.append(table[ridx])
        lifted_img.append(tuple(image))

    k_sup_f = k_sum_f = k_lifted_sup = k_lifted_sum = 0.0
    for p, x in enumerate(tuples):
        fx = f_img[p]
        lx = lifted_img[p]
        for q, y in enumerate(tuples):
            coord = [M[a][b] for a, b in zip(x, y)]
            den_sup = max(coord)
            den_sum = math.fsum(coord)
            num = M[fx][f_img[q]]
            ly = lifted_img[q]
            lnum_coord = [M[a][b] for a, b in zip(lx, ly)]
            lnum_sup = max(lnum_coord)
            lnum_sum = math.fsum(lnum_coord)
            if den_sup > 0.0:
                k_sup_f = max(k_sup_f, num / den_sup)
                k_lifted_sup = max(k_lifted_sup, lnum_sup / den_sup)
            elif num > 0.0 or lnum_sup > 0.0:
                if num > 0.0:
                    k_sup_f = math.inf
                if lnum_sup > 0.0:
                    k_lifted_sup = math.inf
            if den_sum > 0.0:
                k_sum_f = max(k_sum_f, m * num / den_sum)
                k_lifted_sum = max(k_lifted_sum, lnum_sum / den_sum)
            else:
                if num > 0.0:
                    k_sum_f = math.inf
                if lnum_sum > 0.0:
                    k_lifted_sum = math.inf
    return ExactConstants(k_sup_f, k_sum_f, k_lifted_sup, k_lifted_sum)


@dataclass
class CrossValidationReport:
    """Oracle-vs-solver comparison on one finite instance.

    When a contraction gate certifies uniqueness (exact lifted sup
    constant < 1, or balanced family with exact lifted sum constant < 1),
    ``agreement`` states whether every start converged to the single
    enumerated fixed point; otherwise it is None and the per-start
    endpoints are informational.
    """

    constants: ExactConstants
    fixed_points: tuple
    certified: bool
    gate: str | None
    agreement: bool | None
    endpoints: dict
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "constants": self.constants.to_dict(),
            "fixed_points": [list(p) for p in self.fixed_points],
            "certified": self.certified,
            "gate": self.gate,
            "agreement": self.agreement,
            "endpoints": {
                ",".join(map(str, s)): {
                    "status": st.value,
                    "endpoint": None if e is None else list(e),
                }
                for s, (st, e) in self.endpoints.items()
            },
            "label": self.label,
        }


def cross_validate(inst: FiniteInstance, config: SolverConfig | None = None) -> CrossValidationReport:
    """Run the solver from every start and compare with the enumerated set.

    The iteration budget is capped at carrier size + window + 1: an orbit
    over a finite carrier that has not reached a fixed point within
    carrier-size steps is cycling and never will.
    """
    config = config or SolverConfig()
    constants = exact_contraction_constants(inst)
    fixed = enumerate_fixed_points(inst)
    balanced = family_conditions(inst.family).balanced

    if constants.k_lifted_sup < 1.0:
        gate = "sup"
    elif balanced and constants.k_lifted_sum < 1.0:
        gate = "sum"
    else:
        gate = None

    size = inst.n**inst.m
    run_cfg = replace(config, max_iter=min(config.max_iter, size + config.window + 1))
    op = inst.operator()
    endpoints = {}
    for start in iproduct(range(inst.n), repeat=inst.m):
        rep = solve(op, inst.family, start, inst.space, run_cfg)
        endpoints[start] = (rep.status, rep.fixed_point)

    agreement = None
    if gate is not None:
        agreement = len(fixed) == 1 and all(
            st is SolveStatus.CONVERGED and e in fixed for st, e in endpoints.values()
        )
    return CrossValidationReport(
        constants=constants,
        fixed_points=tuple(sorted(fixed)),
        certified=gate is not None,
        gate=gate,
        agreement=agreement,
        endpoints=endpoints,
        label=inst.label,
    )


# ---------------------------------------------------------------------------
# Seeded random generators (distances from a small integer grid)
# ---------------------------------------------------------------------------


def random_finite_space(
    rng: random.Random,
    n: int,
    *,
    symmetric: bool = False,
    metricize: bool = False,
    positive: bool = False,
    max_value: int = 4,
) -> FiniteDistanceSpace:
    """Draw an integer-valued distance matrix.

    ``symmetric`` mirrors the upper triangle; ``metricize`` closes the
    matrix under min-plus (shortest paths), yielding the triangle
    inequality while preserving symmetry when present; ``positive``
    forces both directions of every off-diagonal entry to be >= 1.
    Two-way separation always holds by construction.
    """
    lo = 1 if (positive or metricize) else 0
    M = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a = rng.randint(lo, max_value)
            b = a if symmetric else rng.randint(lo, max_value)
            if a + b == 0:
                if rng.random() < 0.5:
                    a = rng.randint(1, max_value)
                else:
                    b = rng.randint(1, max_value)
            M[i][j], M[j][i] = float(a), float(b)
    if metricize:
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if M[i][k] + M[k][j] < M[i][j]:
                        M[i][j] = M[i][k] + M[k][j]
    return FiniteDistanceSpace(M, name=f"random finite n={n}")


def random_family(rng: random.Random, m: int) -> IndexFamily:
    return IndexFamily(m, tuple(tuple(rng.randrange(m) for _ in range(m)) for _ in range(m)))


def random_instance(
    rng: random.Random,
    n: int,
    m: int,
    *,
    family: IndexFamily | None = None,
    value_pool: int | None = None,
    label: str = "",
    **space_kwargs,
) -> FiniteInstance:
    """Random space, operator table, and family.

    ``value_pool`` restricts the operator to that many carrier values,
    which biases the draw toward contractive tables (fewer distinct
    outputs shrink image distances).
    """
    space = random_finite_space(rng, n, **space_kwargs)
    fam = family if family is not None else random_family(rng, m)
    if value_pool is not None:
        pool = rng.sample(range(n), min(value_pool, n))
    else:
        pool = list(range(n))
    table = tuple(rng.choice(pool) for _ in range(n**m))
    return FiniteInstance(space=space, f_table=table, family=fam, label=label)
