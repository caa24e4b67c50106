"""Multi-slot fixed-point problems on generalized distance spaces.

The library reduces coupled, tripled, and N-slot fixed-point problems to
ordinary one-dimensional iteration: an index family rearranges the
arguments of an m-ary operator per output slot, turning it into a
self-map of the m-fold power, whose product distances (sup form and sum
form) inherit the structure of the base space.  Contraction constants
certify uniqueness, a Picard engine finds the fixed points, and on
finite carriers every claim is cross-checked against brute force.
"""

from .errors import (
    CarrierError,
    DegenerateSampleError,
    MultifixError,
    NumericError,
    ProblemFormatError,
    ResourceLimitError,
)
from .spaces import (
    AxiomReport,
    ClassVerdict,
    DistanceClass,
    DistanceSpace,
    FiniteDistanceSpace,
    SequenceTrace,
    absolute_value_space,
    classify_finite,
    euclidean_space,
    is_cauchy,
    is_convergent_to,
    is_strongly_asymptotically_regular,
    squared_difference_space,
)
from .product import (
    ClosureReport,
    ProductDistanceSpace,
    ProductMode,
    check_closure,
    check_uniform_equivalence,
    decode_index,
    encode_tuple,
    materialize_product,
    product,
)
from .lifting import (
    FamilyConditionReport,
    IndexFamily,
    LiftedOperator,
    MultiOperator,
    affine_operator,
    coupled_family,
    cyclic_family,
    expression_operator,
    family_conditions,
    family_from_dict,
    is_multiple_fixed_point,
    lift,
    max_operator,
    min_operator,
    table_operator,
    tripled_family,
)
from .contraction import (
    BoxPairSampler,
    ContractionMode,
    ContractionReport,
    ExhaustivePairSampler,
    SumLiftingCheck,
    SupLiftingCheck,
    check_sum_lifting,
    check_sup_lifting,
    estimate_k_sum,
    estimate_k_sup,
)
from .solver import (
    BoundednessReport,
    PicardTrace,
    RegularityReport,
    SolveReport,
    SolveStatus,
    SolverConfig,
    UniquenessReport,
    check_boundedness,
    orbit_regularity_report,
    picard_orbit,
    rate_estimate,
    solve,
    uniqueness_probe,
)
from .oracle import (
    CrossValidationReport,
    ExactConstants,
    FiniteInstance,
    cross_validate,
    enumerate_fixed_points,
    exact_contraction_constants,
    lifted_fixed_points,
    lifted_transition_table,
    random_family,
    random_finite_space,
    random_instance,
)
from .problems import (
    Problem,
    builtin_problems,
    load_problem,
    problem_from_dict,
    resolve_problem,
)

__version__ = "0.1.0"
