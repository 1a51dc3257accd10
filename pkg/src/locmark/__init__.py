"""Perfect discrimination and local marking of product unitaries."""

from .discrimination import (
    DiscriminationInstance,
    PartitionStrategy,
    common_probe_set_distinguishable,
    evolved_ensemble,
    pairwise_distinguishable,
    partition_strategy_search,
)
from .errors import (
    CapacityError,
    CertificateError,
    DimensionError,
    DomainError,
    LocmarkError,
    NumericError,
    ScenarioError,
    StructureError,
)
from .geometry import (
    FeasibilityProblem,
    HullVerdict,
    difference_phases,
    hull_contains_origin,
    min_hull_norm,
    simplex_feasible,
    sum_phases,
)
from .locc import LoccNode, StrategyTree, Verdict, bob_final_check, locc_search, replay
from .marking import (
    MarkingInstance,
    MarkingVerdict,
    group_decompose,
    locally_distinguishable,
    mark_check,
    monotonicity_check,
    permutation_ensemble,
    theorem2_criteria,
    theorem4_family_check,
)
from .measurement import Measurement, cluster_measurement, orthogonal_partition_measurement
from .operators import (
    LocalFactor,
    ProductUnitary,
    StateVector,
    adjoint_compose,
    eigenphases,
    identity,
    ket,
    max_entangled,
    pauli_x,
    pauli_z,
    phase_gate,
    tensor,
)
from .phases import Phase, PhaseSet
from .probes import ProbeModel
from .scenario import Scenario, load_scenario, parse_scenario, scenario_to_dict

__version__ = "0.1.0"
