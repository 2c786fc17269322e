"""Exact optimization toolkit for dynamic emergency-vehicle location.

Two binary covering models over a common deployment space: ``RP``
maximizes demand-weighted double coverage, ``DRP`` weighs single and
simultaneous-call coverage separately. Both subtract relocation penalties
and share hard absolute-coverage and proportional-coverage constraints. A
branch-and-bound search solves them to proven optimality, a rolling
multi-period protocol refreshes penalties and re-solves as the fleet
changes, and the reporting layer emits coverage-versus-proportion CSV
tables.
"""

from .coverage import CoverageMatrices, build_coverage_matrices, coverage_counts
from .dynamics import (
    Event,
    EventKind,
    PeriodState,
    apply_event,
    init_penalties,
    run_horizon,
    update_penalties,
)
from .errors import EnumerationLimitError, InvalidInstanceError, SchemaError
from .evaluation import (
    Evaluation,
    ModelKind,
    evaluate_deployment,
    feasibility_certificate,
    greedy_coverage_decision,
    objective_weights,
)
from .generator import generate_case_instance
from .instance import (
    Ambulance,
    DemandPoint,
    Deployment,
    Instance,
    PenaltyMatrix,
    Station,
    ValidationReport,
    check_deployment,
    validate_instance,
)
from .io import (
    load_events,
    load_instance,
    load_penalties,
    save_events,
    save_instance,
)
from .milp import (
    Constraint,
    LinearProgram,
    Variable,
    build_milp,
    deployment_assignment,
    export_lp,
    lp_text,
)
from .reporting import (
    ComparisonRow,
    HorizonTrace,
    PeriodRecord,
    SweepRow,
    alpha_sweep,
    compare_report,
    default_alpha_grid,
    format_comparison,
    write_results_csv,
)
from .solver import (
    Solution,
    SolverConfig,
    SolverStatus,
    brute_force,
    node_bound,
    solve,
)

__version__ = "0.1.0"
