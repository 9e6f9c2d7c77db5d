"""Order-unaware prophet-inequality policies with exact evaluation tooling.

The package splits into: ``core`` (distributions, instances, orders),
``thresholds`` (suffix-max laws, the adaptive threshold pair, the constants),
``policies`` (all stopping rules), ``evaluation`` (exact / brute-force /
Monte Carlo evaluators, ratio sweeps, audits), ``families`` (worst-case
instance generators), and ``cli`` (the command-line harness).
"""

from .core import (
    DiscreteDistribution,
    Instance,
    Order,
    ValidationError,
    ValidationReport,
    ValueProfile,
    Violation,
    draw_profile,
    load_instance,
    load_order,
    sample_profile,
    save_instance,
    save_order,
    validate_instance,
    validate_order,
)
from .evaluation import (
    CapExceededError,
    EvalResult,
    ContinuationAuditRow,
    Objective,
    OrderRatio,
    RatioReport,
    brute_force,
    eval_exact,
    continuation_audit,
    monte_carlo,
    order_ratio_sweep,
    simulate_profile,
)
from .families import (
    CurvePoint,
    FamilyInstance,
    SingleThresholdReport,
    closed_form_alg,
    closed_form_opt,
    closed_form_ratio,
    example1,
    golden_lb,
    hv_box,
    maxprob_lb,
    single_threshold_family,
    single_threshold_ratio_curve,
    threshold_for_alpha,
)
from .policies import (
    DecisionContext,
    FunctionPolicy,
    GoldenPolicy,
    MaxProbPolicy,
    OptExpectationPolicy,
    OptMaxProbPolicy,
    Policy,
    SingleThresholdPolicy,
    make_policy,
    opt_expectation_thresholds,
)
from .thresholds import (
    CONSTANTS,
    LAMBDA,
    LN_INV_LAMBDA,
    PHI,
    ClassicThresholds,
    Constants,
    SuffixMaxDistribution,
    ThresholdTriple,
    classic_thresholds,
    expected_surplus,
    solve_beta,
    solve_beta_bisection,
    solve_lambda,
    suffix_max,
    threshold_triple,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
