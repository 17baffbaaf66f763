"""Significance and replication probability under a distributional null.

The working model treats the latent effect behind each experiment as a
draw from a population of effects with between-experiment variance
sigma0^2 = b * sigma^2, rather than as a fixed point value.  Everything
else follows from that choice: two-sided p-values against the widened
null, closed-form and integral forecasts of whether an identical
replication would reach significance, the most-favorable variance ratio
for an observed statistic, power with an irreducible ceiling, and
multi-experiment estimators for the variance ratio itself.

Modules
-------
distributions  Student-t / noncentral-t / variance-ratio primitives.
estimators     Per-experiment summaries and between-experiment variance.
significance   Two-sided tests against point and distributional nulls.
replication    Replication-probability forecasts and the b_max diagnostic.
power          Power, its ceiling, and sample-size search.
adapters       One-sample, paired, two-sample, regression, contingency.
oracle         Simulation harness for calibration and bias studies.
cli            CSV-in, CSV-out command-line interface.
"""

from .adapters import (
    ContingencyTable,
    RegressionSummary,
    contingency,
    contingency_regression,
    one_sample,
    paired,
    phi_coefficient,
    regression,
    regression_experiment_summary,
    regression_statistic,
    slope_between_variance,
    statistic_from_summary,
    unpaired,
    unpaired_summary,
)
from .distributions import (
    DEFAULT_QUADRATURE,
    PROB_FLOOR,
    QuadratureSpec,
    clamp_probability,
)
from .errors import (
    ConfigurationError,
    DegeneratePredictorError,
    DegenerateVarianceError,
    DistnullError,
    DomainError,
    InsufficientDataError,
    NumericError,
    ParseError,
    PreconditionError,
)
from .estimators import (
    BetweenVariance,
    ExperimentSummary,
    TaskSet,
    between_variance,
    pooled_variance,
    pooled_variance_ratio,
    standardize_means,
    summarize,
    variance_ratio,
)
from .power import (
    PowerQuery,
    beta_distributional,
    beta_point,
    power_ceiling,
    required_sample_size,
)
from .replication import (
    BmaxResult,
    ReplicationForecast,
    ReplicationQuery,
    b_max,
    killeen_p_rep,
    p_rep_bound,
    p_rep_closed,
    p_rep_curve,
    p_rep_given_b,
    p_rep_integral,
)
from .significance import (
    TestReport,
    TestStatistic,
    direction_of,
    effect_significance,
    p_point,
    p_sig_bound,
    p_sig_closed,
    p_sig_given_b,
    p_sig_integral,
    report,
    t0_statistic,
)

__version__ = "0.1.0"

__all__ = [
    "BetweenVariance",
    "BmaxResult",
    "ConfigurationError",
    "ContingencyTable",
    "DEFAULT_QUADRATURE",
    "DegeneratePredictorError",
    "DegenerateVarianceError",
    "DistnullError",
    "DomainError",
    "ExperimentSummary",
    "InsufficientDataError",
    "NumericError",
    "PROB_FLOOR",
    "ParseError",
    "PowerQuery",
    "PreconditionError",
    "QuadratureSpec",
    "RegressionSummary",
    "ReplicationForecast",
    "ReplicationQuery",
    "TaskSet",
    "TestReport",
    "TestStatistic",
    "b_max",
    "beta_distributional",
    "beta_point",
    "between_variance",
    "clamp_probability",
    "contingency",
    "contingency_regression",
    "direction_of",
    "effect_significance",
    "killeen_p_rep",
    "one_sample",
    "p_point",
    "p_rep_bound",
    "p_rep_closed",
    "p_rep_curve",
    "p_rep_given_b",
    "p_rep_integral",
    "p_sig_bound",
    "p_sig_closed",
    "p_sig_given_b",
    "p_sig_integral",
    "paired",
    "phi_coefficient",
    "pooled_variance",
    "pooled_variance_ratio",
    "power_ceiling",
    "regression",
    "regression_experiment_summary",
    "regression_statistic",
    "report",
    "required_sample_size",
    "slope_between_variance",
    "standardize_means",
    "statistic_from_summary",
    "summarize",
    "t0_statistic",
    "unpaired",
    "unpaired_summary",
    "variance_ratio",
    "__version__",
]
