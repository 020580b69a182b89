"""Statistical gap between binary forecasts and continuous real-world payoffs."""

from . import conflation, distributions, payoffs, report, scoring, simulate
from .conflation import (
    ConflationReport,
    RiskMeasures,
    corrected_probability,
    expected_payoff_above,
    lognormal_binary_vs_expectation,
    probability_impact,
    pseudo_table,
    risk_measures,
)
from .distributions import (
    DistributionSpec,
    Family,
    TailClass,
    TailClassification,
    classify_tail,
    exponential,
    gaussian,
    lognormal,
    pareto,
    quantile_threshold,
    sample,
    student_t,
    tail_expectation,
)
from .errors import (
    DomainError,
    EstimationError,
    InfiniteMeanError,
    PayoffGapError,
    SeriesTruncationError,
    ValidationError,
)
from .payoffs import (
    PayoffFunction,
    build_structure,
    butterfly,
    call,
    christmas_tree,
    eval_payoff,
    expectation,
    put,
    short_volatility,
)
from .scoring import (
    BrierModel,
    ForecastSeries,
    ScoreReport,
    SurvivalConfig,
    brier,
    brier_charfn,
    brier_kurtosis,
    brier_moments,
    brier_pdf_single,
    m4_score,
    m5_extrema_score,
    pl_score,
    tally,
    tally_cumulants,
)
from .simulate import SimulationConfig, SimulationResult, ensemble_vs_time, replay, run

__version__ = "0.1.0"
