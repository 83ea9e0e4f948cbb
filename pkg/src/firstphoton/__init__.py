"""First-photon radar performance over the pure-loss optical channel."""

from ._validation import DomainError, UnreachableTargetError
from .analytic import (
    BoundValue,
    Hypothesis,
    LRTResult,
    Metrics,
    Regime,
    Scenario,
    Source,
    cs_chernoff_bound,
    cs_fpr_metrics,
    cs_helstrom_pure_loss,
    fpr_metrics,
    nair_bound,
    ns_fpr_metrics,
    singular_lrt,
    stop_pmf,
)
from .design import (
    AdvantageReport,
    ConfluenceGrid,
    ConfluenceReport,
    advantage_report,
    confluence_check,
    nair_required_photons,
    saturation_curve,
    solve_signal_photons,
)
from .geometry import (
    BinBudget,
    Geometry,
    dwell_changes,
    impairment_budget_ok,
    impairment_false_alarm,
    resolutions,
    uncertainty_bins,
)
from .montecarlo import (
    EstimatedMetrics,
    Impairments,
    TrialOutcome,
    estimate_metrics,
    expected_metrics,
    per_pulse_click_probability,
    run_trial,
)

__version__ = "0.1.0"
