"""Click-level simulation of the sequential first-photon protocol.

Only the vacuum-or-not outcome of each pulse is sampled: the decision rule
never looks at the photon count itself.  Noise (background over ``B`` bins
and dark counts gated to ``B_r`` range bins) is pooled into one Poisson
mean per pulse.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import streams
from ._validation import DomainError, check_positive_int, check_real
from .analytic import Hypothesis, Scenario, Source, truncated_geometric_sum

__all__ = [
    "Impairments",
    "TrialOutcome",
    "EstimatedMetrics",
    "ExpectedMetrics",
    "noise_mean",
    "per_pulse_click_probability",
    "expected_metrics",
    "run_trial",
    "estimate_metrics",
]

_HYP_INDEX = {Hypothesis.H0: 0, Hypothesis.H1: 1}
_CHUNK = 1 << 16


@dataclass(frozen=True)
class Impairments:
    """Everything that breaks the false-alarm-free vacuum-or-not rule.

    The defaults describe ideal detection over pure loss.
    """

    eta: float = 1.0
    n_b: float = 0.0
    dcr: float = 0.0
    bins_total: int = 1
    bins_range: int = 1
    pulse_duration_s: float = 1e-7

    def __post_init__(self):
        object.__setattr__(self, "eta", check_real("eta", self.eta, low=0.0, low_open=True, high=1.0))
        object.__setattr__(self, "n_b", check_real("n_b", self.n_b, low=0.0, high=math.inf, high_open=True))
        object.__setattr__(self, "dcr", check_real("dcr", self.dcr, low=0.0, high=math.inf, high_open=True))
        b_r = check_positive_int("bins_range", self.bins_range)
        b = check_positive_int("bins_total", self.bins_total)
        if b < b_r:
            raise DomainError(f"bins_total ({b}) must be >= bins_range ({b_r})")
        object.__setattr__(self, "bins_range", b_r)
        object.__setattr__(self, "bins_total", b)
        object.__setattr__(
            self,
            "pulse_duration_s",
            check_real("pulse_duration_s", self.pulse_duration_s, low=0.0, low_open=True, high=math.inf, high_open=True),
        )

    @property
    def is_pure_loss(self) -> bool:
        return self.eta == 1.0 and self.n_b == 0.0 and self.dcr == 0.0


PURE_LOSS = Impairments()


@dataclass(frozen=True)
class TrialOutcome:
    decision: Hypothesis
    pulses_used: int
    photons_transmitted: float


@dataclass(frozen=True)
class ExpectedMetrics:
    """Analytic counterpart of :class:`EstimatedMetrics`, valid with impairments."""

    p_f: float
    p_m: float
    pr_e: float
    mean_pulses: float
    mean_pulses_h0: float
    mean_pulses_h1: float


@dataclass(frozen=True)
class EstimatedMetrics:
    p_f_hat: float
    p_m_hat: float
    pr_e_hat: float
    mean_pulses_hat: float
    mean_pulses_h0_hat: float
    mean_pulses_h1_hat: float
    p_f_stderr: float
    p_m_stderr: float
    pr_e_stderr: float
    mean_pulses_stderr: float
    mean_pulses_h0_stderr: float
    mean_pulses_h1_stderr: float
    trials_per_hypothesis: int
    master_seed: int


def noise_mean(impairments: Impairments) -> float:
    """Per-pulse Poisson mean of noise clicks: ``B*eta*N_B + DCR*B_r*T``."""
    imp = impairments
    return imp.bins_total * imp.eta * imp.n_b + imp.dcr * imp.bins_range * imp.pulse_duration_s


def _log_no_click(scenario: Scenario, impairments: Impairments, hypothesis: Hypothesis) -> float:
    mu = noise_mean(impairments)
    if Hypothesis(hypothesis) is Hypothesis.H0:
        return -mu
    eff = impairments.eta * scenario.kappa
    if scenario.source is Source.COHERENT:
        return -(eff * scenario.n_s + mu)
    if eff == 1.0:
        return -math.inf
    return scenario.n_s * math.log1p(-eff) - mu


def per_pulse_click_probability(scenario: Scenario, impairments: Impairments, hypothesis: Hypothesis) -> float:
    return -math.expm1(_log_no_click(scenario, impairments, hypothesis))


def expected_metrics(scenario: Scenario, impairments: Impairments = PURE_LOSS) -> ExpectedMetrics:
    """Exact metrics under impairments; reduces to the pure-loss closed forms."""
    m = scenario.m_max
    lq0 = _log_no_click(scenario, impairments, Hypothesis.H0)
    lq1 = _log_no_click(scenario, impairments, Hypothesis.H1)
    p_f = -math.expm1(m * lq0)
    p_m = math.exp(m * lq1) if math.isfinite(lq1) else 0.0
    e0 = truncated_geometric_sum(lq0, m)
    e1 = truncated_geometric_sum(lq1, m)
    return ExpectedMetrics(p_f, p_m, 0.5 * (p_f + p_m), 0.5 * (e0 + e1), e0, e1)


def run_trial(
    scenario: Scenario,
    impairments: Impairments,
    hypothesis: Hypothesis,
    trial_rng: streams.TrialStream,
) -> TrialOutcome:
    """Send pulses until the first click or until ``M`` pulses have gone out.

    One uniform is consumed per transmitted pulse, in pulse order.
    """
    p_click = per_pulse_click_probability(scenario, impairments, hypothesis)
    for m in range(1, scenario.m_max + 1):
        if trial_rng.random() < p_click:
            return TrialOutcome(Hypothesis.H1, m, m * scenario.n_s)
    m = scenario.m_max
    return TrialOutcome(Hypothesis.H0, m, m * scenario.n_s)


@dataclass
class _Tally:
    """Merge-only accumulator; integer sums keep merging order-independent."""

    clicks: int = 0
    pulses: int = 0
    pulses_sq: int = 0

    def merge(self, other: "_Tally") -> "_Tally":
        return _Tally(self.clicks + other.clicks, self.pulses + other.pulses, self.pulses_sq + other.pulses_sq)


def _simulate_chunk(p_click: float, m_max: int, seed: int, hyp_index: int, start: int, stop: int) -> _Tally:
    n = stop - start
    if p_click <= 0.0:
        # no pulse can click; the draws would be discarded unseen
        return _Tally(0, n * m_max, n * m_max * m_max)
    keys = streams.stream_keys(seed, hyp_index, np.arange(start, stop, dtype=np.uint64))
    used = np.full(n, m_max, dtype=np.int64)
    clicked = np.zeros(n, dtype=bool)
    active = np.arange(n)
    for k in range(m_max):
        if active.size == 0:
            break
        hit = streams.uniforms(keys[active], k) < p_click
        winners = active[hit]
        used[winners] = k + 1
        clicked[winners] = True
        active = active[~hit]
    return _Tally(int(clicked.sum()), int(used.sum()), int((used * used).sum()))


def _run_hypothesis(scenario, impairments, hypothesis, trials, seed, workers) -> _Tally:
    p_click = per_pulse_click_probability(scenario, impairments, hypothesis)
    hyp_index = _HYP_INDEX[hypothesis]
    bounds = [(s, min(s + _CHUNK, trials)) for s in range(0, trials, _CHUNK)]
    args = [(p_click, scenario.m_max, seed, hyp_index, s, e) for s, e in bounds]
    if workers <= 1 or len(bounds) == 1:
        parts = [_simulate_chunk(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _simulate_chunk(*a), args))
    total = _Tally()
    for part in parts:
        total = total.merge(part)
    return total


def _binomial_stderr(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)


def _mean_and_var_of_mean(t: _Tally, n: int) -> tuple[float, float]:
    mean = t.pulses / n
    if n < 2:
        return mean, 0.0
    var = (n * t.pulses_sq - t.pulses * t.pulses) / (n * (n - 1))
    return mean, var / n


def estimate_metrics(
    scenario: Scenario,
    impairments: Impairments = PURE_LOSS,
    trials: int = 100_000,
    master_seed: int = 0,
    workers: int = 1,
) -> EstimatedMetrics:
    """Run ``trials`` independent trials per hypothesis and summarise them.

    The result depends only on the arguments other than ``workers``.
    Trial ``i`` under hypothesis ``h`` draws from the substream keyed by
    ``(master_seed, h, i)``, see :mod:`firstphoton.streams`.
    """
    trials = check_positive_int("trials", trials)
    workers = check_positive_int("workers", workers)
    master_seed = check_positive_int("master_seed", master_seed, minimum=0)
    if master_seed >= 1 << 64:
        raise DomainError("master_seed must fit in 64 bits")

    t0 = _run_hypothesis(scenario, impairments, Hypothesis.H0, trials, master_seed, workers)
    t1 = _run_hypothesis(scenario, impairments, Hypothesis.H1, trials, master_seed, workers)

    p_f = t0.clicks / trials
    p_m = (trials - t1.clicks) / trials
    se_f = _binomial_stderr(p_f, trials)
    se_m = _binomial_stderr(p_m, trials)
    m0, v0 = _mean_and_var_of_mean(t0, trials)
    m1, v1 = _mean_and_var_of_mean(t1, trials)
    return EstimatedMetrics(
        p_f_hat=p_f,
        p_m_hat=p_m,
        pr_e_hat=0.5 * (p_f + p_m),
        mean_pulses_hat=0.5 * (m0 + m1),
        mean_pulses_h0_hat=m0,
        mean_pulses_h1_hat=m1,
        p_f_stderr=se_f,
        p_m_stderr=se_m,
        pr_e_stderr=0.5 * math.hypot(se_f, se_m),
        mean_pulses_stderr=0.5 * math.sqrt(v0 + v1),
        mean_pulses_h0_stderr=math.sqrt(v0),
        mean_pulses_h1_stderr=math.sqrt(v1),
        trials_per_hypothesis=trials,
        master_seed=master_seed,
    )
