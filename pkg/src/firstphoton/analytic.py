"""Closed-form performance of first-photon radars and the reference bounds.

A first-photon radar (FPR) sends up to ``M`` pulses of ``N_S`` photons each
and stops at the first photodetection, declaring the target present.  Over
the pure-loss channel nothing is ever detected without a target, so the
false-alarm probability is zero and every error is a miss.

All exponentials are carried in the log domain: ``(1 - kappa)**x`` is
evaluated as ``exp(x * log1p(-kappa))`` and every probability is reported
together with its natural logarithm so that values far below the float64
range stay representable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._validation import DomainError, check_kappa, check_positive_int, check_real

__all__ = [
    "Source",
    "Hypothesis",
    "Regime",
    "Scenario",
    "Metrics",
    "BoundValue",
    "LRTResult",
    "log_no_click",
    "fpr_metrics",
    "ns_fpr_metrics",
    "cs_fpr_metrics",
    "stop_pmf",
    "truncated_geometric_sum",
    "nair_bound",
    "cs_chernoff_bound",
    "chernoff_coefficient",
    "cs_helstrom_pure_loss",
    "singular_lrt",
]


class Source(str, enum.Enum):
    NUMBER = "number"
    COHERENT = "coherent"


class Hypothesis(str, enum.Enum):
    H0 = "H0"  # target absent
    H1 = "H1"  # target present


class Regime(str, enum.Enum):
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class Scenario:
    """FPR operating point.

    ``n_s`` is the photon number of each transmitted number state, or the
    mean photon number of each coherent-state pulse.
    """

    source: Source
    kappa: float
    n_s: float
    m_max: int

    def __post_init__(self):
        object.__setattr__(self, "source", Source(self.source))
        object.__setattr__(self, "kappa", check_kappa(self.kappa))
        n_s = check_real("n_s", self.n_s, low=0.0, low_open=True)
        if not math.isfinite(n_s):
            raise DomainError("n_s must be finite")
        if self.source is Source.NUMBER:
            if not n_s.is_integer():
                raise DomainError(f"number-state n_s must be an integer, got {self.n_s!r}")
            n_s = int(n_s)
        object.__setattr__(self, "n_s", n_s)
        object.__setattr__(self, "m_max", check_positive_int("m_max", self.m_max))

    def replace(self, **changes) -> "Scenario":
        fields = dict(source=self.source, kappa=self.kappa, n_s=self.n_s, m_max=self.m_max)
        fields.update(changes)
        return Scenario(**fields)


@dataclass(frozen=True)
class Metrics:
    """The five FPR performance quantities.

    ``mean_pulses`` is averaged over both equally likely hypotheses; under
    H0 all ``M`` pulses are always sent.  ``log_p_m`` and ``log_pr_e`` keep
    the miss and error probabilities meaningful after the linear values
    underflow.
    """

    p_f: float
    p_m: float
    pr_e: float
    stop_pmf: np.ndarray
    mean_pulses: float
    mean_photons: float
    log_p_m: float
    log_pr_e: float

    @property
    def error_exponent(self) -> float:
        """``-ln(p_m)``, i.e. ``kappa*M*N_S`` for a coherent-state FPR."""
        return -self.log_p_m


@dataclass(frozen=True)
class BoundValue:
    value: float
    regime: Regime
    log_value: float


@dataclass(frozen=True)
class LRTResult:
    ratio: float
    decision: Hypothesis


def log_no_click(source: Source, kappa: float, n_s: float) -> float:
    """Natural log of the per-pulse probability of no detection given a target."""
    if Source(source) is Source.NUMBER:
        if kappa == 1.0:
            return -math.inf
        return n_s * math.log1p(-kappa)
    return -kappa * n_s


def _neg_expm1(x: float) -> float:
    """``1 - exp(x)`` for ``x <= 0``, accurate near zero."""
    return -math.expm1(x)


def truncated_geometric_sum(log_q: float, m_max: int) -> float:
    """``sum(q**m for m in range(M)) = (1 - q**M) / (1 - q)`` with ``q = exp(log_q)``."""
    if log_q == 0.0:
        return float(m_max)
    return _neg_expm1(m_max * log_q) / _neg_expm1(log_q)


def _stop_pmf_from_log_q(log_q: float, m_max: int) -> np.ndarray:
    m = np.arange(1, m_max + 1, dtype=float)
    with np.errstate(invalid="ignore"):
        exponents = (m - 1.0) * log_q
    # 0 * -inf arises at m = 1 when q = 0
    exponents[0] = 0.0
    pmf = _neg_expm1(log_q) * np.exp(exponents)
    pmf[-1] = math.exp(exponents[-1])
    return pmf


def _metrics(source: Source, kappa: float, n_s: float, m_max: int) -> Metrics:
    log_q = log_no_click(source, kappa, n_s)
    log_p_m = m_max * log_q if math.isfinite(log_q) else -math.inf
    p_m = math.exp(log_p_m)
    mean_pulses = 0.5 * m_max + 0.5 * truncated_geometric_sum(log_q, m_max)
    return Metrics(
        p_f=0.0,
        p_m=p_m,
        pr_e=0.5 * p_m,
        stop_pmf=_stop_pmf_from_log_q(log_q, m_max),
        mean_pulses=mean_pulses,
        mean_photons=mean_pulses * n_s,
        log_p_m=log_p_m,
        log_pr_e=log_p_m - math.log(2.0),
    )


def ns_fpr_metrics(kappa, n_s, m_max) -> Metrics:
    """Pure-loss metrics of a number-state FPR sending ``n_s``-photon Fock states."""
    sc = Scenario(Source.NUMBER, kappa, n_s, m_max)
    return _metrics(sc.source, sc.kappa, sc.n_s, sc.m_max)


def cs_fpr_metrics(kappa, n_s, m_max) -> Metrics:
    """Pure-loss metrics of a coherent-state FPR with mean pulse energy ``n_s`` photons."""
    sc = Scenario(Source.COHERENT, kappa, n_s, m_max)
    return _metrics(sc.source, sc.kappa, sc.n_s, sc.m_max)


def fpr_metrics(scenario: Scenario) -> Metrics:
    return _metrics(scenario.source, scenario.kappa, scenario.n_s, scenario.m_max)


def stop_pmf(scenario: Scenario) -> np.ndarray:
    """Distribution of the number of pulses sent when the target is present.

    Truncated geometric: ``(1 - q) q**(m-1)`` for ``m < M`` and the whole
    remaining tail ``q**(M-1)`` on ``m = M``.
    """
    log_q = log_no_click(scenario.source, scenario.kappa, scenario.n_s)
    return _stop_pmf_from_log_q(log_q, scenario.m_max)


def _check_bound_args(kappa, n_t) -> tuple[float, float]:
    kappa = check_kappa(kappa)
    n_t = check_real("n_t", n_t, low=0.0, low_open=True)
    return kappa, n_t


def _half_one_minus_sqrt(log_x: float) -> tuple[float, float]:
    """``(1 - sqrt(1 - x)) / 2`` and its log, for ``x = exp(log_x)`` in [0, 1]."""
    x = math.exp(log_x)
    denom = 2.0 * (1.0 + math.sqrt(max(0.0, 1.0 - x)))
    # x / denom avoids the cancellation in 1 - sqrt(1 - x) for small x
    return x / denom, log_x - math.log(denom)


def nair_bound(kappa, n_t, regime: Regime = Regime.EXACT) -> BoundValue:
    """Lower bound on the error probability of any fixed-duration pure-state radar.

    Exact: ``(1 - sqrt(1 - (1-kappa)**N_T)) / 2``.
    Asymptotic (``kappa << 1``, ``kappa*N_T >> 1``): ``exp(-kappa*N_T) / 4``.
    """
    kappa, n_t = _check_bound_args(kappa, n_t)
    regime = Regime(regime)
    if regime is Regime.ASYMPTOTIC:
        log_value = -kappa * n_t - math.log(4.0)
        return BoundValue(math.exp(log_value), regime, log_value)
    log_x = -math.inf if kappa == 1.0 else n_t * math.log1p(-kappa)
    value, log_value = _half_one_minus_sqrt(log_x)
    return BoundValue(value, regime, log_value)


def chernoff_coefficient(n_b) -> float:
    """``(sqrt(N_B + 1) - sqrt(N_B))**2`` evaluated without cancellation."""
    n_b = check_real("n_b", n_b, low=0.0)
    return 1.0 / (math.sqrt(n_b + 1.0) + math.sqrt(n_b)) ** 2


def cs_chernoff_bound(kappa, n_t, n_b=0.0) -> BoundValue:
    """Chernoff upper bound for a coherent-state radar with thermal background ``n_b``."""
    kappa, n_t = _check_bound_args(kappa, n_t)
    log_value = -kappa * n_t * chernoff_coefficient(n_b) - math.log(2.0)
    return BoundValue(math.exp(log_value), Regime.EXACT, log_value)


def cs_helstrom_pure_loss(kappa, n_t) -> BoundValue:
    """Minimum error probability for vacuum vs a coherent state of ``kappa*n_t`` photons."""
    kappa, n_t = _check_bound_args(kappa, n_t)
    value, log_value = _half_one_minus_sqrt(-kappa * n_t)
    return BoundValue(value, Regime.EXACT, log_value)


def singular_lrt(n_detected, kappa, n_s) -> LRTResult:
    """Single-pulse likelihood-ratio test of a coherent-state FPR over pure loss.

    The ratio ``Pr(n|H1)/Pr(n|H0)`` is ``exp(-kappa*n_s)`` for ``n = 0`` and
    infinite otherwise (H0 never yields a photon).  H1 is decided when the
    ratio is ``>= 1``.
    """
    n = check_positive_int("n_detected", n_detected, minimum=0)
    kappa = check_kappa(kappa, allow_one=False)
    n_s = check_real("n_s", n_s, low=0.0, low_open=True)
    if n >= 1:
        return LRTResult(math.inf, Hypothesis.H1)
    # exp(-kappa*n_s) < 1 exactly, even where the float rounds up to 1.0
    return LRTResult(math.exp(-kappa * n_s), Hypothesis.H0)
