"""Operating-point inversion and comparison against Nair's bound.

The advantage of an FPR is measured at equal error probability as
``10*log10(N_T / N_bar)``: ``N_T`` is the photon budget for which the exact
Nair bound equals the target, ``N_bar`` the mean photons a coherent-state
FPR spends to reach the same target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import DomainError, UnreachableTargetError, check_kappa, check_positive_int, check_real
from .analytic import Scenario, Source, cs_fpr_metrics, ns_fpr_metrics

__all__ = [
    "AdvantageReport",
    "ConfluenceGrid",
    "ConfluencePoint",
    "ConfluenceReport",
    "solve_signal_photons",
    "nair_required_photons",
    "advantage_report",
    "saturation_curve",
    "confluence_check",
    "confluence_ratio",
]


def _check_target(pr_e_target) -> float:
    try:
        p = check_real("pr_e_target", pr_e_target)
    except DomainError as exc:
        raise UnreachableTargetError(str(exc)) from None
    if not 0.0 < p < 0.5:
        raise UnreachableTargetError(f"pr_e_target must lie in (0, 1/2), got {pr_e_target!r}")
    return p


def _check_design_kappa(kappa) -> float:
    return check_kappa(kappa, allow_one=False)


def solve_signal_photons(source, kappa, m_max, pr_e_target):
    """Photons per pulse that bring an M-pulse FPR to ``pr_e_target``.

    Number-state solutions are rounded up to the next integer, so the
    achieved error probability never exceeds the target.
    """
    source = Source(source)
    kappa = _check_design_kappa(kappa)
    m_max = check_positive_int("m_max", m_max)
    p = _check_target(pr_e_target)
    # log(1/(2p)) is the required total exponent
    exponent = -math.log(2.0 * p)
    if source is Source.COHERENT:
        return exponent / (kappa * m_max)
    per_photon = -math.log1p(-kappa)
    n_s = max(1, math.ceil(exponent / (m_max * per_photon)))
    # undo ceil overshoot from rounding in the quotient
    if n_s > 1 and ns_fpr_metrics(kappa, n_s - 1, m_max).pr_e <= p:
        n_s -= 1
    return n_s


def nair_required_photons(kappa, pr_e_target) -> float:
    """Transmitted photons at which the exact Nair bound equals ``pr_e_target``.

    Inverts ``(1 - sqrt(1 - (1-kappa)**N_T)) / 2 = p`` as
    ``N_T = log(4 p (1-p)) / log1p(-kappa)``.
    """
    kappa = _check_design_kappa(kappa)
    p = _check_target(pr_e_target)
    return (math.log(4.0) + math.log(p) + math.log1p(-p)) / math.log1p(-kappa)


@dataclass(frozen=True)
class AdvantageReport:
    scenario: Scenario
    pr_e_target: float
    n_s_solved: float
    mean_pulses: float
    mean_photons_fpr: float
    nair_photons: float
    advantage_db: float


def advantage_report(kappa, m_max, pr_e_target) -> AdvantageReport:
    """Coherent-state FPR design at ``pr_e_target`` and its gain over the Nair bound."""
    n_s = solve_signal_photons(Source.COHERENT, kappa, m_max, pr_e_target)
    metrics = cs_fpr_metrics(kappa, n_s, m_max)
    n_t = nair_required_photons(kappa, pr_e_target)
    return AdvantageReport(
        scenario=Scenario(Source.COHERENT, kappa, n_s, m_max),
        pr_e_target=float(pr_e_target),
        n_s_solved=n_s,
        mean_pulses=metrics.mean_pulses,
        mean_photons_fpr=metrics.mean_photons,
        nair_photons=n_t,
        advantage_db=10.0 * math.log10(n_t / metrics.mean_photons),
    )


def saturation_curve(kappa, pr_e_target, m_list) -> list[tuple[int, float]]:
    """Advantage in dB as a function of the pulse cap ``M``."""
    ms = [check_positive_int("m_list entry", m) for m in m_list]
    if not ms:
        raise DomainError("m_list must not be empty")
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise DomainError("m_list must be strictly increasing")
    return [(m, advantage_report(kappa, m, pr_e_target).advantage_db) for m in ms]


@dataclass(frozen=True)
class ConfluenceGrid:
    """Log spacing of the confluence grid; the ranges are passed separately."""

    kappa_min: float = 1e-6
    kappa_per_decade: int = 20
    pr_per_decade: int = 20
    m_values: tuple[int, ...] = (1,)


@dataclass(frozen=True)
class ConfluencePoint:
    kappa: float
    pr_e_target: float
    m_max: int
    n_s: int
    pr_e_ns: float
    pr_e_cs: float
    ratio: float


@dataclass(frozen=True)
class ConfluenceReport:
    points: list[ConfluencePoint] = field(default_factory=list)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([p.ratio for p in self.points])

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def argmax(self) -> ConfluencePoint:
        return self.points[int(self.ratios.argmax())]


def _log_grid(low: float, high: float, per_decade: int) -> np.ndarray:
    decades = math.log10(high / low)
    n = int(round(decades * per_decade)) + 1
    return np.logspace(math.log10(low), math.log10(high), n)


def confluence_ratio(kappa: float, total_photons: float) -> float:
    """``exp(-kappa*X) / (1-kappa)**X`` for ``X = M*N_S`` photons in total."""
    return math.exp(total_photons * (-kappa - math.log1p(-kappa)))


def confluence_check(kappa_max=1e-3, pr_e_range=(1e-9, 1e-1), grid_spec: ConfluenceGrid | None = None) -> ConfluenceReport:
    """Coherent/number-state error-probability ratio at equal ``(kappa, N_S, M)``.

    For each grid point the number-state design is solved (integer ``N_S``)
    for the target error probability and the coherent-state FPR is evaluated
    at the same ``N_S``.
    """
    spec = grid_spec or ConfluenceGrid()
    kappa_max = _check_design_kappa(kappa_max)
    if kappa_max > 1e-3:
        raise DomainError("confluence is only claimed for kappa <= 1e-3")
    pr_lo, pr_hi = (check_real("pr_e_range", v, low=0.0, low_open=True, high=0.5, high_open=True) for v in pr_e_range)
    if not (spec.kappa_min <= kappa_max and pr_lo <= pr_hi):
        raise DomainError("empty confluence grid")
    points = []
    for kappa in _log_grid(spec.kappa_min, kappa_max, spec.kappa_per_decade):
        kappa = float(kappa)
        for target in _log_grid(pr_lo, pr_hi, spec.pr_per_decade):
            target = float(target)
            for m in spec.m_values:
                n_s = solve_signal_photons(Source.NUMBER, kappa, m, target)
                pr_ns = ns_fpr_metrics(kappa, n_s, m).pr_e
                pr_cs = cs_fpr_metrics(kappa, n_s, m).pr_e
                points.append(
                    ConfluencePoint(kappa, target, int(m), n_s, pr_ns, pr_cs, confluence_ratio(kappa, m * n_s))
                )
    return ConfluenceReport(points)
