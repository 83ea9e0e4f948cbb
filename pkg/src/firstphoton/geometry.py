"""Resolution, dwell-time and false-alarm arithmetic for a standoff FPR.

All quantities are SI.  Unit-suffixed inputs are converted in
:mod:`firstphoton.units` before they get here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ._validation import DomainError, check_positive_int, check_probability, check_real

SPEED_OF_LIGHT = 299_792_458.0
STANDARD_GRAVITY = 9.8  # so that 0.1 g is exactly 0.98 m/s^2

# ceil() slack so that 100.00000000000001 bins count as 100
_CEIL_RTOL = 1e-9


@dataclass(frozen=True)
class Geometry:
    wavelength_m: float
    aperture_m: float
    range_m: float
    range_uncertainty_m: float
    pulse_duration_s: float
    pulses: int
    v_transverse_mps: float = 0.0
    v_longitudinal_mps: float = 0.0
    accel_longitudinal_mps2: float = 0.0
    doppler_uncertainty_hz: float = 0.0
    pulse_repetition_s: Optional[float] = None  # defaults to 2R/c

    def __post_init__(self):
        for name in ("wavelength_m", "aperture_m", "range_m", "pulse_duration_s"):
            _set(self, name, check_real(name, getattr(self, name), low=0.0, low_open=True, high=math.inf, high_open=True))
        for name in (
            "range_uncertainty_m",
            "v_transverse_mps",
            "v_longitudinal_mps",
            "accel_longitudinal_mps2",
            "doppler_uncertainty_hz",
        ):
            _set(self, name, check_real(name, getattr(self, name), low=0.0, high=math.inf, high_open=True))
        _set(self, "pulses", check_positive_int("pulses", self.pulses))
        if self.pulse_repetition_s is not None:
            t_r = check_real("pulse_repetition_s", self.pulse_repetition_s, low=0.0, low_open=True)
            _set(self, "pulse_repetition_s", t_r)

    @property
    def range_max_m(self) -> float:
        return self.range_m + self.range_uncertainty_m


def _set(obj, name, value):
    object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class Resolutions:
    theta_res: float
    range_res: float
    doppler_res: float
    t_rep: float
    t_dwell: float
    t_rep_covers_uncertainty: bool


@dataclass(frozen=True)
class DwellChanges:
    delta_theta: float
    delta_range: float
    delta_doppler: float
    doppler_shift: float


@dataclass(frozen=True)
class BinBudget:
    b_range: int
    b_doppler: int

    @property
    def b_total(self) -> int:
        return self.b_range * self.b_doppler


@dataclass(frozen=True)
class FalseAlarmBudget:
    p_f_background: float
    p_f_dark: float
    p_f_total: float
    log_p_f_background: float
    log_p_f_dark: float
    log_p_f_total: float


def round_trip_time(range_m: float) -> float:
    return 2.0 * range_m / SPEED_OF_LIGHT


def resolutions(geometry: Geometry) -> Resolutions:
    """Angle, range and Doppler resolution plus repetition and dwell times.

    The repetition period defaults to the round-trip time ``2R/c``.  An
    explicit ``pulse_repetition_s`` shorter than that is rejected because
    returns could then come from the wrong pulse.
    """
    g = geometry
    min_rep = round_trip_time(g.range_m)
    t_rep = min_rep if g.pulse_repetition_s is None else g.pulse_repetition_s
    if t_rep < min_rep:
        raise DomainError(
            f"pulse repetition period {t_rep:.6g} s is shorter than the round-trip time {min_rep:.6g} s"
        )
    return Resolutions(
        theta_res=1.22 * g.wavelength_m / g.aperture_m,
        range_res=SPEED_OF_LIGHT * g.pulse_duration_s / 2.0,
        doppler_res=1.0 / g.pulse_duration_s,
        t_rep=t_rep,
        t_dwell=g.pulses * min_rep,
        t_rep_covers_uncertainty=t_rep >= round_trip_time(g.range_max_m),
    )


def dwell_changes(geometry: Geometry) -> DwellChanges:
    """Target-motion changes accumulated over the dwell time ``2MR/c``."""
    g = geometry
    t_d = g.pulses * round_trip_time(g.range_m)
    return DwellChanges(
        # transverse displacement seen as an angle from range R
        delta_theta=g.v_transverse_mps * t_d / g.range_m,
        delta_range=g.v_longitudinal_mps * t_d,
        delta_doppler=2.0 * g.accel_longitudinal_mps2 * t_d / g.wavelength_m,
        doppler_shift=2.0 * g.v_longitudinal_mps / g.wavelength_m,
    )


def _ceil_bins(x: float) -> int:
    return max(1, math.ceil(x * (1.0 - _CEIL_RTOL)))


def uncertainty_bins(geometry: Geometry) -> BinBudget:
    """Range and Doppler bins needed to cover the uncertainty intervals."""
    g = geometry
    res = resolutions(g)
    return BinBudget(
        b_range=_ceil_bins(2.0 * g.range_uncertainty_m / res.range_res),
        # 2*df / (1/T) written as a product to avoid the reciprocal
        b_doppler=_ceil_bins(2.0 * g.doppler_uncertainty_hz * g.pulse_duration_s),
    )


def impairment_false_alarm(bins: BinBudget, geometry: Geometry, n_b, dcr, eta=1.0) -> FalseAlarmBudget:
    """False-alarm probability over ``M`` pulses from background and dark counts.

    Background: ``1 - exp(-B M eta N_B)``; dark counts over the monitored
    range window: ``1 - exp(-DCR M B_r T)``.
    """
    n_b = check_real("n_b", n_b, low=0.0)
    dcr = check_real("dcr", dcr, low=0.0)
    eta = check_real("eta", eta, low=0.0, low_open=True, high=1.0)
    m = geometry.pulses
    mu_bg = bins.b_total * m * eta * n_b
    mu_dark = dcr * m * bins.b_range * geometry.pulse_duration_s
    mu = mu_bg + mu_dark

    def p_and_log(x):
        return -math.expm1(-x), _log_one_minus_exp(-x)

    (p_bg, l_bg), (p_dk, l_dk), (p_tot, l_tot) = p_and_log(mu_bg), p_and_log(mu_dark), p_and_log(mu)
    return FalseAlarmBudget(p_bg, p_dk, p_tot, l_bg, l_dk, l_tot)


def _log_one_minus_exp(x: float) -> float:
    """``log(1 - exp(x))`` for ``x <= 0``."""
    if x == 0.0:
        return -math.inf
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def impairment_budget_ok(p_f_total, p_m_pure_loss) -> bool:
    """True when noise false alarms are no likelier than pure-loss misses.

    The error probability then degrades by at most a factor of two.
    """
    return check_probability("p_f_total", p_f_total) <= check_probability("p_m_pure_loss", p_m_pure_loss)
