import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from firstphoton import (
    DomainError,
    Source,
    UnreachableTargetError,
    advantage_report,
    confluence_check,
    cs_fpr_metrics,
    nair_bound,
    nair_required_photons,
    ns_fpr_metrics,
    saturation_curve,
    solve_signal_photons,
)
from firstphoton.design import ConfluenceGrid, confluence_ratio

import oracles


class TestSolveSignalPhotons:
    def test_worked_example(self):
        n_s = solve_signal_photons(Source.COHERENT, 1e-6, 10, 1e-6)
        assert n_s == pytest.approx(math.log(5e5) / 1e-5, rel=1e-14)
        assert n_s == pytest.approx(1.31224e6, rel=1e-4)

    def test_single_pulse_inverse(self):
        assert solve_signal_photons(Source.COHERENT, 0.1, 1, 0.25) == pytest.approx(math.log(2) / 0.1, rel=1e-14)

    def test_number_state_exact_hit(self):
        assert solve_signal_photons(Source.NUMBER, 0.5, 2, 0.125) == 1

    @settings(max_examples=300, deadline=None)
    @given(kappa=st.floats(1e-9, 0.9), m_max=st.integers(1, 1000), log_p=st.floats(-60, math.log(0.49)))
    def test_round_trip(self, kappa, m_max, log_p):
        target = math.exp(log_p)
        n_cs = solve_signal_photons(Source.COHERENT, kappa, m_max, target)
        assert cs_fpr_metrics(kappa, n_cs, m_max).pr_e == pytest.approx(target, rel=1e-9)
        n_ns = solve_signal_photons(Source.NUMBER, kappa, m_max, target)
        assert isinstance(n_ns, int)
        assert ns_fpr_metrics(kappa, n_ns, m_max).pr_e <= target * (1 + 1e-12)
        if n_ns > 1:
            # smallest integer that meets the target
            assert ns_fpr_metrics(kappa, n_ns - 1, m_max).pr_e > target

    @pytest.mark.parametrize("target", [0.5, 0.7, 0.0, -1e-3])
    def test_unreachable(self, target):
        with pytest.raises(UnreachableTargetError):
            solve_signal_photons(Source.COHERENT, 1e-3, 5, target)

    def test_perfect_channel_rejected(self):
        with pytest.raises(DomainError):
            solve_signal_photons(Source.COHERENT, 1.0, 5, 1e-3)


class TestNairInverse:
    def test_worked_budget(self):
        n_t = nair_required_photons(1e-6, 1e-6)
        assert n_t == pytest.approx(1.24292e7, rel=5e-3)
        assert n_t == pytest.approx(float(oracles.mp_nair_inverse(1e-6, 1e-6)), rel=1e-9)

    def test_quarter_target(self):
        n_t = nair_required_photons(1e-3, 0.25)
        assert n_t == pytest.approx(math.log(0.75) / math.log1p(-1e-3), rel=1e-14)
        assert n_t == pytest.approx(287.538, abs=1e-3)

    def test_degenerate_channel(self):
        with pytest.raises(DomainError):
            nair_required_photons(1.0, 1e-3)

    @settings(max_examples=300, deadline=None)
    @given(kappa=st.floats(1e-9, 0.9), log_p=st.floats(-200, math.log(0.4999)))
    def test_inverse_is_identity(self, kappa, log_p):
        p = math.exp(log_p)
        assert nair_bound(kappa, nair_required_photons(kappa, p)).value == pytest.approx(p, rel=1e-9)


class TestAdvantage:
    def test_worked_example(self):
        r = advantage_report(1e-6, 10, 1e-6)
        assert r.n_s_solved == pytest.approx(1.31224e6, rel=1e-4)
        assert r.mean_pulses == pytest.approx(5.6842, abs=1e-3)
        assert r.mean_photons_fpr == pytest.approx(7.4591e6, rel=1e-4)
        assert r.nair_photons == pytest.approx(1.24292e7, rel=5e-3)
        assert r.advantage_db == pytest.approx(2.217, abs=0.01)

    def test_deep_saturation(self):
        r = advantage_report(1e-9, 10**4, 1e-30)
        assert r.scenario.kappa * r.scenario.m_max * r.n_s_solved == pytest.approx(math.log(5e29), rel=1e-12)
        assert r.mean_photons_fpr * 1e-9 == pytest.approx(34.70, abs=0.01)
        assert r.nair_photons * 1e-9 == pytest.approx(67.69, abs=0.01)
        assert r.advantage_db >= 2.90

    @pytest.mark.parametrize("p", [1e-3, 1e-6, 1e-12])
    def test_single_pulse_loses(self, p):
        r = advantage_report(1e-7, 1, p)
        expected = 10 * math.log10(math.log(1 / (4 * p * (1 - p))) / math.log(1 / (2 * p)))
        assert r.advantage_db == pytest.approx(expected, abs=1e-4)
        assert r.advantage_db < 0

    @settings(max_examples=200, deadline=None)
    @given(kappa=st.floats(1e-9, 1e-2), m_max=st.integers(1, 10**4), log_p=st.floats(-60, -2))
    def test_average_photons_below_maximum(self, kappa, m_max, log_p):
        r = advantage_report(kappa, m_max, math.exp(log_p))
        if m_max == 1:
            # a single pulse is always sent in full
            assert r.mean_photons_fpr == r.n_s_solved
        else:
            assert r.mean_photons_fpr < m_max * r.n_s_solved
        assert r.advantage_db < 10 * math.log10(2) + 0.01


class TestSaturation:
    def test_increasing_below_3db(self):
        curve = saturation_curve(1e-6, 1e-6, [1, 2, 10, 100, 10**4])
        dbs = [db for _, db in curve]
        assert all(b > a for a, b in zip(dbs, dbs[1:]))
        assert dbs[-1] < 10 * math.log10(2)
        assert dbs[2] == pytest.approx(advantage_report(1e-6, 10, 1e-6).advantage_db, abs=1e-12)
        assert dbs[2] == pytest.approx(2.217, abs=0.01)

    def test_limit(self):
        (_, db), = saturation_curve(1e-12, 1e-300, [10**6])
        assert db == pytest.approx(10 * math.log10(2), abs=0.03)

    @pytest.mark.parametrize("m_list", [[], [3, 2], [1, 1]])
    def test_bad_lists(self, m_list):
        with pytest.raises(DomainError):
            saturation_curve(1e-6, 1e-6, m_list)


class TestConfluence:
    def test_ratio_worst_corner(self):
        total = math.log(5e8) / -math.log1p(-1e-3)
        assert total == pytest.approx(2.0019e4, rel=1e-4)
        assert confluence_ratio(1e-3, total) == pytest.approx(1.0101, abs=2e-4)

    def test_ratio_mild_corner(self):
        total = math.log(5) / -math.log1p(-1e-3)
        assert total == pytest.approx(1608.63, abs=0.01)
        assert confluence_ratio(1e-3, total) == pytest.approx(1.000805, abs=2e-6)

    def test_ratio_vanishes_with_kappa(self):
        for kappa in (1e-6, 1e-9, 1e-12):
            total = math.log(5e8) / -math.log1p(-kappa)
            # excess ratio is about M*N_S*kappa^2/2, i.e. proportional to kappa at fixed Pr_NS
            assert confluence_ratio(kappa, total) - 1 == pytest.approx(math.log(5e8) * kappa / 2, rel=1e-3)

    def test_ratio_against_high_precision(self):
        k, x = mpmath.mpf("1e-4"), mpmath.mpf(123456)
        exact = mpmath.exp(-k * x) / mpmath.power(1 - k, x)
        assert confluence_ratio(1e-4, 123456) == pytest.approx(float(exact), rel=1e-12)

    def test_grid(self):
        grid = ConfluenceGrid(kappa_min=1e-6, kappa_per_decade=4, pr_per_decade=2, m_values=(1, 10))
        rep = confluence_check(1e-3, (1e-9, 1e-1), grid)
        assert len(rep.points) == 13 * 17 * 2
        for p in rep.points:
            assert p.ratio >= 1.0
            assert p.ratio == pytest.approx(p.pr_e_cs / p.pr_e_ns, rel=1e-12)
            assert p.pr_e_ns <= p.pr_e_target * (1 + 1e-12)
        assert rep.max_ratio == pytest.approx(1.0101, abs=5e-4)
        assert rep.argmax.kappa == pytest.approx(1e-3)

    def test_regime_guard(self):
        with pytest.raises(DomainError):
            confluence_check(1e-2)
