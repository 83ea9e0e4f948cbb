"""Acceptance gate.

Each test carries an ``acceptance`` marker; conftest prints one PASS/FAIL line
per criterion at the end of the session.  Run with
``pytest tests/test_acceptance.py -v``.
"""

import json
import math
import time

import numpy as np
import pytest

from firstphoton import (
    Impairments,
    Scenario,
    Source,
    advantage_report,
    cli,
    confluence_check,
    cs_chernoff_bound,
    cs_helstrom_pure_loss,
    estimate_metrics,
    fpr_metrics,
    nair_bound,
    report,
    stop_pmf,
)
from firstphoton.design import ConfluenceGrid

import oracles


def acceptance(number, title):
    return pytest.mark.acceptance(number, title)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def run_cli(tmp_path, command, doc=None, *extra):
    out = tmp_path / f"{command}-{len(list(tmp_path.iterdir()))}.csv"
    argv = [command, "--out", str(out), *extra]
    if doc is not None:
        cfg = tmp_path / f"cfg-{len(list(tmp_path.iterdir()))}.json"
        cfg.write_text(json.dumps({"schema_version": 1, **doc}))
        argv += ["--config", str(cfg)]
    code = cli.main(argv)
    assert code == 0
    return out.read_bytes()


def sig2(x):
    return float(f"{x:.2g}")


@acceptance(1, "worked example: N_T, N_S and advantage")
def test_worked_example(tmp_path):
    doc = {"design": {"kappa": 1e-6, "m_max": 10, "pr_e_target": 1e-6}}
    with Timer() as t:
        (row,) = report.read_csv(run_cli(tmp_path, "design", doc).decode())
    assert float(row["nair_photons"]) == pytest.approx(1.243e7, rel=5e-3)
    assert float(row["n_s"]) == pytest.approx(1.31224e6, rel=5e-4)
    # independent oracle for both photon counts
    assert float(row["nair_photons"]) == pytest.approx(float(oracles.mp_nair_inverse(1e-6, 1e-6)), rel=1e-8)
    assert float(row["n_s"]) == pytest.approx(math.log(5e5) / 1e-5, rel=1e-8)
    assert 2.0 <= float(row["advantage_db"]) <= 2.4
    assert t.elapsed < 1.0


@acceptance(2, "confluence: Pr_CS/Pr_NS >= 1 with max 1.0101")
def test_confluence():
    grid = ConfluenceGrid(kappa_min=1e-6, kappa_per_decade=7, pr_per_decade=3, m_values=(1, 10, 100))
    with Timer() as t:
        rep = confluence_check(1e-3, (1e-9, 1e-1), grid)
    assert len(rep.points) == 22 * 25 * 3
    assert bool(np.all(rep.ratios >= 1.0))
    assert rep.max_ratio == pytest.approx(1.0101, abs=5e-4)
    assert t.elapsed < 1.0


@acceptance(3, "saturation: advantage monotone and approaching 3 dB")
def test_saturation():
    m_grid = [1, 2, 5, 10, 100, 1000, 10**4]
    targets = [1e-3, 1e-6, 1e-10, 1e-20, 1e-30]
    with Timer() as t:
        db = np.array([[advantage_report(1e-9, m, p).advantage_db for p in targets] for m in m_grid])
    assert bool(np.all(np.diff(db, axis=0) >= 0)), "nondecreasing in M"
    assert bool(np.all(np.diff(db, axis=1) >= 0)), "nondecreasing in -log(target)"
    assert db[-1, -1] >= 2.90
    assert db.max() <= 3.02
    assert t.elapsed < 5.0


def pure_loss_scenarios():
    """Twenty pure-loss operating points spread over p_m in [0.01, 0.99]."""
    p_targets = np.geomspace(0.01, 0.99, 20)
    out = []
    for i, p in enumerate(p_targets):
        m_max = (1, 2, 5, 10, 30)[i % 5]
        kappa = (0.3, 1e-2, 1e-4)[i % 3]
        if i % 2:
            n_s = -math.log(p) / (kappa * m_max)
            out.append(Scenario(Source.COHERENT, kappa, n_s, m_max))
        else:
            # nearest integer photon number; kappa is then adjusted to hit p exactly
            n_s = max(1, round(-math.log(p) / (kappa * m_max)))
            kappa = -math.expm1(math.log(p) / (m_max * n_s))
            out.append(Scenario(Source.NUMBER, kappa, n_s, m_max))
    return out


@acceptance(4, "Monte Carlo agrees with closed forms on 20 pure-loss scenarios")
def test_monte_carlo_vs_analytic():
    scenarios = pure_loss_scenarios()
    assert len(scenarios) == 20
    agree = 0
    with Timer() as t:
        for k, sc in enumerate(scenarios):
            exact = fpr_metrics(sc)
            assert 0.01 <= exact.p_m <= 0.99 * (1 + 1e-12)
            est = estimate_metrics(sc, trials=100_000, master_seed=1000 + k)
            assert est.p_f_hat == 0.0
            ok_p_m = abs(est.p_m_hat - exact.p_m) <= 4 * est.p_m_stderr
            ok_mean = abs(est.mean_pulses_hat - exact.mean_pulses) <= 4 * est.mean_pulses_stderr
            agree += ok_p_m and ok_mean
    assert agree >= 19
    assert t.elapsed < 60.0


@acceptance(5, "impaired false-alarm rates at 1e6 trials")
@pytest.mark.parametrize(
    "imp, closed",
    [
        (Impairments(n_b=1e-6, bins_total=7000, bins_range=70), 0.0676),
        (Impairments(n_b=1e-10, bins_total=7000, bins_range=70), 7.0e-6),
        (Impairments(dcr=100.0, bins_total=7000, bins_range=70, pulse_duration_s=1e-7), 6.98e-3),
    ],
    ids=["day", "night", "dark-counts"],
)
def test_impaired_false_alarm(imp, closed):
    sc = Scenario(Source.COHERENT, 1e-6, 1e6, 10)
    expected = -math.expm1(-sc.m_max * (imp.bins_total * imp.n_b + imp.dcr * imp.bins_range * imp.pulse_duration_s))
    assert expected == pytest.approx(closed, rel=1e-3)
    with Timer() as t:
        est = estimate_metrics(sc, imp, trials=1_000_000, master_seed=20_240_601)
    assert est.p_f_stderr > 0
    assert abs(est.p_f_hat - expected) <= 4 * est.p_f_stderr
    assert t.elapsed < 120.0


@acceptance(6, "drone geometry preset to two significant figures")
def test_table1_preset(tmp_path):
    with Timer() as t:
        (row,) = report.read_csv(run_cli(tmp_path, "bins", None, "--preset", "table1").decode())
    expected = {
        "theta_res_rad": 38e-6,
        "range_res_m": 15.0,
        "doppler_res_hz": 10e6,
        "t_rep_s": 67e-6,
        "t_dwell_s": 0.67e-3,
        "delta_theta_rad": 0.19e-6,
        "delta_range_m": 6.7,
        "doppler_shift_hz": 13e9,
    }
    for col, value in expected.items():
        assert sig2(float(row[col])) == pytest.approx(value, rel=1e-12), col
    assert t.elapsed < 1.0


@acceptance(7, "simulate reports are byte-identical across worker counts")
def test_determinism(tmp_path):
    doc = {
        "scenario": {"source": "coherent", "kappa": 1e-3, "n_s": 150.0, "m_max": 8},
        "impairments": {"eta": 0.8, "n_b": 1e-4, "bins_total": 50, "bins_range": 10, "dcr": "1 kcps", "pulse_duration": "0.1 us"},
    }
    runs = [run_cli(tmp_path, "simulate", doc, "--trials", "300000", "--seed", "424242", "--workers", str(w)) for w in (1, 4, 1)]
    assert runs[0] == runs[1] == runs[2]
    assert runs[0].startswith(b"metric,")


N_CASES = 1500


@acceptance(8, "randomized property grids")
def test_property_grids():
    rng = np.random.default_rng(20261016)
    with Timer() as t:
        # Nair <= Helstrom <= Chernoff at N_B = 0
        kappas = 10 ** rng.uniform(-9, math.log10(0.5), N_CASES)
        loads = 10 ** rng.uniform(-3, 4, N_CASES)
        for kappa, load in zip(kappas, loads):
            n_t = load / kappa
            nair, hel, che = nair_bound(kappa, n_t), cs_helstrom_pure_loss(kappa, n_t), cs_chernoff_bound(kappa, n_t)
            assert nair.value <= hel.value <= che.value
            assert nair.log_value <= hel.log_value <= che.log_value

        # pmf normalization and mean identity
        for _ in range(N_CASES):
            m_max = int(rng.integers(1, 2001))
            kappa = float(10 ** rng.uniform(-8, -0.1))
            load = float(10 ** rng.uniform(-4, 2))
            if rng.random() < 0.5:
                sc = Scenario(Source.COHERENT, kappa, load / (kappa * m_max), m_max)
            else:
                n_s = max(1, round(load / (kappa * m_max)))
                sc = Scenario(Source.NUMBER, kappa, n_s, m_max)
            pmf = stop_pmf(sc)
            assert abs(math.fsum(pmf) - 1.0) <= 1e-12
            m = np.arange(1, m_max + 1)
            from_pmf = 0.5 * m_max + 0.5 * math.fsum(m * pmf)
            assert fpr_metrics(sc).mean_pulses == pytest.approx(from_pmf, rel=1e-10)

        # log domain keeps the exponent where the linear value underflows
        for _ in range(N_CASES):
            m_max = int(rng.integers(1, 10**4))
            if rng.random() < 0.5:
                kappa = float(10 ** rng.uniform(-9, -1))
                sc = Scenario(Source.COHERENT, kappa, 1e7 / (kappa * m_max), m_max)
                expected_log = -1e7
            else:
                n_s = int(rng.integers(1, 10**6))
                kappa = 1e7 / (m_max * n_s)
                if kappa >= 1.0:
                    continue
                sc = Scenario(Source.NUMBER, kappa, n_s, m_max)
                expected_log = m_max * n_s * math.log1p(-kappa)
            met = fpr_metrics(sc)
            assert met.p_m == 0.0
            assert met.log_p_m == pytest.approx(expected_log, rel=1e-12)
            assert met.log_pr_e == pytest.approx(met.log_p_m - math.log(2), rel=1e-15)
            assert math.isfinite(met.error_exponent) and met.error_exponent > 0
            n_t = m_max * sc.n_s
            for b in (nair_bound(kappa, n_t), cs_helstrom_pure_loss(kappa, n_t), cs_chernoff_bound(kappa, n_t)):
                assert b.value == 0.0 and math.isfinite(b.log_value)
    assert t.elapsed < 30.0
