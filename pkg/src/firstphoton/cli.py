"""Command-line front end.

Exit codes: 0 ok, 2 invalid configuration, 3 simulation disagrees with the
closed forms under ``--check``, 4 unreachable design target.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
from pathlib import Path

from . import report
from ._validation import DomainError, UnreachableTargetError
from .analytic import (
    Scenario,
    Source,
    cs_chernoff_bound,
    cs_helstrom_pure_loss,
    fpr_metrics,
    nair_bound,
    Regime,
)
from .config import PRESETS, ConfigDocument, ConfigError, load_config
from .design import advantage_report, confluence_check, saturation_curve
from .geometry import (
    dwell_changes,
    impairment_budget_ok,
    impairment_false_alarm,
    resolutions,
    uncertainty_bins,
)
from .montecarlo import PURE_LOSS, estimate_metrics, expected_metrics

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3
EXIT_UNREACHABLE = 4

Z_LIMIT = 5.0


class CheckFailed(Exception):
    def __init__(self, rows, message):
        super().__init__(message)
        self.rows = rows


# --- row builders -------------------------------------------------------------


def analytic_row(scenario: Scenario, n_b: float = 0.0) -> dict:
    m = fpr_metrics(scenario)
    n_t = scenario.m_max * scenario.n_s
    nair = nair_bound(scenario.kappa, n_t, Regime.EXACT)
    nair_asym = nair_bound(scenario.kappa, n_t, Regime.ASYMPTOTIC)
    chern = cs_chernoff_bound(scenario.kappa, n_t, n_b)
    hel = cs_helstrom_pure_loss(scenario.kappa, n_t)
    row = {
        "source": scenario.source.value,
        "kappa": scenario.kappa,
        "n_s": scenario.n_s,
        "m_max": scenario.m_max,
    }
    row.update(report.probability("p_f", m.p_f))
    row.update(report.probability("p_m", m.p_m, m.log_p_m))
    row.update(report.probability("pr_e", m.pr_e, m.log_pr_e))
    row["mean_pulses"] = m.mean_pulses
    row["mean_photons"] = m.mean_photons
    row["n_t"] = n_t
    row["n_b"] = n_b
    row.update(report.probability("nair_exact", nair.value, nair.log_value))
    row.update(report.probability("nair_asymptotic", nair_asym.value, nair_asym.log_value))
    row.update(report.probability("chernoff", chern.value, chern.log_value))
    row.update(report.probability("helstrom", hel.value, hel.log_value))
    return row


def _z(estimate: float, expected: float, stderr: float, null_stderr: float = 0.0) -> float:
    diff = estimate - expected
    # with no observed events the sample stderr is 0; fall back to the spread
    # the analytic value implies
    stderr = stderr if stderr > 0 else null_stderr
    if stderr > 0:
        return diff / stderr
    if abs(diff) <= 1e-12 * max(1.0, abs(expected)):
        return 0.0
    return math.copysign(math.inf, diff)


def simulate_rows(scenario, impairments, trials, seed, workers=1, expected=None) -> list[dict]:
    est = estimate_metrics(scenario, impairments, trials, seed, workers)
    exp = expected or expected_metrics(scenario, impairments)
    n = est.trials_per_hypothesis
    var_f, var_m = exp.p_f * (1 - exp.p_f), exp.p_m * (1 - exp.p_m)
    rows = [
        ("p_f", exp.p_f, est.p_f_hat, est.p_f_stderr, math.sqrt(var_f / n)),
        ("p_m", exp.p_m, est.p_m_hat, est.p_m_stderr, math.sqrt(var_m / n)),
        ("pr_e", exp.pr_e, est.pr_e_hat, est.pr_e_stderr, 0.5 * math.sqrt((var_f + var_m) / n)),
        ("mean_pulses", exp.mean_pulses, est.mean_pulses_hat, est.mean_pulses_stderr, 0.0),
        ("mean_pulses_h0", exp.mean_pulses_h0, est.mean_pulses_h0_hat, est.mean_pulses_h0_stderr, 0.0),
        ("mean_pulses_h1", exp.mean_pulses_h1, est.mean_pulses_h1_hat, est.mean_pulses_h1_stderr, 0.0),
    ]
    return [
        {
            "metric": name,
            "analytic": a,
            "estimate": e,
            "stderr": se,
            "z_score": _z(e, a, se, null_se),
            "trials_per_hypothesis": n,
            "master_seed": est.master_seed,
        }
        for name, a, e, se, null_se in rows
    ]


def advantage_row(kappa, m_max, pr_e_target) -> dict:
    r = advantage_report(kappa, m_max, pr_e_target)
    return {
        "kappa": r.scenario.kappa,
        "m_max": r.scenario.m_max,
        "pr_e_target": r.pr_e_target,
        "n_s": r.n_s_solved,
        "mean_pulses": r.mean_pulses,
        "mean_photons_fpr": r.mean_photons_fpr,
        "nair_photons": r.nair_photons,
        "advantage_db": r.advantage_db,
    }


def bins_row(doc: ConfigDocument) -> dict:
    g = doc.require("geometry")
    imp = doc.impairments or PURE_LOSS
    res = resolutions(g)
    dw = dwell_changes(g)
    bins = uncertainty_bins(g)
    fa = impairment_false_alarm(bins, g, imp.n_b, imp.dcr, imp.eta)
    row = {
        "theta_res_rad": res.theta_res,
        "range_res_m": res.range_res,
        "doppler_res_hz": res.doppler_res,
        "t_rep_s": res.t_rep,
        "t_dwell_s": res.t_dwell,
        "t_rep_covers_uncertainty": res.t_rep_covers_uncertainty,
        "delta_theta_rad": dw.delta_theta,
        "delta_range_m": dw.delta_range,
        "delta_doppler_hz": dw.delta_doppler,
        "doppler_shift_hz": dw.doppler_shift,
        "b_range": bins.b_range,
        "b_doppler": bins.b_doppler,
        "b_total": bins.b_total,
        "eta": imp.eta,
        "n_b": imp.n_b,
        "dcr_cps": imp.dcr,
    }
    row.update(report.probability("p_f_background", fa.p_f_background, fa.log_p_f_background))
    row.update(report.probability("p_f_dark", fa.p_f_dark, fa.log_p_f_dark))
    row.update(report.probability("p_f_total", fa.p_f_total, fa.log_p_f_total))
    p_m_ref = _pure_loss_miss_reference(doc)
    if p_m_ref is not None:
        row["p_m_pure_loss"] = p_m_ref
        row["budget_ok"] = impairment_budget_ok(fa.p_f_total, p_m_ref)
    return row


def _pure_loss_miss_reference(doc: ConfigDocument):
    # a design target Pr(e) corresponds to a pure-loss miss probability 2*Pr(e)
    if doc.design is not None:
        return min(1.0, 2.0 * doc.design.pr_e_target)
    if doc.scenario is not None:
        return fpr_metrics(doc.scenario).p_m
    return None


# --- commands -----------------------------------------------------------------


def cmd_analytic(doc: ConfigDocument, args) -> list[dict]:
    scenario = doc.require("scenario")
    n_b = doc.impairments.n_b if doc.impairments else 0.0
    return [analytic_row(scenario, n_b)]


def cmd_simulate(doc: ConfigDocument, args) -> list[dict]:
    scenario = doc.require("scenario")
    imp = doc.impairments or PURE_LOSS
    rows = simulate_rows(scenario, imp, args.trials, args.seed, args.workers)
    if args.check:
        bad = [r["metric"] for r in rows if abs(r["z_score"]) > Z_LIMIT]
        if bad:
            raise CheckFailed(rows, f"|z| > {Z_LIMIT:g} for: {', '.join(bad)}")
    return rows


def cmd_design(doc: ConfigDocument, args) -> list[dict]:
    d = doc.require("design")
    rows = [{"table": "advantage", **advantage_row(d.kappa, d.m_max, d.pr_e_target)}]
    if d.saturation_m:
        for m, db in saturation_curve(d.kappa, d.pr_e_target, d.saturation_m):
            rows.append({"table": "saturation", "kappa": d.kappa, "m_max": m, "pr_e_target": d.pr_e_target, "advantage_db": db})
    if d.confluence:
        c = d.confluence
        rep = confluence_check(c.kappa_max, c.pr_e_range, c.grid)
        best = rep.argmax
        rows.append(
            {
                "table": "confluence",
                "kappa": best.kappa,
                "m_max": best.m_max,
                "pr_e_target": best.pr_e_target,
                "n_s": best.n_s,
                "grid_points": len(rep.points),
                "min_ratio": float(rep.ratios.min()),
                "max_ratio": rep.max_ratio,
            }
        )
        if args.confluence_points:
            for p in rep.points:
                rows.append(
                    {
                        "table": "confluence_point",
                        "kappa": p.kappa,
                        "m_max": p.m_max,
                        "pr_e_target": p.pr_e_target,
                        "n_s": p.n_s,
                        "pr_e_ns": p.pr_e_ns,
                        "pr_e_cs": p.pr_e_cs,
                        "ratio": p.ratio,
                    }
                )
    return rows


def cmd_bins(doc: ConfigDocument, args) -> list[dict]:
    return [bins_row(doc)]


def _sweep_points(doc: ConfigDocument):
    sw = doc.require("sweep")
    names = [p.name for p in sw.parameters]
    for idx, combo in enumerate(itertools.product(*(p.values for p in sw.parameters))):
        yield idx, dict(zip(names, combo))


def _sweep_scenario(base: Scenario, point: dict) -> Scenario:
    fields = dict(source=base.source, kappa=base.kappa, n_s=base.n_s, m_max=base.m_max)
    for name, value in point.items():
        if name != "kappa_n_s":
            fields[name] = value
    if "kappa_n_s" in point:
        fields["n_s"] = point["kappa_n_s"] / fields["kappa"]
    return Scenario(**fields)


def cmd_sweep(doc: ConfigDocument, args) -> list[dict]:
    sw = doc.require("sweep")
    points = list(_sweep_points(doc))
    rows = []
    if sw.target == "analytic":
        base = doc.require("scenario")
        n_b = doc.impairments.n_b if doc.impairments else 0.0
        try:
            scenarios = [(i, p, _sweep_scenario(base, p)) for i, p in points]
        except DomainError as exc:
            raise ConfigError(f"sweep point invalid: {exc}") from None
        for i, point, sc in scenarios:
            if i >= args.start_row:
                rows.append({"row": i, **{f"sweep_{k}": v for k, v in point.items()}, **analytic_row(sc, n_b)})
    else:
        d = doc.require("design")
        for i, point in points:
            if i < args.start_row:
                continue
            kw = {"kappa": d.kappa, "m_max": d.m_max, "pr_e_target": d.pr_e_target, **point}
            if not float(kw["m_max"]).is_integer():
                raise ConfigError(f"sweep point {i}: m_max must be an integer")
            kw["m_max"] = int(kw["m_max"])
            rows.append({"row": i, **{f"sweep_{k}": v for k, v in point.items()}, **advantage_row(**kw)})
    return rows


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "design": cmd_design,
    "bins": cmd_bins,
    "sweep": cmd_sweep,
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text, 0)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    src = shared.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="JSON configuration file")
    src.add_argument("--preset", choices=PRESETS, help="use a shipped configuration")
    shared.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override a config field; repeatable",
    )
    shared.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument("--seed", type=_u64, default=0)
    shared.add_argument("--trials", type=_positive, default=100_000, help="Monte Carlo trials per hypothesis")
    shared.add_argument("--workers", type=_positive, default=1, help="threads for Monte Carlo")
    shared.add_argument("--check", action="store_true", help="exit 3 if any |z| exceeds 5")
    shared.add_argument("--start-row", type=int, default=0, help="resume a sweep at this row index")
    shared.add_argument(
        "--confluence-points", action="store_true", help="emit every confluence grid point, not only the summary"
    )

    parser = argparse.ArgumentParser(prog="firstphoton", description="First-photon radar performance toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "analytic": "closed-form metrics and reference bounds",
        "simulate": "Monte Carlo estimates against the closed forms",
        "design": "operating point and advantage over the Nair bound",
        "bins": "resolution, bin budget and false-alarm budget",
        "sweep": "one- or two-parameter grid of analytic or design rows",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[shared], help=text, description=text)
    return parser


def _emit(rows, args) -> None:
    text = report.render(rows, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = load_config(args.config, args.preset, args.overrides)
        rows = COMMANDS[args.command](doc, args)
    except ConfigError as exc:
        print(f"firstphoton: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnreachableTargetError as exc:
        print(f"firstphoton: unreachable design target: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except DomainError as exc:
        print(f"firstphoton: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailed as exc:
        _emit(exc.rows, args)
        print(f"firstphoton: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    _emit(rows, args)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
