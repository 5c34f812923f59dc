"""Command-line entry point: scenario pipelines and artifact persistence.

Every artifact is reproducible from (config, seed); CSVs carry a sidecar
``<name>.meta.json`` with the config hash and seed, and summary.json embeds
them directly. No wall-clock state is written, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__, co2, dispatch as dispatchmod, finance, fuels, plant, prices, study
from .config import Scenario, resolve
from .errors import ConfigError, FeedstockShortfall, InfeasibleDispatch, InfeasibleSite, SynfuelError
from .kernels import BACKEND
from .plant import IesConfiguration
from .series import PriceSeries, write_price_csv

FLOAT_FMT = "%.10g"


def _meta(scenario: Scenario, seed: int | None, extra: dict | None = None) -> dict:
    doc = {
        "tool": "synfuel",
        "version": __version__,
        "site": scenario.site.name,
        "config_hash": scenario.config_hash,
        "seed": seed,
        "kernel_backend": BACKEND,
    }
    if extra:
        doc.update(extra)
    return doc


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, df: pd.DataFrame, scenario: Scenario, seed: int | None,
               extra: dict | None = None) -> None:
    df.to_csv(path, index=False, float_format=FLOAT_FMT)
    _write_json(path.with_suffix(path.suffix + ".meta.json"), _meta(scenario, seed, extra))


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_from_flags(args, scenario: Scenario) -> IesConfiguration:
    if args.htse is None or args.ft_tph is None or args.storage_t is None:
        raise ConfigError("this command needs --htse, --ft-tph and --storage-t")
    return IesConfiguration(
        htse_capacity_mwe=float(args.htse),
        ft_capacity_kg_h=float(args.ft_tph) * 1000.0,
        storage_capacity_kg=float(args.storage_t) * 1000.0,
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_train(args) -> int:
    scenario = resolve(args.config)
    model = scenario.ensure_model()
    out = Path(args.out or "model.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    doc = prices.model_to_dict(model)
    doc["metadata"] = _meta(scenario, None)
    _write_json(out, doc)
    print(f"trained price model for {scenario.site.name}: "
          f"p={model.arma.p} q={model.arma.q} sigma={model.arma.sigma:.4f} -> {out}")
    return 0


def cmd_generate(args) -> int:
    scenario = resolve(args.config)
    model = scenario.ensure_model()
    hours = args.hours if args.hours else args.years * 8760
    seed = args.seed if args.seed is not None else scenario.study.base_seed
    series = prices.generate(model, hours, seed)
    out = Path(args.out or "synthetic_prices.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_price_csv(out, series)
    _write_json(out.with_suffix(out.suffix + ".meta.json"),
                _meta(scenario, seed, {"hours": hours}))
    report = prices.validate_moments(scenario.price_history, series)
    print(report.to_frame().to_string(index=False))
    print(f"moment validation {'PASSED' if report.all_passed else 'FAILED'} -> {out}")
    return 0


def cmd_dispatch(args) -> int:
    scenario = resolve(args.config)
    cfg = _config_from_flags(args, scenario)
    seed = args.seed if args.seed is not None else scenario.study.base_seed
    model = scenario.ensure_model()
    series = prices.generate(model, 8760, seed)
    gate = scenario.gate_prices_by_year()[0]
    problem = dispatchmod.DispatchProblem(
        prices=series.prices,
        site=scenario.site,
        config=cfg,
        tech=scenario.tech,
        initial_storage_kg=scenario.study.initial_storage_frac * cfg.storage_capacity_kg,
        fuel_prices_usd_per_gal=gate,
    )
    sched = dispatchmod.optimize_dispatch(problem)
    out = Path(args.out or "dispatch.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    frame = dispatchmod.schedule_frame(sched, series.prices)
    threshold = dispatchmod.marginal_h2_value(scenario.tech, gate)
    _write_csv(out, frame, scenario, seed, {
        "objective_usd": sched.objective_usd,
        "marginal_h2_value_usd_per_mwh": threshold,
        "htse_mwe": cfg.htse_capacity_mwe,
        "ft_kg_h": cfg.ft_capacity_kg_h,
        "storage_kg": cfg.storage_capacity_kg,
    })
    summary = dispatchmod.annual_dispatch_summary(sched, series.prices, scenario.tech)
    print(f"dispatch year: grid {summary['mwh_to_grid']:.0f} MWh, "
          f"H2 {summary['h2_kg_produced']:.0f} kg, threshold {threshold:.2f} $/MWh -> {out}")
    return 0


def cmd_supply_curve(args) -> int:
    scenario = resolve(args.config)
    out = Path(args.out or "supply_curve.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out, scenario.supply_curve.to_frame(), scenario, None, {
        "extent_tpy": scenario.supply_curve.extent_tpy,
        "transport_params": vars(scenario.transport_params),
    })
    print(f"supply curve: {len(scenario.supply_curve.cum_qty_tpy)} breakpoints, "
          f"extent {scenario.supply_curve.extent_tpy:.0f} t/yr -> {out}")
    return 0


def cmd_gate_prices(args) -> int:
    scenario = resolve(args.config)
    out = Path(args.out or f"gate_prices_{scenario.site.fuel_region.replace(' ', '_')}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out, fuels.track_to_frame(scenario.fuel_track), scenario, None, {
        "region": scenario.fuel_track.region,
        "naphtha_gasoline_ratio": scenario.naphtha_ratio,
    })
    means = {p: float(np.mean(scenario.fuel_track.prices[p])) for p in fuels.PRODUCTS}
    print(f"gate prices for {scenario.fuel_track.region}: means {means} -> {out}")
    return 0


def cmd_npv(args) -> int:
    scenario = resolve(args.config)
    cfg = _config_from_flags(args, scenario)
    seed = args.seed if args.seed is not None else scenario.study.base_seed
    n = args.realizations or scenario.study.realizations
    result = study.monte_carlo_npv(scenario, cfg, n=n, base_seed=seed)
    out = _outdir(args)
    if not result.feasible:
        raise InfeasibleDispatch(f"configuration infeasible: {result.infeasible_reason}")
    doc = {
        "schema": "synfuel.summary.v1",
        "meta": _meta(scenario, seed, {"realizations": n}),
        "config": {
            "htse_mwe": cfg.htse_capacity_mwe,
            "ft_tph": cfg.ft_capacity_kg_h / 1000.0,
            "storage_t": cfg.storage_capacity_kg / 1000.0,
        },
        "dnpv_mean_usd": result.dnpv_mean,
        "dnpv_std_usd": result.dnpv_std,
        "ci95_usd": result.ci95_half_width,
        "npv_ies_mean_usd": result.npv_ies_mean,
        "npv_bau_mean_usd": result.npv_bau_mean,
        "ptc_revenue_share": result.ptc_revenue_share,
        "mean_grid_mw": result.mean_grid_mw,
        "normalized_production_gal_per_mwe_yr": result.normalized_production_gal_per_mwe_yr,
        "category_totals_usd": result.category_totals,
        "category_totals_discounted_usd": result.category_totals_discounted,
    }
    _write_json(out / "summary.json", doc)

    # one representative realization's full ledger, both raw and discounted
    cache = study._SeriesCache(scenario.ensure_model(), seed)
    gate = scenario.gate_prices_by_year()
    carry = scenario.study.initial_storage_frac * cfg.storage_capacity_kg
    summaries = []
    for y in range(1, scenario.fin.project_life_years + 1):
        p = cache.year(0, y)
        problem = dispatchmod.DispatchProblem(
            prices=p, site=scenario.site, config=cfg, tech=scenario.tech,
            initial_storage_kg=carry, fuel_prices_usd_per_gal=gate[y - 1],
        )
        sched = dispatchmod.optimize_dispatch(problem)
        summary = dispatchmod.annual_dispatch_summary(sched, p, scenario.tech)
        summaries.append(summary)
        carry = summary["final_storage_kg"]
    ledger = finance.build_ledger(cfg, summaries, gate, scenario.supply_curve,
                                  scenario.fin, scenario.tech, scenario.site)
    _write_csv(out / "ledger.csv", ledger.to_frame(wacc=scenario.fin.wacc), scenario, seed)
    print(f"dNPV mean {result.dnpv_mean/1e6:.1f} M$, std {result.dnpv_std/1e6:.1f} M$ -> {out}")
    return 0


def _sweep_frame(rows: list[dict]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "htse_mwe": [r["htse_mwe"] for r in rows],
            "ft_tph": [r["ft_kg_h"] / 1000.0 for r in rows],
            "storage_t": [r["storage_kg"] / 1000.0 for r in rows],
            "dnpv_mean": [("" if r["dnpv_mean"] is None else r["dnpv_mean"]) for r in rows],
            "dnpv_std": [("" if r["dnpv_std"] is None else r["dnpv_std"]) for r in rows],
            "feasible": [r["feasible"] for r in rows],
        }
    )


def _optimum_doc(opt: dict) -> dict:
    return {
        "htse_mwe": opt["htse_mwe"],
        "ft_tph": opt["ft_kg_h"] / 1000.0,
        "storage_t": opt["storage_kg"] / 1000.0,
        "idx": opt["idx"],
        "dnpv_mean_usd": opt["dnpv_mean"],
        "dnpv_std_usd": opt["dnpv_std"],
        "ci95_usd": opt["ci95_half_width"],
        "npv_ies_mean_usd": opt["npv_ies_mean"],
        "npv_bau_mean_usd": opt["npv_bau_mean"],
        "ptc_revenue_share": opt["ptc_revenue_share"],
        "mean_grid_mw": opt["mean_grid_mw"],
        "normalized_production_gal_per_mwe_yr": opt["normalized_production"],
        "category_totals_usd": opt["category_totals"],
        "category_totals_discounted_usd": opt["category_totals_discounted"],
    }


def cmd_sweep(args) -> int:
    scenario = resolve(args.config)
    seed = args.seed if args.seed is not None else scenario.study.base_seed
    n = args.realizations or scenario.study.realizations
    npts = args.points or scenario.study.points_per_axis
    out = _outdir(args)
    rows = study.capacity_sweep(
        scenario,
        points_per_axis=npts,
        n=n,
        base_seed=seed,
        jobs=args.jobs,
        checkpoint_path=out / "sweep.checkpoint.jsonl",
    )
    _write_csv(out / "sweep.csv", _sweep_frame(rows), scenario, seed,
               {"points_per_axis": npts, "realizations": n})
    optimum = study.select_optimum(rows)
    feasible_count = sum(1 for r in rows if r["feasible"])
    doc = {
        "schema": "synfuel.summary.v1",
        "meta": _meta(scenario, seed, {"realizations": n, "points_per_axis": npts}),
        "points": {"total": len(rows), "feasible": feasible_count,
                   "infeasible": len(rows) - feasible_count},
        "optimum": _optimum_doc(optimum),
    }
    _write_json(out / "summary.json", doc)
    print(f"sweep {scenario.site.name}: {len(rows)} points ({feasible_count} feasible); "
          f"optimum HTSE {optimum['htse_mwe']:.1f} MWe, FT {optimum['ft_kg_h']/1000:.2f} t/h, "
          f"storage {optimum['storage_kg']/1000:.1f} t, dNPV {optimum['dnpv_mean']/1e6:.1f} M$ -> {out}")
    return 0


def cmd_sensitivity(args) -> int:
    scenario = resolve(args.config)
    seed = args.seed if args.seed is not None else scenario.study.base_seed
    n = args.realizations or scenario.study.realizations
    out = _outdir(args)
    if args.htse is not None:
        cfg = _config_from_flags(args, scenario)
    else:
        summary_path = out / "summary.json"
        if not summary_path.exists():
            raise ConfigError(
                "no optimum available: pass --htse/--ft-tph/--storage-t or run sweep into --out first"
            )
        opt = json.loads(summary_path.read_text())["optimum"]
        cfg = IesConfiguration(
            htse_capacity_mwe=opt["htse_mwe"],
            ft_capacity_kg_h=opt["ft_tph"] * 1000.0,
            storage_capacity_kg=opt["storage_t"] * 1000.0,
        )
    cases = study.sensitivity_suite(scenario, cfg, n=n, base_seed=seed)
    df = pd.DataFrame(
        {
            "parameter": [c.parameter for c in cases],
            "value": [c.value for c in cases],
            "change_pct": [100.0 * c.change_in_profitability for c in cases],
        }
    )
    _write_csv(out / "sensitivity.csv", df, scenario, seed, {
        "config": {"htse_mwe": cfg.htse_capacity_mwe, "ft_kg_h": cfg.ft_capacity_kg_h,
                   "storage_kg": cfg.storage_capacity_kg},
    })
    print(df.to_string(index=False))
    return 0


REPORT_FILES = (
    "sweep.csv",
    "sensitivity.csv",
    "summary.json",
    "ledger.csv",
    "supply_curve.csv",
    "dispatch.csv",
)


def cmd_report(args) -> int:
    src = Path(args.input)
    out = _outdir(args)
    if not src.exists():
        raise ConfigError(f"report input directory does not exist: {src}")
    manifest = {"collected": {}, "sites": {}}
    summaries = []
    for found in sorted(src.rglob("*")):
        if found.name in REPORT_FILES or found.name.endswith(".meta.json"):
            rel = found.relative_to(src)
            dest = out / rel
            dest.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(found, dest)
            manifest["collected"][str(rel)] = True
            if found.name == "summary.json":
                doc = json.loads(found.read_text())
                if "optimum" in doc:
                    summaries.append((doc["meta"]["site"], doc))
    if summaries:
        rows = []
        for site, doc in sorted(summaries):
            opt = doc["optimum"]
            rows.append({
                "site": site,
                "dnpv_mean_usd": opt["dnpv_mean_usd"],
                "dnpv_std_usd": opt["dnpv_std_usd"],
                "ci95_usd": opt["ci95_usd"],
            })
            manifest["sites"][site] = doc["meta"]["config_hash"]
        pd.DataFrame(rows).to_csv(out / "dnpv_summary.csv", index=False, float_format=FLOAT_FMT)
    _write_json(out / "manifest.json", manifest)
    print(f"collected {len(manifest['collected'])} artifacts from {src} -> {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="synfuel",
        description="Techno-economic simulator for nuclear-powered synthetic fuel plants",
    )
    p.add_argument("--version", action="version", version=f"synfuel {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="scenario JSON path")
        sp.add_argument("--seed", type=int, default=None, help="base seed override")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--realizations", type=int, default=None, help="price realizations")
        return sp

    sp = common(sub.add_parser("train", help="fit the price model"))
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_train)

    sp = common(sub.add_parser("generate", help="emit synthetic price years"))
    sp.add_argument("--hours", type=int, default=None)
    sp.add_argument("--years", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_generate)

    for name, fn, needs_caps in (
        ("dispatch", cmd_dispatch, True),
        ("npv", cmd_npv, True),
        ("sensitivity", cmd_sensitivity, True),
    ):
        sp = common(sub.add_parser(name))
        if needs_caps:
            sp.add_argument("--htse", type=float, default=None, help="HTSE capacity, MWe")
            sp.add_argument("--ft-tph", dest="ft_tph", type=float, default=None,
                            help="FT capacity, t-H2/h")
            sp.add_argument("--storage-t", dest="storage_t", type=float, default=None,
                            help="storage capacity, t-H2")
        sp.add_argument("--out", default=("out" if name in ("npv", "sensitivity") else None))
        sp.set_defaults(func=fn)

    sp = common(sub.add_parser("supply-curve"))
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_supply_curve)

    sp = common(sub.add_parser("gate-prices"))
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_gate_prices)

    sp = common(sub.add_parser("sweep"))
    sp.add_argument("--points", type=int, default=None, help="lattice points per axis")
    sp.add_argument("--out", default="out")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("report", help="collect artifacts into an output directory")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_report)

    return p


_EXIT_CODES = {
    ConfigError: 2,
    InfeasibleSite: 3,
    InfeasibleDispatch: 3,
    FeedstockShortfall: 3,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SynfuelError as exc:
        code = next((c for t, c in _EXIT_CODES.items() if isinstance(exc, t)), 4)
        detail = {}
        if isinstance(exc, InfeasibleDispatch) and exc.first_failing_hour is not None:
            detail["first_failing_hour"] = exc.first_failing_hour
        if isinstance(exc, FeedstockShortfall) and exc.deficit_tpy is not None:
            detail["deficit_tpy"] = exc.deficit_tpy
        sys.stderr.write(json.dumps({
            "error": {"type": type(exc).__name__, "message": str(exc), "detail": detail}
        }) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
