"""Monte Carlo NPV evaluation, capacity sweep, optimum selection, sensitivity.

Seeding: realization k, operating year y of a run draws its price year from
default_rng(SeedSequence((base_seed, k, y))), so results are bit-reproducible
and perturbation cases reuse identical draws (common random numbers).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import dispatch as dispatchmod
from . import finance, plant, prices
from .config import Scenario, StudySettings
from .errors import ConfigError, FeedstockShortfall, InfeasibleDispatch, SynfuelError
from .plant import IesConfiguration

HOURS = 8760


def realization_seed(base_seed: int, realization: int, year: int) -> int:
    ss = np.random.SeedSequence((int(base_seed), int(realization), int(year)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ScenarioResult:
    config: IesConfiguration
    feasible: bool
    n: int
    dnpv_mean: float = float("nan")
    dnpv_std: float = float("nan")
    ci95_half_width: float = float("nan")
    npv_ies_mean: float = float("nan")
    npv_bau_mean: float = float("nan")
    category_totals: dict | None = None  # undiscounted sums over life, mean over realizations
    category_totals_discounted: dict | None = None
    ptc_revenue_share: float = float("nan")
    normalized_production_gal_per_mwe_yr: dict | None = None
    mean_grid_mw: float = float("nan")
    infeasible_reason: str = ""


class _SeriesCache:
    """Per-process cache of generated price years, shared across sweep points."""

    def __init__(self, model: prices.SyntheticPriceModel, base_seed: int):
        self.model = model
        self.base_seed = base_seed
        self._store: dict[tuple[int, int], np.ndarray] = {}

    def year(self, realization: int, year: int) -> np.ndarray:
        key = (realization, year)
        arr = self._store.get(key)
        if arr is None:
            seed = realization_seed(self.base_seed, realization, year)
            arr = prices.generate(self.model, HOURS, seed).prices
            self._store[key] = arr
        return arr


@dataclass(frozen=True)
class Perturbation:
    """One sensitivity case: a single parameter changed from the reference."""

    parameter: str
    value: float

    def apply(self, scenario: Scenario) -> tuple[Scenario, float, float]:
        """Returns (scenario', co2_adder, elec_price_factor)."""
        tech = scenario.tech
        if self.parameter == "reference":
            return scenario, 0.0, 1.0
        if self.parameter == "h2_ptc":
            s = _with_tech(scenario, replace(tech, h2_ptc_usd_per_kg=self.value))
            return s, 0.0, 1.0
        if self.parameter == "synfuel_prices":
            track = scenario.fuel_track
            scaled = replace(
                track, prices={p: v * self.value for p, v in track.prices.items()}
            )
            s = replace(scenario, fuel_track=scaled)
            return s, 0.0, 1.0
        if self.parameter == "capex":
            s = _with_tech(
                scenario,
                replace(
                    tech,
                    htse_capex_usd_per_kw=tech.htse_capex_usd_per_kw * self.value,
                    ft_ref_capex_usd=tech.ft_ref_capex_usd * self.value,
                    storage_capex_usd_per_kg=tech.storage_capex_usd_per_kg * self.value,
                ),
            )
            return s, 0.0, 1.0
        if self.parameter == "om":
            s = _with_tech(
                scenario,
                replace(
                    tech,
                    htse_fixed_om_usd_per_mw_yr=tech.htse_fixed_om_usd_per_mw_yr * self.value,
                    htse_var_om_usd_per_mwh=tech.htse_var_om_usd_per_mwh * self.value,
                    ft_ref_fixed_om_usd_yr=tech.ft_ref_fixed_om_usd_yr * self.value,
                    ft_ref_var_om_usd_yr=tech.ft_ref_var_om_usd_yr * self.value,
                ),
            )
            return s, 0.0, 1.0
        if self.parameter == "co2_adder":
            return scenario, float(self.value), 1.0
        if self.parameter == "elec_prices":
            return scenario, 0.0, float(self.value)
        raise ConfigError(f"unknown sensitivity parameter {self.parameter!r}")


def _with_tech(scenario: Scenario, tech) -> Scenario:
    return replace(scenario, tech=tech)


def monte_carlo_npv(
    scenario: Scenario,
    config: IesConfiguration,
    n: int | None = None,
    base_seed: int | None = None,
    cache: _SeriesCache | None = None,
    co2_adder_usd_per_t: float = 0.0,
    elec_price_factor: float = 1.0,
) -> ScenarioResult:
    """Average differential NPV over n price realizations of the project life."""
    st = scenario.study
    n = st.realizations if n is None else n
    if n < 2:
        raise ConfigError("need at least 2 realizations")
    base_seed = st.base_seed if base_seed is None else base_seed
    model = scenario.ensure_model()
    if cache is None or cache.base_seed != base_seed or cache.model is not model:
        cache = _SeriesCache(model, base_seed)

    site, tech, fin = scenario.site, scenario.tech, scenario.fin
    life = fin.project_life_years
    gate = scenario.gate_prices_by_year()

    try:
        config.validate(site, tech)
    except ConfigError as exc:
        return ScenarioResult(config=config, feasible=False, n=n, infeasible_reason=str(exc))

    # the fuel train draw is deterministic, so an over-bound CO2 demand can be
    # rejected before any dispatch work (storage can defer at most one fill)
    min_h2_to_ft = config.ft_capacity_kg_h * HOURS * fin.project_life_years - config.storage_capacity_kg
    min_q_tpy = min_h2_to_ft / fin.project_life_years * tech.co2_per_h2_kg / 1000.0
    if min_q_tpy > scenario.supply_curve.extent_tpy * (1 + 1e-12):
        return ScenarioResult(
            config=config, feasible=False, n=n,
            infeasible_reason=(
                f"annual CO2 demand {min_q_tpy:.0f} t/yr exceeds the supply curve extent "
                f"{scenario.supply_curve.extent_tpy:.0f} t/yr"
            ),
        )

    dnpvs = np.empty(n)
    npv_ies = np.empty(n)
    npv_bau = np.empty(n)
    cat_totals: dict[str, float] = {}
    cat_totals_disc: dict[str, float] = {}
    grid_mwh_total = 0.0
    product_gal_totals = {p: 0.0 for p in ("naphtha", "jet", "diesel")}
    gal_per_kg = tech.gallons_per_kg_h2()

    try:
        for k in range(n):
            carry = st.initial_storage_frac * config.storage_capacity_kg
            summaries = []
            bau_rev = []
            for y in range(1, life + 1):
                p = cache.year(k, y)
                if elec_price_factor != 1.0:
                    p = p * elec_price_factor
                problem = dispatchmod.DispatchProblem(
                    prices=p,
                    site=site,
                    config=config,
                    tech=tech,
                    initial_storage_kg=carry,
                    fuel_prices_usd_per_gal=gate[y - 1],
                )
                sched = dispatchmod.optimize_dispatch(problem)
                summary = dispatchmod.annual_dispatch_summary(sched, p, tech)
                summaries.append(summary)
                carry = summary["final_storage_kg"]
                bau_rev.append(float(p.sum()) * site.npp_capacity_mwe)
                grid_mwh_total += summary["mwh_to_grid"]
                for prod in product_gal_totals:
                    product_gal_totals[prod] += summary["product_kg"][prod] * gal_per_kg[prod]
            ies_ledger = finance.build_ledger(
                config, summaries, gate, scenario.supply_curve, fin, tech, site,
                co2_adder_usd_per_t=co2_adder_usd_per_t,
            )
            bau_ledger = finance.build_bau_ledger(bau_rev, fin, site)
            npv_ies[k] = finance.npv(ies_ledger.net(), fin.wacc)
            npv_bau[k] = finance.npv(bau_ledger.net(), fin.wacc)
            dnpvs[k] = npv_ies[k] - npv_bau[k]
            disc = (1.0 + fin.wacc) ** -np.arange(life + 1)
            for cat in finance.ALL_CATEGORIES:
                amounts = ies_ledger.amounts[cat]
                cat_totals[cat] = cat_totals.get(cat, 0.0) + float(amounts.sum())
                cat_totals_disc[cat] = cat_totals_disc.get(cat, 0.0) + float(amounts @ disc)
    except (InfeasibleDispatch, FeedstockShortfall, ConfigError) as exc:
        return ScenarioResult(config=config, feasible=False, n=n, infeasible_reason=str(exc))

    for d in (cat_totals, cat_totals_disc):
        for cat in d:
            d[cat] /= n

    revenue_total = sum(cat_totals[c] for c in finance.REVENUE_CATEGORIES)
    ptc_share = cat_totals["h2_ptc"] / revenue_total if revenue_total > 0 else float("nan")
    dnpv_std = float(np.std(dnpvs, ddof=1))
    norm = {
        p: product_gal_totals[p] / n / life / site.npp_capacity_mwe
        for p in product_gal_totals
    }
    return ScenarioResult(
        config=config,
        feasible=True,
        n=n,
        dnpv_mean=float(np.mean(dnpvs)),
        dnpv_std=dnpv_std,
        ci95_half_width=1.96 * dnpv_std / np.sqrt(n),
        npv_ies_mean=float(np.mean(npv_ies)),
        npv_bau_mean=float(np.mean(npv_bau)),
        category_totals=cat_totals,
        category_totals_discounted=cat_totals_disc,
        ptc_revenue_share=float(ptc_share),
        normalized_production_gal_per_mwe_yr=norm,
        mean_grid_mw=grid_mwh_total / (n * life * HOURS),
    )


# ---------------------------------------------------------------------------
# Capacity sweep

_WORKER_SCENARIO: Scenario | None = None
_WORKER_CACHE: _SeriesCache | None = None


def _sweep_worker_init(scenario: Scenario, base_seed: int) -> None:
    global _WORKER_SCENARIO, _WORKER_CACHE
    scenario.ensure_model()
    _WORKER_SCENARIO = scenario
    _WORKER_CACHE = _SeriesCache(scenario.price_model, base_seed)


def _sweep_worker(task: tuple) -> tuple:
    idx, cfg_fields, n, base_seed = task
    cfg = IesConfiguration(*cfg_fields)
    result = monte_carlo_npv(
        _WORKER_SCENARIO, cfg, n=n, base_seed=base_seed, cache=_WORKER_CACHE
    )
    return idx, _result_row(idx, cfg, result, base_seed)


def _result_row(idx, cfg: IesConfiguration, r: ScenarioResult, base_seed: int) -> dict:
    return {
        "idx": list(idx),
        "htse_mwe": cfg.htse_capacity_mwe,
        "ft_kg_h": cfg.ft_capacity_kg_h,
        "storage_kg": cfg.storage_capacity_kg,
        "base_seed": base_seed,
        "feasible": bool(r.feasible),
        "infeasible_reason": r.infeasible_reason,
        "n": r.n,
        "dnpv_mean": None if not r.feasible else r.dnpv_mean,
        "dnpv_std": None if not r.feasible else r.dnpv_std,
        "ci95_half_width": None if not r.feasible else r.ci95_half_width,
        "npv_ies_mean": None if not r.feasible else r.npv_ies_mean,
        "npv_bau_mean": None if not r.feasible else r.npv_bau_mean,
        "ptc_revenue_share": None if not r.feasible else r.ptc_revenue_share,
        "mean_grid_mw": None if not r.feasible else r.mean_grid_mw,
        "normalized_production": r.normalized_production_gal_per_mwe_yr,
        "category_totals": r.category_totals,
        "category_totals_discounted": r.category_totals_discounted,
    }


def sweep_lattice(scenario: Scenario, points_per_axis: int | None = None):
    """Lattice configurations with their (i, j, k) indices."""
    npts = points_per_axis or scenario.study.points_per_axis
    ranges = plant.capacity_ranges(scenario.site, scenario.tech)
    h_axis = ranges.htse_mwe.points(npts)
    f_axis = ranges.ft_kg_h.points(npts)
    s_axis = ranges.storage_kg.points(npts)
    out = []
    for i, h in enumerate(h_axis):
        for j, f in enumerate(f_axis):
            for k, s in enumerate(s_axis):
                out.append(((i, j, k), IesConfiguration(h, f, s)))
    return out


def capacity_sweep(
    scenario: Scenario,
    points_per_axis: int | None = None,
    n: int | None = None,
    base_seed: int | None = None,
    jobs: int = 1,
    checkpoint_path: str | Path | None = None,
) -> list[dict]:
    """Evaluate the full capacity lattice; rows ordered by lattice index.

    Completed points recorded in the checkpoint file are not recomputed on a
    rerun with the same config hash and seed.
    """
    st = scenario.study
    n = st.realizations if n is None else n
    base_seed = st.base_seed if base_seed is None else base_seed
    lattice = sweep_lattice(scenario, points_per_axis)
    header = {"config_hash": scenario.config_hash, "base_seed": base_seed, "n": n}

    done: dict[tuple, dict] = {}
    ckpt = Path(checkpoint_path) if checkpoint_path else None
    if ckpt is not None and ckpt.exists():
        with ckpt.open() as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        if lines and lines[0] == header:
            for row in lines[1:]:
                done[tuple(row["idx"])] = row
        else:
            ckpt.unlink()

    if ckpt is not None and not ckpt.exists():
        with ckpt.open("w") as fh:
            fh.write(json.dumps(header) + "\n")
            fh.flush()

    pending = [(idx, cfg) for idx, cfg in lattice if idx not in done]

    def record(idx, row):
        done[idx] = row
        if ckpt is not None:
            with ckpt.open("a") as fh:
                fh.write(json.dumps(row) + "\n")

    if jobs > 1 and pending:
        tasks = [
            (idx, (c.htse_capacity_mwe, c.ft_capacity_kg_h, c.storage_capacity_kg), n, base_seed)
            for idx, c in pending
        ]
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_sweep_worker_init,
            initargs=(scenario, base_seed),
        ) as pool:
            for idx, row in pool.map(_sweep_worker, tasks, chunksize=4):
                record(tuple(idx), row)
    else:
        model = scenario.ensure_model()
        cache = _SeriesCache(model, base_seed)
        for idx, cfg in pending:
            result = monte_carlo_npv(scenario, cfg, n=n, base_seed=base_seed, cache=cache)
            record(idx, _result_row(idx, cfg, result, base_seed))

    return [done[idx] for idx, _ in lattice]


def select_optimum(rows: list[dict]) -> dict:
    """Highest mean differential NPV; ties prefer less storage, then less HTSE."""
    feasible = [r for r in rows if r["feasible"]]
    if not feasible:
        raise SynfuelError("no feasible configuration in the sweep")
    return min(
        feasible,
        key=lambda r: (-r["dnpv_mean"], r["storage_kg"], r["htse_mwe"]),
    )


def select_optimum_result(results: list[ScenarioResult]) -> ScenarioResult:
    feasible = [r for r in results if r.feasible]
    if not feasible:
        raise SynfuelError("no feasible configuration")
    return min(
        feasible,
        key=lambda r: (
            -r.dnpv_mean,
            r.config.storage_capacity_kg,
            r.config.htse_capacity_mwe,
        ),
    )


# ---------------------------------------------------------------------------
# Sensitivity suite


@dataclass(frozen=True)
class SensitivityCase:
    parameter: str
    value: float
    change_in_profitability: float
    dnpv_mean: float
    feasible: bool = True


def sensitivity_suite(
    scenario: Scenario,
    optimum: IesConfiguration,
    n: int | None = None,
    base_seed: int | None = None,
    suite: tuple | None = None,
) -> list[SensitivityCase]:
    """Re-run the optimum under each single-parameter perturbation with common
    random numbers; the unperturbed case maps to a change of exactly zero."""
    st = scenario.study
    n = st.realizations if n is None else n
    base_seed = st.base_seed if base_seed is None else base_seed
    suite = st.sensitivity if suite is None else suite

    model = scenario.ensure_model()
    cache = _SeriesCache(model, base_seed)
    ref = monte_carlo_npv(scenario, optimum, n=n, base_seed=base_seed, cache=cache)
    if not ref.feasible:
        raise SynfuelError(f"reference case infeasible: {ref.infeasible_reason}")

    cases = [
        SensitivityCase(
            parameter="reference", value=0.0, change_in_profitability=0.0,
            dnpv_mean=ref.dnpv_mean,
        )
    ]
    for spec in suite:
        pert = Perturbation(parameter=spec["parameter"], value=float(spec["value"]))
        scen2, adder, elec_factor = pert.apply(scenario)
        scen2.price_model = model  # perturbations never refit the price model
        res = monte_carlo_npv(
            scen2, optimum, n=n, base_seed=base_seed, cache=cache,
            co2_adder_usd_per_t=adder, elec_price_factor=elec_factor,
        )
        if not res.feasible:
            cases.append(
                SensitivityCase(
                    parameter=pert.parameter, value=pert.value,
                    change_in_profitability=float("nan"), dnpv_mean=float("nan"),
                    feasible=False,
                )
            )
            continue
        change = finance.change_in_profitability(
            res.npv_ies_mean, ref.npv_ies_mean, ref.npv_bau_mean
        )
        cases.append(
            SensitivityCase(
                parameter=pert.parameter, value=pert.value,
                change_in_profitability=change, dnpv_mean=res.dnpv_mean,
            )
        )
    return cases
