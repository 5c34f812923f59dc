"""Hourly profit-maximizing dispatch of plant power between grid and hydrogen.

The fuel train draws a constant hydrogen flow; the electrolyzer modulates
between grid sales and production, buffered by storage. The optimizer is an
exact solver for the continuous linear program (see kernels); hydrogen left in
storage at the end of the horizon is credited at its marginal fuel-train value
so that year-chained solves do not dump inventory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from . import plant
from .errors import ConfigError, InfeasibleDispatch
from .kernels import solve_dispatch
from .plant import IesConfiguration, SiteParams, TechnoParams

ENERGY_BALANCE_TOL_MWE = 1e-6
STORAGE_TOL_KG = 1e-6


@dataclass(frozen=True)
class DispatchProblem:
    prices: np.ndarray  # $/MWh, one entry per hour
    site: SiteParams
    config: IesConfiguration
    tech: TechnoParams
    initial_storage_kg: float
    fuel_prices_usd_per_gal: dict[str, float]
    terminal_value_usd_per_kg: float | None = None  # default: marginal train value

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=np.float64)
        if prices.ndim != 1 or prices.size == 0:
            raise ConfigError("dispatch horizon must be at least one hour")
        object.__setattr__(self, "prices", prices)
        if not -1e-9 <= self.initial_storage_kg <= self.config.storage_capacity_kg + 1e-9:
            raise ConfigError("initial storage outside [0, capacity]")


@dataclass(frozen=True)
class DispatchSchedule:
    grid_mwe: np.ndarray
    htse_mwe: np.ndarray
    h2_kg_h: np.ndarray
    storage_kg: np.ndarray
    objective_usd: float
    initial_storage_kg: float


def marginal_h2_value(tech: TechnoParams, fuel_prices_usd_per_gal: dict[str, float]) -> float:
    """Electricity price ($/MWh) below which the marginal MWh is worth more as
    hydrogen feeding the fuel train (tax credit + product sales - variable O&M).
    """
    spec = plant.effective_elec_spec(tech)
    gal_per_kg = tech.gallons_per_kg_h2()
    fuel_rev_per_kg = sum(
        gal_per_kg[p] * fuel_prices_usd_per_gal.get(p, 0.0) for p in gal_per_kg
    )
    var_om_per_kg = tech.htse_var_om_usd_per_mwh * spec / 1000.0
    return (tech.h2_ptc_usd_per_kg + fuel_rev_per_kg - var_om_per_kg) * 1000.0 / spec


def terminal_value_per_kg(tech: TechnoParams, fuel_prices_usd_per_gal: dict[str, float]) -> float:
    """Credit for a kg of hydrogen left in storage: the value it will earn when
    it eventually feeds the train (production O&M was already charged)."""
    gal_per_kg = tech.gallons_per_kg_h2()
    fuel_rev_per_kg = sum(
        gal_per_kg[p] * fuel_prices_usd_per_gal.get(p, 0.0) for p in gal_per_kg
    )
    return tech.h2_ptc_usd_per_kg + fuel_rev_per_kg


def optimize_dispatch(problem: DispatchProblem) -> DispatchSchedule:
    """Exact optimal schedule for the horizon.

    Raises InfeasibleDispatch when storage cannot sustain the fuel-train draw,
    naming the first hour at which the balance fails.
    """
    cfg = problem.config
    tech = problem.tech
    prices = problem.prices
    H = prices.size

    spec = plant.effective_elec_spec(tech)
    m = plant.htse_h2_rate(cfg.htse_capacity_mwe, tech)  # kg/h at full power
    cap = cfg.storage_capacity_kg
    s0 = min(max(problem.initial_storage_kg, 0.0), cap)

    if cfg.ft_capacity_kg_h > m * (1 + plant.FT_CAPACITY_RTOL) + STORAGE_TOL_KG:
        # storage drains at (draw - max rate) per hour until the balance fails
        drain = cfg.ft_capacity_kg_h - m
        raise InfeasibleDispatch(
            f"fuel-train draw {cfg.ft_capacity_kg_h:.1f} kg/h exceeds the maximum "
            f"hydrogen rate {m:.1f} kg/h; storage empties within hour "
            f"{int(s0 // drain)}",
            first_failing_hour=int(s0 // drain),
        )
    cfg.validate(problem.site, tech)
    d = min(cfg.ft_capacity_kg_h, m)  # grid points may sit on the max within fp noise

    if problem.terminal_value_usd_per_kg is not None:
        v_term = problem.terminal_value_usd_per_kg
    elif cfg.ft_capacity_kg_h > 0:
        v_term = terminal_value_per_kg(tech, problem.fuel_prices_usd_per_gal)
    else:
        v_term = 0.0  # without a fuel train, stored hydrogen earns nothing

    mwh_per_kg = spec / 1000.0
    if m > 0.0:
        # $ per kg produced at hour t: foregone grid revenue plus variable O&M
        c = (prices + tech.htse_var_om_usd_per_mwh) * mwh_per_kg
        h, storage = solve_dispatch(c, m, d, cap, s0, v_term)
    else:
        h = np.zeros(H)
        storage = np.full(H, s0)

    htse_mwe = h * mwh_per_kg
    ft_aux = tech.ft_elec_demand_mwe if cfg.ft_capacity_kg_h > 0 else 0.0
    grid = problem.site.npp_capacity_mwe - ft_aux - htse_mwe
    objective = float(
        prices @ grid
        - tech.htse_var_om_usd_per_mwh * htse_mwe.sum()
        + v_term * (storage[-1] - s0 if H else 0.0)
    )
    return DispatchSchedule(
        grid_mwe=grid,
        htse_mwe=htse_mwe,
        h2_kg_h=h,
        storage_kg=storage,
        objective_usd=objective,
        initial_storage_kg=s0,
    )


def dispatch_oracle(problem: DispatchProblem, grid_points: int) -> float:
    """Best objective over hourly production restricted to a discrete level grid.

    Test-support search over the full control lattice (dynamic program over
    cumulative production counts, equivalent to exhaustive enumeration of the
    discretized schedules). Only small instances are accepted.
    """
    cfg = problem.config
    tech = problem.tech
    prices = problem.prices
    H = prices.size
    if H > 8 or grid_points > 21:
        raise ConfigError("oracle accepts at most 8 hours and 21 grid points")

    spec = plant.effective_elec_spec(tech)
    m = plant.htse_h2_rate(cfg.htse_capacity_mwe, tech)
    d = min(cfg.ft_capacity_kg_h, m)
    cap = cfg.storage_capacity_kg
    s0 = min(max(problem.initial_storage_kg, 0.0), cap)
    if problem.terminal_value_usd_per_kg is not None:
        v_term = problem.terminal_value_usd_per_kg
    elif cfg.ft_capacity_kg_h > 0:
        v_term = terminal_value_per_kg(tech, problem.fuel_prices_usd_per_gal)
    else:
        v_term = 0.0

    mwh_per_kg = spec / 1000.0
    c = (prices + tech.htse_var_om_usd_per_mwh) * mwh_per_kg
    ft_aux = tech.ft_elec_demand_mwe if cfg.ft_capacity_kg_h > 0 else 0.0
    const_rev = float(prices.sum()) * (problem.site.npp_capacity_mwe - ft_aux)

    if m <= 0.0:
        return const_rev

    g = max(2, int(grid_points))
    step = m / (g - 1)
    tol = STORAGE_TOL_KG
    # best[k] = min production cost with k grid-units produced so far
    best = {0: 0.0}
    for t in range(H):
        new: dict[int, float] = {}
        for k, cost in best.items():
            for u in range(g):
                k2 = k + u
                s = s0 + k2 * step - (t + 1) * d
                if s < -tol or s > cap + tol:
                    continue
                cost2 = cost + c[t] * u * step
                prev = new.get(k2)
                if prev is None or cost2 < prev:
                    new[k2] = cost2
        if not new:
            raise InfeasibleDispatch(
                "no feasible discretized schedule", first_failing_hour=t
            )
        best = new
    best_obj = max(-cost + v_term * (k * step - H * d) for k, cost in best.items())
    return const_rev + best_obj


def annual_dispatch_summary(schedule: DispatchSchedule, prices: np.ndarray, tech: TechnoParams) -> dict:
    """Exact sums of hourly quantities feeding the cashflow ledger."""
    prices = np.asarray(prices, dtype=np.float64)
    h = schedule.h2_kg_h
    hours = h.size
    h2_to_ft = float(h.sum() - (schedule.storage_kg[-1] - schedule.initial_storage_kg))
    product_kg = {p: h2_to_ft * y for p, y in tech.yields.items()}
    return {
        "hours": hours,
        "mwh_to_grid": float(schedule.grid_mwe.sum()),
        "grid_revenue_usd": float(prices @ schedule.grid_mwe),
        "htse_mwh": float(schedule.htse_mwe.sum()),
        "h2_kg_produced": float(h.sum()),
        "h2_kg_to_ft": h2_to_ft,
        "product_kg": product_kg,
        "final_storage_kg": float(schedule.storage_kg[-1]),
    }


def schedule_frame(schedule: DispatchSchedule, prices: np.ndarray) -> pd.DataFrame:
    """Hourly schedule in the published export layout."""
    return pd.DataFrame(
        {
            "hour": np.arange(len(prices), dtype=np.int64),
            "price": prices,
            "grid_mw": schedule.grid_mwe,
            "htse_mw": schedule.htse_mwe,
            "h2_kg_h": schedule.h2_kg_h,
            "storage_kg": schedule.storage_kg,
        }
    )


def threshold_policy(
    prices: np.ndarray,
    threshold_usd_per_mwh: float,
    m_kg_h: float,
    d_kg_h: float,
    cap_kg: float,
    s0_kg: float,
) -> np.ndarray:
    """Myopic threshold dispatch: max production below the threshold, the
    sustaining minimum above it, projected onto storage feasibility. Used for
    reference plots and structural tests; not the optimizer."""
    H = len(prices)
    h = np.empty(H)
    s = s0_kg
    for t in range(H):
        lo = max(0.0, d_kg_h - s)
        hi = min(m_kg_h, d_kg_h + cap_kg - s)
        target = m_kg_h if prices[t] <= threshold_usd_per_mwh else 0.0
        h[t] = min(max(target, lo), hi)
        s = s + h[t] - d_kg_h
    return h
