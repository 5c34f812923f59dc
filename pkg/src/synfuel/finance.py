"""Yearly cashflow ledgers, depreciation, NPV and profitability metrics.

Sign convention: ledger amounts are signed dollars (inflows positive). The
net cashflow of a year is the sum of all category amounts except the
depreciation memo line, which only enters the tax computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import ConfigError, SynfuelError
from .plant import IesConfiguration, SiteParams, TechnoParams

REVENUE_CATEGORIES = (
    "electricity",
    "fuel_naphtha",
    "fuel_jet",
    "fuel_diesel",
    "h2_ptc",
    "capacity_payment",
)
COST_CATEGORIES = (
    "capex",
    "fixed_om",
    "var_om",
    "co2_feedstock",
    "tax",
)
MEMO_CATEGORIES = ("depreciation",)
ALL_CATEGORIES = REVENUE_CATEGORIES + COST_CATEGORIES + MEMO_CATEGORIES


@dataclass(frozen=True)
class FinancialParams:
    project_life_years: int = 20
    wacc: float = 0.10
    inflation: float = 0.0218
    federal_tax: float = 0.21
    state_tax: float = 0.0
    depreciation_class_years: int = 15
    ptc_duration_years: int | None = None  # None: full project life
    ptc_escalates: bool = False

    def __post_init__(self):
        if not 0.0 < self.wacc < 1.0:
            raise ConfigError("wacc must be in (0, 1)")
        if self.project_life_years < 1:
            raise ConfigError("project life must be at least one year")

    @property
    def combined_tax(self) -> float:
        # additive combination of federal and state rates
        return self.federal_tax + self.state_tax

    @property
    def ptc_years(self) -> int:
        return self.ptc_duration_years if self.ptc_duration_years is not None else self.project_life_years


@dataclass
class CashflowLedger:
    """Per-year signed amounts by category, year 0 = construction."""

    years: int  # number of operating years
    amounts: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = self.years + 1
        for cat in ALL_CATEGORIES:
            arr = self.amounts.get(cat)
            if arr is None:
                self.amounts[cat] = np.zeros(n)
            elif len(arr) != n:
                raise ConfigError(f"category {cat}: expected {n} entries")

    def net(self) -> np.ndarray:
        total = np.zeros(self.years + 1)
        for cat in REVENUE_CATEGORIES + COST_CATEGORIES:
            total += self.amounts[cat]
        return total

    def reconcile(self) -> None:
        """Assert the net identity: net = revenues + costs, category by category."""
        net = self.net()
        rebuilt = sum(self.amounts[c] for c in REVENUE_CATEGORIES + COST_CATEGORIES)
        if not np.allclose(net, rebuilt, rtol=0, atol=1e-6):
            raise SynfuelError("ledger reconciliation failed")

    def total(self, category: str) -> float:
        return float(self.amounts[category].sum())

    def to_frame(self, wacc: float | None = None) -> pd.DataFrame:
        """Long-format export: year, category, amount_usd (+ discounted column)."""
        rows = []
        disc = None
        if wacc is not None:
            disc = (1.0 + wacc) ** -np.arange(self.years + 1)
        for cat in ALL_CATEGORIES + ("net",):
            series = self.net() if cat == "net" else self.amounts[cat]
            for year in range(self.years + 1):
                row = {"year": year, "category": cat, "amount_usd": series[year]}
                if disc is not None:
                    row["amount_usd_discounted"] = series[year] * disc[year]
                rows.append(row)
        return pd.DataFrame(rows)


def macrs_schedule(class_years: int = 15) -> np.ndarray:
    """Declining-balance 150% schedule with half-year convention and switch to
    straight line; returns class_years + 1 fractions summing to one."""
    if class_years != 15:
        raise ConfigError(f"unsupported depreciation class life: {class_years}")
    rate = 1.5 / class_years
    fractions = np.zeros(class_years + 1)
    basis = 1.0
    remaining_life = float(class_years)
    for year in range(class_years + 1):
        year_fraction = 0.5 if year in (0, class_years) else 1.0
        db = basis * rate * year_fraction
        sl = basis / remaining_life * year_fraction
        take = max(db, sl)
        fractions[year] = take
        basis -= take
        remaining_life -= year_fraction
        if remaining_life <= 0:
            break
    return fractions


def npv(cashflows, wacc: float) -> float:
    """Present value of a year-indexed cashflow vector (year 0 first)."""
    cf = np.asarray(cashflows, dtype=np.float64)
    disc = (1.0 + wacc) ** -np.arange(cf.size)
    return float(cf @ disc)


def delta_npv(ies: CashflowLedger, bau: CashflowLedger, fin: FinancialParams) -> float:
    return npv(ies.net(), fin.wacc) - npv(bau.net(), fin.wacc)


def change_in_profitability(npv_case: float, npv_ref: float, npv_baseline: float) -> float:
    denom = npv_ref - npv_baseline
    if denom == 0.0:
        raise SynfuelError("undefined reference: npv_ref equals npv_baseline")
    return (npv_case - npv_ref) / denom


def total_capex_usd(config: IesConfiguration, tech: TechnoParams) -> float:
    ft_scale = (
        (config.ft_capacity_kg_h / tech.ft_ref_capacity_kg_h) ** tech.ft_scaling_exponent
        if config.ft_capacity_kg_h > 0
        else 0.0
    )
    return (
        tech.htse_capex_usd_per_kw * config.htse_capacity_mwe * 1000.0
        + tech.ft_ref_capex_usd * ft_scale
        + tech.storage_capex_usd_per_kg * config.storage_capacity_kg
    )


def build_ledger(
    config: IesConfiguration,
    yearly_summaries: list[dict],
    fuel_prices_by_year: list[dict[str, float]],
    supply_curve,
    fin: FinancialParams,
    tech: TechnoParams,
    site: SiteParams,
    co2_adder_usd_per_t: float = 0.0,
) -> CashflowLedger:
    """Cashflow ledger of the integrated plant over the project life.

    `yearly_summaries` come from dispatch.annual_dispatch_summary, one per
    operating year; `fuel_prices_by_year` are refinery-gate $/gal by product.
    Raises FeedstockShortfall when a year's CO2 demand exceeds the curve.
    """
    from .co2 import feedstock_cost  # local import to avoid a cycle

    life = fin.project_life_years
    if len(yearly_summaries) != life or len(fuel_prices_by_year) != life:
        raise ConfigError("dispatch summaries and fuel prices must cover the project life")

    led = CashflowLedger(years=life)
    a = led.amounts
    a["capex"][0] = -total_capex_usd(config, tech)

    ft_scale = (
        (config.ft_capacity_kg_h / tech.ft_ref_capacity_kg_h) ** tech.ft_scaling_exponent
        if config.ft_capacity_kg_h > 0
        else 0.0
    )
    depr = macrs_schedule(fin.depreciation_class_years) * (-a["capex"][0])
    gal_per_kg = {
        p: 1.0 / (tech.densities_kg_l[p] * 3.78541) for p in ("naphtha", "jet", "diesel")
    }

    for y in range(1, life + 1):
        s = yearly_summaries[y - 1]
        gate = fuel_prices_by_year[y - 1]
        esc = (1.0 + fin.inflation) ** y

        a["electricity"][y] = s["grid_revenue_usd"]
        for p in ("naphtha", "jet", "diesel"):
            a[f"fuel_{p}"][y] = s["product_kg"][p] * gal_per_kg[p] * gate[p]
        if y <= fin.ptc_years:
            ptc_rate = tech.h2_ptc_usd_per_kg * (esc if fin.ptc_escalates else 1.0)
            a["h2_ptc"][y] = s["h2_kg_to_ft"] * ptc_rate
        mean_grid_mw = s["mwh_to_grid"] / s["hours"]
        a["capacity_payment"][y] = site.capacity_payment_usd_per_mw_yr * mean_grid_mw

        a["fixed_om"][y] = -(
            tech.htse_fixed_om_usd_per_mw_yr * config.htse_capacity_mwe
            + tech.ft_ref_fixed_om_usd_yr * ft_scale
        ) * esc
        a["var_om"][y] = -(
            tech.htse_var_om_usd_per_mwh * s["htse_mwh"]
            + tech.ft_ref_var_om_usd_yr * ft_scale
        ) * esc

        q_tpy = s["h2_kg_to_ft"] * tech.co2_per_h2_kg / 1000.0
        if q_tpy > 0:
            base_cost = feedstock_cost(supply_curve, q_tpy)
            a["co2_feedstock"][y] = -(base_cost + co2_adder_usd_per_t * q_tpy) * esc

        if y <= fin.depreciation_class_years + 1:
            a["depreciation"][y] = depr[y - 1]

        revenues = sum(a[c][y] for c in REVENUE_CATEGORIES)
        deductible = -(a["fixed_om"][y] + a["var_om"][y] + a["co2_feedstock"][y])
        taxable = revenues - deductible - a["depreciation"][y]
        a["tax"][y] = -max(0.0, taxable) * fin.combined_tax

    led.reconcile()
    return led


def build_bau_ledger(
    yearly_grid_revenue_usd: list[float],
    fin: FinancialParams,
    site: SiteParams,
) -> CashflowLedger:
    """Grid-only baseline: the plant sells its full output every hour.

    Only cashflows that differ from the integrated case are carried; common
    plant O&M and fuel-cycle costs cancel in the differential NPV.
    """
    life = fin.project_life_years
    if len(yearly_grid_revenue_usd) != life:
        raise ConfigError("grid revenues must cover the project life")
    led = CashflowLedger(years=life)
    a = led.amounts
    for y in range(1, life + 1):
        a["electricity"][y] = yearly_grid_revenue_usd[y - 1]
        a["capacity_payment"][y] = site.capacity_payment_usd_per_mw_yr * site.npp_capacity_mwe
        revenues = a["electricity"][y] + a["capacity_payment"][y]
        a["tax"][y] = -max(0.0, revenues) * fin.combined_tax
    led.reconcile()
    return led
