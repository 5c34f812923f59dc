"""Refinery-gate fuel prices from regional retail forecasts.

Retail forecasts are stripped of taxes, percentage-of-retail marketing and
distribution, and flat per-gallon line items. Naphtha has no published
forecast; its gate track is the gasoline gate track scaled by a ratio fitted
to historical naphtha/gasoline price pairs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError

log = logging.getLogger(__name__)

RETAIL_FUELS = ("diesel", "jet", "gasoline")
PRODUCTS = ("naphtha", "jet", "diesel")


@dataclass(frozen=True)
class FuelAdjustment:
    """Per-state, per-fuel retail-to-gate deductions."""

    tax_usd_per_gal: float = 0.0
    md_pct_of_retail: float = 0.0
    marketing_usd_per_gal: float = 0.0
    distribution_usd_per_gal: float = 0.0

    def __post_init__(self):
        if min(
            self.tax_usd_per_gal,
            self.md_pct_of_retail,
            self.marketing_usd_per_gal,
            self.distribution_usd_per_gal,
        ) < 0:
            raise ConfigError("adjustment factors must be non-negative")
        if self.md_pct_of_retail >= 1:
            raise ConfigError("marketing+distribution percentage must be below 1")


@dataclass(frozen=True)
class AdjustmentFactors:
    """Keyed by (state, fuel)."""

    entries: dict[tuple[str, str], FuelAdjustment]

    def get(self, state: str, fuel: str) -> FuelAdjustment:
        try:
            return self.entries[(state, fuel)]
        except KeyError:
            raise ConfigError(f"no adjustment entry for state={state!r} fuel={fuel!r}") from None


@dataclass(frozen=True)
class FuelPriceTrack:
    """Per-year $/gal by product for one region."""

    region: str
    years: np.ndarray
    prices: dict[str, np.ndarray]

    def __post_init__(self):
        for prod, arr in self.prices.items():
            if len(arr) != len(self.years):
                raise ConfigError(f"{self.region}/{prod}: track length mismatch")
            if np.any(np.asarray(arr) <= 0):
                raise ConfigError(f"{self.region}/{prod}: prices must be positive")

    def year_slice(self, start_year: int, n_years: int) -> list[dict[str, float]]:
        """Per-year product price dicts for operating years start..start+n-1."""
        out = []
        years = list(self.years)
        for y in range(start_year, start_year + n_years):
            if y not in years:
                raise ConfigError(f"{self.region}: year {y} not covered by the fuel track")
            i = years.index(y)
            out.append({p: float(self.prices[p][i]) for p in PRODUCTS})
        return out


def retail_to_gate(retail_usd_per_gal: float, fuel: str, adj: FuelAdjustment) -> float:
    """Strip taxes and downstream costs from a retail price; floors at zero."""
    if retail_usd_per_gal <= 0:
        raise ConfigError("retail price must be positive")
    gate = (
        retail_usd_per_gal
        - adj.tax_usd_per_gal
        - adj.md_pct_of_retail * retail_usd_per_gal
        - adj.marketing_usd_per_gal
        - adj.distribution_usd_per_gal
    )
    if gate < 0:
        log.warning("gate price for %s floored at 0 (retail %.3f)", fuel, retail_usd_per_gal)
        return 0.0
    return gate


def fit_naphtha_ratio(history: pd.DataFrame) -> float:
    """Least-squares through-origin ratio of naphtha to gasoline prices."""
    for col in ("naphtha_usd_per_gal", "gasoline_usd_per_gal"):
        if col not in history.columns:
            raise ConfigError(f"naphtha history missing column {col!r}")
    x = history["gasoline_usd_per_gal"].to_numpy(dtype=np.float64)
    y = history["naphtha_usd_per_gal"].to_numpy(dtype=np.float64)
    denom = float(x @ x)
    if denom <= 0:
        raise ConfigError("degenerate gasoline history")
    ratio = float(x @ y) / denom
    if ratio <= 0:
        raise ConfigError("fitted naphtha/gasoline ratio must be positive")
    return ratio


def naphtha_track(gasoline_gate: np.ndarray, ratio: float) -> np.ndarray:
    if ratio <= 0:
        raise ConfigError("ratio must be positive")
    return np.asarray(gasoline_gate, dtype=np.float64) * ratio


def mean_track_check(values: np.ndarray) -> float:
    return float(np.mean(values))


def gate_price_track(
    region: str,
    state: str,
    retail: pd.DataFrame,
    factors: AdjustmentFactors,
    naphtha_ratio: float,
) -> FuelPriceTrack:
    """Build the per-year gate track for one region from its retail table."""
    for col in ("year", "fuel", "usd_per_gal"):
        if col not in retail.columns:
            raise ConfigError(f"retail table for {region}: missing column {col!r}")
    years = np.sort(retail["year"].unique())
    gates: dict[str, np.ndarray] = {}
    for fuel in RETAIL_FUELS:
        sub = retail[retail["fuel"] == fuel].sort_values("year")
        if not np.array_equal(sub["year"].to_numpy(), years):
            # linear interpolation covers missing years
            full = np.interp(years, sub["year"], sub["usd_per_gal"])
        else:
            full = sub["usd_per_gal"].to_numpy(dtype=np.float64)
        adj = factors.get(state, fuel)
        gates[fuel] = np.array([retail_to_gate(r, fuel, adj) for r in full])
    return FuelPriceTrack(
        region=region,
        years=years,
        prices={
            "naphtha": naphtha_track(gates["gasoline"], naphtha_ratio),
            "jet": gates["jet"],
            "diesel": gates["diesel"],
        },
    )


def read_adjustments_csv(path) -> AdjustmentFactors:
    df = pd.read_csv(path)
    required = [
        "state",
        "fuel",
        "tax_usd_per_gal",
        "md_pct",
        "marketing_usd_per_gal",
        "distribution_usd_per_gal",
    ]
    for col in required:
        if col not in df.columns:
            raise ConfigError(f"{path}: missing column {col!r}")
    entries = {}
    for r in df.itertuples(index=False):
        entries[(str(r.state), str(r.fuel))] = FuelAdjustment(
            tax_usd_per_gal=float(r.tax_usd_per_gal),
            md_pct_of_retail=float(r.md_pct),
            marketing_usd_per_gal=float(r.marketing_usd_per_gal),
            distribution_usd_per_gal=float(r.distribution_usd_per_gal),
        )
    return AdjustmentFactors(entries=entries)


def track_to_frame(track: FuelPriceTrack) -> pd.DataFrame:
    rows = []
    for i, year in enumerate(track.years):
        for prod in PRODUCTS:
            rows.append({"year": int(year), "fuel": prod, "usd_per_gal": track.prices[prod][i]})
    return pd.DataFrame(rows)
