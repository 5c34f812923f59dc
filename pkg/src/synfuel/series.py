"""Hourly price series container and CSV I/O."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError

HOURS_PER_YEAR = 8760

CSV_TIME_COL = "timestamp"
CSV_PRICE_COL = "price_usd_per_mwh"


@dataclass(frozen=True)
class PriceSeries:
    """Hourly electricity prices in $/MWh.

    Negative prices are allowed; values must be finite and timestamps strictly
    increasing on an hourly grid.
    """

    start: pd.Timestamp
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=np.float64)
        if prices.ndim != 1 or prices.size == 0:
            raise ConfigError("price series must be a non-empty 1-d array")
        if not np.all(np.isfinite(prices)):
            raise ConfigError("price series contains non-finite values")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "start", pd.Timestamp(self.start))

    def __len__(self) -> int:
        return self.prices.size

    @property
    def timestamps(self) -> pd.DatetimeIndex:
        return pd.date_range(self.start, periods=len(self), freq="h")

    def year_chunks(self) -> list[np.ndarray]:
        """Split into consecutive 8760-hour blocks (trailing remainder kept)."""
        n = len(self)
        chunks = [self.prices[i : i + HOURS_PER_YEAR] for i in range(0, n, HOURS_PER_YEAR)]
        return chunks


def read_price_csv(path) -> PriceSeries:
    df = pd.read_csv(path)
    for col in (CSV_TIME_COL, CSV_PRICE_COL):
        if col not in df.columns:
            raise ConfigError(f"{path}: missing column {col!r}")
    ts = pd.to_datetime(df[CSV_TIME_COL])
    if len(ts) > 1:
        deltas = np.diff(ts.values).astype("timedelta64[s]").astype(np.int64)
        if np.any(deltas != 3600):
            raise ConfigError(f"{path}: timestamps must be strictly increasing hourly steps")
    return PriceSeries(start=ts.iloc[0], prices=df[CSV_PRICE_COL].to_numpy(dtype=np.float64))


def write_price_csv(path, series: PriceSeries) -> None:
    df = pd.DataFrame(
        {
            CSV_TIME_COL: series.timestamps.strftime("%Y-%m-%dT%H:%M:%S"),
            CSV_PRICE_COL: series.prices,
        }
    )
    df.to_csv(path, index=False, float_format="%.10g")
