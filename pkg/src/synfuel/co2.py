"""CO2 supply curves: purity-dependent capture cost plus pipeline transport.

Sources are merit-ordered by total unit cost and accumulated up to the site's
demand bound; the curve stores cumulative quantity against cumulative average
cost. The pipeline model is a three-parameter surrogate with flow economies of
scale, calibrated against reference cost points shipped with a scenario pack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError, FeedstockShortfall

SOURCE_KINDS = (
    "bioethanol",
    "ammonia",
    "natural_gas",
    "coal",
    "hydrogen",
    "iron_steel",
    "cement",
)

PURITY_THRESHOLD_PCT_DEFAULT = 95.0


@dataclass(frozen=True)
class Co2Source:
    id: str
    kind: str
    capacity_tpy: float
    concentration_pct: float
    distance_km: float

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ConfigError(f"unknown CO2 source kind: {self.kind!r}")
        if self.capacity_tpy <= 0:
            raise ConfigError(f"{self.id}: capacity must be positive")
        if not 0.0 < self.concentration_pct <= 100.0:
            raise ConfigError(f"{self.id}: concentration must be in (0, 100]")
        if self.distance_km < 0:
            raise ConfigError(f"{self.id}: distance must be non-negative")


@dataclass(frozen=True)
class TransportParams:
    """$/t = a * L * Q^(-beta) + b * L + c, with L in km and Q in t/yr."""

    a: float
    b: float
    c: float
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ConfigError("beta must be in [0, 1)")


@dataclass(frozen=True)
class SupplyCurve:
    """Breakpoints of cumulative quantity, cumulative average cost and the
    marginal source id; between breakpoints total cost is linear (the marginal
    source's unit cost applies)."""

    cum_qty_tpy: np.ndarray
    avg_cost_usd_per_t: np.ndarray
    unit_cost_usd_per_t: np.ndarray
    marginal_source: tuple[str, ...]

    @property
    def extent_tpy(self) -> float:
        return float(self.cum_qty_tpy[-1]) if self.cum_qty_tpy.size else 0.0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "cum_qty_tpy": self.cum_qty_tpy,
                "avg_cost_usd_per_t": self.avg_cost_usd_per_t,
                "marginal_source": list(self.marginal_source),
            }
        )


def capture_cost(source: Co2Source, cost_table: dict[str, dict[str, float]],
                 purity_threshold_pct: float = PURITY_THRESHOLD_PCT_DEFAULT) -> float:
    """$/t for capture plus compression; high-purity streams pay compression only."""
    try:
        entry = cost_table[source.kind]
    except KeyError:
        raise ConfigError(f"no capture cost entry for kind {source.kind!r}") from None
    cost = float(entry["compression_usd_per_t"])
    if source.concentration_pct < purity_threshold_pct:
        cost += float(entry["capture_usd_per_t"])
    return cost


def transport_cost(distance_km: float, flow_tpy: float, params: TransportParams) -> float:
    """Pipeline $/t for one source's flow over a distance."""
    if distance_km < 0:
        raise ConfigError("distance must be non-negative")
    if flow_tpy <= 0:
        raise ConfigError("flow must be positive")
    return params.a * distance_km * flow_tpy ** (-params.beta) + params.b * distance_km + params.c


def calibrate_transport(reference: pd.DataFrame, beta_grid=None) -> TransportParams:
    """Least-squares fit of (a, b, c) over a beta grid against reference points
    with columns distance_km, flow_tpy, cost_usd_per_t."""
    for col in ("distance_km", "flow_tpy", "cost_usd_per_t"):
        if col not in reference.columns:
            raise ConfigError(f"transport reference table missing column {col!r}")
    if beta_grid is None:
        beta_grid = np.round(np.arange(0.0, 0.96, 0.05), 2)
    L = reference["distance_km"].to_numpy(dtype=np.float64)
    Q = reference["flow_tpy"].to_numpy(dtype=np.float64)
    y = reference["cost_usd_per_t"].to_numpy(dtype=np.float64)
    best = None
    for beta in beta_grid:
        X = np.column_stack([L * Q ** (-beta), L, np.ones_like(L)])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = float(((X @ coef - y) ** 2).sum())
        if best is None or resid < best[0]:
            best = (resid, float(beta), coef)
    _, beta, (a, b, c) = best
    return TransportParams(a=float(a), b=float(b), c=float(c), beta=beta)


def unit_cost(source: Co2Source, cost_table, transport_params: TransportParams,
              purity_threshold_pct: float = PURITY_THRESHOLD_PCT_DEFAULT) -> float:
    return capture_cost(source, cost_table, purity_threshold_pct) + transport_cost(
        source.distance_km, source.capacity_tpy, transport_params
    )


def build_supply_curve(
    sources: list[Co2Source],
    demand_bound_tpy: float,
    cost_table: dict[str, dict[str, float]],
    transport_params: TransportParams,
    purity_threshold_pct: float = PURITY_THRESHOLD_PCT_DEFAULT,
    order_by: str = "unit_cost",
) -> SupplyCurve:
    """Merit-order accumulation of sources up to the demand bound.

    order_by: "unit_cost" (default) or "distance".
    """
    if demand_bound_tpy <= 0:
        raise ConfigError("demand bound must be positive")
    costs = {
        s.id: unit_cost(s, cost_table, transport_params, purity_threshold_pct) for s in sources
    }
    if order_by == "unit_cost":
        key = lambda s: (costs[s.id], s.id)
    elif order_by == "distance":
        key = lambda s: (s.distance_km, s.id)
    else:
        raise ConfigError(f"unknown ordering {order_by!r}")
    ordered = sorted(sources, key=key)

    cum_q: list[float] = []
    avg: list[float] = []
    unit: list[float] = []
    ids: list[str] = []
    total_q = 0.0
    total_cost = 0.0
    for s in ordered:
        take = min(s.capacity_tpy, demand_bound_tpy - total_q)
        if take <= 0:
            break
        total_q += take
        total_cost += costs[s.id] * take
        cum_q.append(total_q)
        avg.append(total_cost / total_q)
        unit.append(costs[s.id])
        ids.append(s.id)
    if total_q < demand_bound_tpy * (1 - 1e-12):
        raise FeedstockShortfall(
            f"registry supplies {total_q:.0f} t/yr of the {demand_bound_tpy:.0f} t/yr bound",
            deficit_tpy=demand_bound_tpy - total_q,
        )
    return SupplyCurve(
        cum_qty_tpy=np.asarray(cum_q),
        avg_cost_usd_per_t=np.asarray(avg),
        unit_cost_usd_per_t=np.asarray(unit),
        marginal_source=tuple(ids),
    )


def feedstock_cost(curve: SupplyCurve, quantity_tpy: float) -> float:
    """Annual $ for a quantity: integral of marginal cost along the merit order
    (equivalently quantity times the cumulative average cost at that quantity)."""
    if quantity_tpy < 0:
        raise ConfigError("quantity must be non-negative")
    if quantity_tpy == 0:
        return 0.0
    if quantity_tpy > curve.extent_tpy * (1 + 1e-12):
        raise FeedstockShortfall(
            f"demand {quantity_tpy:.0f} t/yr exceeds the supply curve extent "
            f"{curve.extent_tpy:.0f} t/yr",
            deficit_tpy=quantity_tpy - curve.extent_tpy,
        )
    idx = int(np.searchsorted(curve.cum_qty_tpy, quantity_tpy, side="left"))
    idx = min(idx, curve.cum_qty_tpy.size - 1)
    prev_q = curve.cum_qty_tpy[idx - 1] if idx > 0 else 0.0
    prev_total = prev_q * curve.avg_cost_usd_per_t[idx - 1] if idx > 0 else 0.0
    return float(prev_total + curve.unit_cost_usd_per_t[idx] * (quantity_tpy - prev_q))


def average_cost(curve: SupplyCurve, quantity_tpy: float) -> float:
    if quantity_tpy <= 0:
        raise ConfigError("quantity must be positive")
    return feedstock_cost(curve, quantity_tpy) / quantity_tpy


def read_registry_csv(path) -> list[Co2Source]:
    df = pd.read_csv(path)
    required = ["id", "kind", "capacity_tpy", "concentration_pct", "distance_km"]
    for col in required:
        if col not in df.columns:
            raise ConfigError(f"{path}: missing column {col!r}")
    return [
        Co2Source(
            id=str(r.id),
            kind=str(r.kind),
            capacity_tpy=float(r.capacity_tpy),
            concentration_pct=float(r.concentration_pct),
            distance_km=float(r.distance_km),
        )
        for r in df.itertuples(index=False)
    ]
