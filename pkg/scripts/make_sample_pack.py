#!/usr/bin/env python3
"""Generate the bundled five-site sample scenario pack (packs/sample).

All data here is synthetic sample data shaped to resemble the public
characteristics of five U.S. nuclear sites (capacities, market regions,
state fuel taxes) so the full pipeline can run end to end out of the box.
Regenerating is deterministic: python scripts/make_sample_pack.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import optimize, signal, stats

ROOT = Path(__file__).resolve().parent.parent
PACK = ROOT / "packs" / "sample"
DATA = PACK / "data"

HOURS_HIST = 3 * 8760

# effective electrolyzer spec implied by the published capacity table
# (37.683 + 6.4 * 0.33 = 39.795 kWh-e/kg)
HTSE_SPEC_OVERRIDE = 37.683

SITES = {
    "braidwood": dict(
        npp=1194.0, market="PJM", state="IL", region="East North Central - IL",
        tax=0.095, cap_rate=40_000.0, co2_cap=2354.0, co2_units=2,
        co2_bound=2_900_000.0,
    ),
    "cooper": dict(
        npp=769.0, market="SPP", state="NE", region="West North Central - NE",
        tax=0.0584, cap_rate=40_000.0, co2_cap=769.0, co2_units=1,
        co2_bound=1_000_000.0,
    ),
    "davis_besse": dict(
        npp=894.0, market="PJM", state="OH", region="East North Central - OH",
        tax=0.0, cap_rate=40_000.0, co2_cap=894.0, co2_units=1,
        co2_bound=1_100_000.0,
    ),
    "prairie_island": dict(
        npp=522.0, market="MISO", state="MN", region="West North Central - MN",
        tax=0.098, cap_rate=80_000.0, co2_cap=1041.0, co2_units=2,
        co2_bound=1_300_000.0,
    ),
    "south_texas": dict(
        npp=1280.0, market="ERCOT", state="TX", region="West South Central",
        tax=0.0, cap_rate=40_000.0, co2_cap=1280.0, co2_units=1,
        co2_bound=1_700_000.0,
    ),
}

# regional refinery-gate price targets, $/gal (naphtha, diesel, jet)
GATE_TARGETS = {
    "West North Central - NE": dict(naphtha=0.75, diesel=1.83, jet=1.93),
    "West North Central - MN": dict(naphtha=1.08, diesel=1.80, jet=1.80),
    "West South Central": dict(naphtha=0.71, diesel=1.99, jet=2.00),
    "East North Central - OH": dict(naphtha=1.15, diesel=1.79, jet=1.88),
    "East North Central - IL": dict(naphtha=0.82, diesel=1.55, jet=1.85),
}

# state+federal fuel taxes and downstream adjustment factors per state
ADJUSTMENTS = {
    # state: fuel: (tax, md_pct, marketing, distribution)
    "IL": {
        "diesel": (0.952, 0.202, 0.0, 0.0),
        "jet": (0.219, 0.0, 0.06, 0.12),
        "gasoline": (0.817, 0.156, 0.0, 0.0),
        "naphtha": (0.136, 0.0, 0.06, 0.36),
    },
    "MN": {
        "diesel": (0.530, 0.202, 0.0, 0.0),
        "jet": (0.369, 0.0, 0.06, 0.12),
        "gasoline": (0.470, 0.156, 0.0, 0.0),
        "naphtha": (0.136, 0.0, 0.06, 0.03),
    },
    "OH": {
        "diesel": (0.714, 0.202, 0.0, 0.0),
        "jet": (0.219, 0.0, 0.06, 0.12),
        "gasoline": (0.569, 0.156, 0.0, 0.0),
        "naphtha": (0.136, 0.0, 0.06, 0.03),
    },
    "TX": {
        "diesel": (0.444, 0.202, 0.0, 0.0),
        "jet": (0.219, 0.0, 0.06, 0.12),
        "gasoline": (0.384, 0.156, 0.0, 0.0),
        "naphtha": (0.136, 0.0, 0.06, 0.03),
    },
    "NE": {
        "diesel": (0.495, 0.202, 0.0, 0.0),
        "jet": (0.249, 0.0, 0.06, 0.12),
        "gasoline": (0.441, 0.156, 0.0, 0.0),
        "naphtha": (0.136, 0.0, 0.06, 0.03),
    },
}

STATE_OF_REGION = {
    "West North Central - NE": "NE",
    "West North Central - MN": "MN",
    "West South Central": "TX",
    "East North Central - OH": "OH",
    "East North Central - IL": "IL",
}

# pipeline-cost surface used to produce the transport reference points
TRANSPORT_TRUE = dict(a=6.0, b=0.004, c=2.0, beta=0.35)

CAPTURE_TABLE = {
    "bioethanol": {"capture_usd_per_t": 35.0, "compression_usd_per_t": 12.0},
    "ammonia": {"capture_usd_per_t": 35.0, "compression_usd_per_t": 12.0},
    "natural_gas": {"capture_usd_per_t": 48.0, "compression_usd_per_t": 12.0},
    "coal": {"capture_usd_per_t": 52.0, "compression_usd_per_t": 12.0},
    "hydrogen": {"capture_usd_per_t": 45.0, "compression_usd_per_t": 12.0},
    "iron_steel": {"capture_usd_per_t": 55.0, "compression_usd_per_t": 12.0},
    "cement": {"capture_usd_per_t": 60.0, "compression_usd_per_t": 12.0},
}

CONC = dict(
    bioethanol=99.8, ammonia=97.1, natural_gas=99.0, coal=13.5,
    hydrogen=44.5, iron_steel=24.8, cement=22.4,
)

# id, kind, capacity t/yr, distance km
REGISTRIES = {
    "braidwood": [
        ("il_eth_1", "bioethanol", 620_000, 70),
        ("il_eth_2", "bioethanol", 540_000, 110),
        ("il_eth_3", "bioethanol", 450_000, 160),
        ("il_amm_1", "ammonia", 420_000, 130),
        ("il_ng_1", "natural_gas", 380_000, 90),
        ("il_amm_2", "ammonia", 350_000, 240),
        ("il_h2_1", "hydrogen", 320_000, 150),
        ("il_cem_1", "cement", 520_000, 85),
        ("il_stl_1", "iron_steel", 430_000, 210),
        ("il_eth_4", "bioethanol", 400_000, 260),
    ],
    "cooper": [
        ("ne_eth_1", "bioethanol", 300_000, 160),
        ("ne_eth_2", "bioethanol", 260_000, 240),
        ("ne_amm_1", "ammonia", 250_000, 310),
        ("ne_h2_1", "hydrogen", 210_000, 360),
        ("ne_cem_1", "cement", 310_000, 290),
    ],
    "davis_besse": [
        ("oh_eth_1", "bioethanol", 320_000, 190),
        ("oh_ng_1", "natural_gas", 280_000, 260),
        ("oh_amm_1", "ammonia", 260_000, 330),
        ("oh_stl_1", "iron_steel", 330_000, 250),
        ("oh_cem_1", "cement", 340_000, 310),
    ],
    "prairie_island": [
        ("mn_eth_1", "bioethanol", 280_000, 720),
        ("mn_amm_1", "ammonia", 300_000, 800),
        ("mn_h2_1", "hydrogen", 260_000, 650),
        ("mn_cem_1", "cement", 420_000, 700),
        ("mn_stl_1", "iron_steel", 320_000, 760),
    ],
    "south_texas": [
        ("tx_ng_1", "natural_gas", 430_000, 210),
        ("tx_h2_1", "hydrogen", 390_000, 260),
        ("tx_amm_1", "ammonia", 360_000, 320),
        ("tx_cem_1", "cement", 420_000, 300),
        ("tx_stl_1", "iron_steel", 380_000, 360),
    ],
}

# hourly trend amplitudes (year, year-2nd, week, day, day-2nd) and phases
TRENDS = {
    "braidwood": (1.5, 0.55, 0.6, 1.35, 0.42),
    "cooper": (1.65, 0.6, 0.66, 1.5, 0.45),
    "davis_besse": (1.4, 0.5, 0.63, 1.26, 0.4),
    "prairie_island": (0.3, 0.1, 0.15, 0.24, 0.07),
    "south_texas": (2.1, 0.75, 0.8, 1.95, 0.6),
}

STUDY_SEEDS = {
    "braidwood": 71101,
    "cooper": 71102,
    "davis_besse": 71109,
    "prairie_island": 71104,
    "south_texas": 71113,
}

PRICE_SEEDS = {
    "braidwood": 101,
    "cooper": 102,
    "davis_besse": 103,
    "prairie_island": 104,
    "south_texas": 105,
}


def _beta_for_skew_kurt(skew_t: float, kurt_t: float) -> tuple[float, float]:
    def f(x):
        a, b = np.exp(x)
        _, _, s, k = stats.beta.stats(a, b, moments="mvsk")
        return [s - skew_t, k - kurt_t]

    sol = optimize.fsolve(f, x0=np.log([1.0, 5.0]), full_output=False)
    a, b = np.exp(sol)
    return float(a), float(b)


def marginal_quantile(site: str):
    """Target residual marginal distribution (standardized later)."""
    if site == "braidwood":
        return stats.gamma(1.8)
    if site == "davis_besse":
        return stats.gamma(1.6)
    if site == "cooper":
        return stats.gamma(1.7)
    if site == "prairie_island":
        a, b = _beta_for_skew_kurt(1.3, 1.2)
        return stats.beta(a, b)
    if site == "south_texas":
        return stats.johnsonsu(-1.1, 3.0)
    raise KeyError(site)


PRICE_TARGETS = {
    # mean, std
    "braidwood": (33.0, 23.1),
    "cooper": (25.8, 8.0),
    "davis_besse": (33.0, 10.0),
    "prairie_island": (9.4, 15.1),
    "south_texas": (41.2, 14.0),
}


def make_prices(site: str) -> pd.DataFrame:
    rng = np.random.default_rng(PRICE_SEEDS[site])
    n = HOURS_HIST
    t = np.arange(n)
    a_y, a_y2, a_w, a_d, a_d2 = TRENDS[site]
    trend = (
        a_y * np.sin(2 * np.pi * t / 8760 + 0.3)
        + a_y2 * np.cos(2 * np.pi * 2 * t / 8760 + 1.1)
        + a_w * np.sin(2 * np.pi * t / 168 + 0.8)
        + a_d * np.sin(2 * np.pi * t / 24 + 4.1)
        + a_d2 * np.cos(2 * np.pi * 2 * t / 24 + 2.0)
    )
    eps = rng.standard_normal(n + 800)
    g = signal.lfilter([1.0, 0.2], [1.0, -0.55, -0.02], eps)[800:]
    g = (g - g.mean()) / g.std()
    dist = marginal_quantile(site)
    # clip the copula tails so the marginal support is bounded and extreme
    # order statistics are densely populated (reproducible min/max)
    u = stats.norm.cdf(np.clip(g, -2.9, 2.9))
    resid = dist.ppf(u)
    resid = (resid - resid.mean()) / resid.std()
    mean_t, std_t = PRICE_TARGETS[site]
    raw = trend + resid * max(1e-9, np.sqrt(max(std_t**2 - trend.var(), 0.25 * std_t**2)))
    vals = (raw - raw.mean()) / raw.std() * std_t + mean_t
    ts = pd.date_range("2019-01-01", periods=n, freq="h")
    return pd.DataFrame(
        {"timestamp": ts.strftime("%Y-%m-%dT%H:%M:%S"), "price_usd_per_mwh": vals}
    )


def make_retail() -> dict[str, pd.DataFrame]:
    years = np.arange(2022, 2051)
    zig = np.where(years % 2 == 0, 1.01, 0.99)
    # the naphtha/gasoline ratio the engine will fit from the history file
    ratio = 0.85
    out = {}
    for region, targets in GATE_TARGETS.items():
        state = STATE_OF_REGION[region]
        rows = []
        for fuel in ("diesel", "jet", "gasoline"):
            if fuel == "gasoline":
                gate_mean = targets["naphtha"] / ratio
            else:
                gate_mean = targets[fuel]
            tax, pct, mkt, dist = ADJUSTMENTS[state][fuel]
            for y, z in zip(years, zig):
                gate = gate_mean * z
                retail = (gate + tax + mkt + dist) / (1.0 - pct)
                rows.append({"year": int(y), "fuel": fuel, "usd_per_gal": round(retail, 6)})
        out[region] = pd.DataFrame(rows)
    return out


def make_naphtha_history() -> pd.DataFrame:
    years = np.arange(2010, 2022)
    gas = 2.0 + 0.35 * np.sin(np.arange(len(years)) * 1.3) + 0.05 * np.arange(len(years))
    naph = 0.85 * gas  # exact through-origin ratio
    return pd.DataFrame(
        {
            "year": years,
            "naphtha_usd_per_gal": np.round(naph, 6),
            "gasoline_usd_per_gal": np.round(gas, 6),
        }
    )


def make_adjustments() -> pd.DataFrame:
    rows = []
    for state, fuels_ in ADJUSTMENTS.items():
        for fuel, (tax, pct, mkt, dist) in fuels_.items():
            rows.append(
                {
                    "state": state,
                    "fuel": fuel,
                    "tax_usd_per_gal": tax,
                    "md_pct": pct,
                    "marketing_usd_per_gal": mkt,
                    "distribution_usd_per_gal": dist,
                }
            )
    return pd.DataFrame(rows)


def transport_true(L, Q):
    p = TRANSPORT_TRUE
    return p["a"] * L * Q ** (-p["beta"]) + p["b"] * L + p["c"]


def make_transport_reference() -> pd.DataFrame:
    rows = []
    rng = np.random.default_rng(4242)
    for L in (50, 100, 200, 350, 500, 700, 900):
        for Q in (50_000, 150_000, 300_000, 600_000, 1_000_000):
            cost = transport_true(L, Q) * (1.0 + rng.uniform(-0.02, 0.02))
            rows.append({"distance_km": L, "flow_tpy": Q, "cost_usd_per_t": round(cost, 4)})
    return pd.DataFrame(rows)


def make_registry(site: str) -> pd.DataFrame:
    rows = []
    for sid, kind, cap, dist in REGISTRIES[site]:
        rows.append(
            {
                "id": sid,
                "kind": kind,
                "capacity_tpy": cap,
                "concentration_pct": CONC[kind],
                "distance_km": dist,
            }
        )
    return pd.DataFrame(rows)


def make_config(site: str) -> dict:
    s = SITES[site]
    return {
        "site": {
            "name": site,
            "npp_capacity_mwe": s["npp"],
            "market": s["market"],
            "state": s["state"],
            "fuel_region": s["region"],
            "state_tax_rate": s["tax"],
            "capacity_payment_usd_per_mw_yr": s["cap_rate"],
            "co2_bound_capacity_mwe": s["co2_cap"],
            "co2_bound_units": s["co2_units"],
        },
        "techno": {"htse_elec_spec_kwh_per_kg": HTSE_SPEC_OVERRIDE},
        "finance": {},
        "files": {
            "price_history": f"data/prices_{site}.csv",
            "co2_registry": f"data/co2_registry_{site}.csv",
            "retail_prices": f"data/retail_prices_{STATE_OF_REGION[s['region']]}.csv",
            "adjustments": "data/adjustments.csv",
            "naphtha_gasoline_history": "data/naphtha_gasoline_history.csv",
            "transport_reference": "data/transport_reference.csv",
        },
        "co2": {
            "capture_cost_table": CAPTURE_TABLE,
            "purity_threshold_pct": 95.0,
            "demand_bound_tpy": s["co2_bound"],
        },
        "market": {"start_year": 2023},
        "pricegen": {"periods": [8760, 168, 24], "harmonics": 3, "p": 3, "q": 1},
        "study": {
            "realizations": 20,
            "base_seed": STUDY_SEEDS[site],
            "points_per_axis": 10,
            "initial_storage_frac": 0.5,
        },
    }


def main() -> int:
    DATA.mkdir(parents=True, exist_ok=True)
    for site in SITES:
        make_prices(site).to_csv(DATA / f"prices_{site}.csv", index=False, float_format="%.6f")
        make_registry(site).to_csv(DATA / f"co2_registry_{site}.csv", index=False)
    for region, df in make_retail().items():
        df.to_csv(DATA / f"retail_prices_{STATE_OF_REGION[region]}.csv", index=False)
    make_adjustments().to_csv(DATA / "adjustments.csv", index=False)
    make_naphtha_history().to_csv(DATA / "naphtha_gasoline_history.csv", index=False)
    make_transport_reference().to_csv(DATA / "transport_reference.csv", index=False)
    index = {"schema": "synfuel.pack.v1", "sites": {}}
    for site in SITES:
        cfg = make_config(site)
        (PACK / f"{site}.json").write_text(json.dumps(cfg, indent=2) + "\n")
        index["sites"][site] = f"{site}.json"
    (PACK / "pack.json").write_text(json.dumps(index, indent=2) + "\n")
    print(f"pack written to {PACK}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
