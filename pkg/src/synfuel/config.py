"""Scenario configuration: schema validation, file loading, resolution.

A scenario file is a single JSON document naming the site, parameter
overrides and the data files (price history, CO2 registry, fuel forecasts,
adjustments). `resolve` validates the schema, loads every referenced file and
returns a fully materialized Scenario ready for the study engine.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import jsonschema
import pandas as pd

from . import co2 as co2mod
from . import fuels as fuelsmod
from . import plant, prices
from .errors import ConfigError
from .finance import FinancialParams
from .plant import SiteParams, TechnoParams
from .series import PriceSeries, read_price_csv

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["site", "files"],
    "properties": {
        "site": {
            "type": "object",
            "required": ["name", "npp_capacity_mwe", "state", "fuel_region"],
            "properties": {
                "name": {"type": "string"},
                "npp_capacity_mwe": {"type": "number", "exclusiveMinimum": 0},
                "market": {"type": "string"},
                "state": {"type": "string"},
                "fuel_region": {"type": "string"},
                "state_tax_rate": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "capacity_payment_usd_per_mw_yr": {"type": "number", "minimum": 0},
                "co2_bound_capacity_mwe": {"type": "number", "exclusiveMinimum": 0},
                "co2_bound_units": {"type": "integer", "minimum": 1},
            },
        },
        "techno": {"type": "object"},
        "finance": {"type": "object"},
        "files": {
            "type": "object",
            "required": [
                "price_history",
                "co2_registry",
                "retail_prices",
                "adjustments",
                "naphtha_gasoline_history",
            ],
            "properties": {k: {"type": "string"} for k in (
                "price_history",
                "co2_registry",
                "retail_prices",
                "adjustments",
                "naphtha_gasoline_history",
                "transport_reference",
                "price_model",
            )},
        },
        "co2": {
            "type": "object",
            "properties": {
                "capture_cost_table": {"type": "object"},
                "purity_threshold_pct": {"type": "number"},
                "transport": {"type": "object"},
                "calibrate_transport": {"type": "boolean"},
                "demand_bound_tpy": {"type": "number", "exclusiveMinimum": 0},
                "order_by": {"type": "string", "enum": ["unit_cost", "distance"]},
            },
        },
        "market": {"type": "object"},
        "pricegen": {"type": "object"},
        "study": {
            "type": "object",
            "properties": {
                "realizations": {"type": "integer", "minimum": 2},
                "base_seed": {"type": "integer", "minimum": 0},
                "points_per_axis": {"type": "integer", "minimum": 1},
                "initial_storage_frac": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
    },
}

DEFAULT_CAPTURE_COSTS = {
    # $/t; illustrative defaults, not source-derived — override per scenario
    "bioethanol": {"capture_usd_per_t": 35.0, "compression_usd_per_t": 12.0},
    "ammonia": {"capture_usd_per_t": 35.0, "compression_usd_per_t": 12.0},
    "natural_gas": {"capture_usd_per_t": 48.0, "compression_usd_per_t": 12.0},
    "coal": {"capture_usd_per_t": 52.0, "compression_usd_per_t": 12.0},
    "hydrogen": {"capture_usd_per_t": 45.0, "compression_usd_per_t": 12.0},
    "iron_steel": {"capture_usd_per_t": 55.0, "compression_usd_per_t": 12.0},
    "cement": {"capture_usd_per_t": 60.0, "compression_usd_per_t": 12.0},
}

DEFAULT_SENSITIVITY_SUITE = (
    {"parameter": "h2_ptc", "value": 0.0},
    {"parameter": "h2_ptc", "value": 1.0},
    {"parameter": "h2_ptc", "value": 2.7},
    {"parameter": "synfuel_prices", "value": 0.75},
    {"parameter": "synfuel_prices", "value": 1.25},
    {"parameter": "capex", "value": 0.75},
    {"parameter": "capex", "value": 1.25},
    {"parameter": "co2_adder", "value": 30.0},
    {"parameter": "co2_adder", "value": 60.0},
    {"parameter": "om", "value": 0.75},
    {"parameter": "om", "value": 1.25},
)


@dataclass(frozen=True)
class StudySettings:
    realizations: int = 20
    base_seed: int = 20220901
    points_per_axis: int = 10
    initial_storage_frac: float = 0.5
    sensitivity: tuple = DEFAULT_SENSITIVITY_SUITE


@dataclass
class Scenario:
    """Fully resolved inputs for one site."""

    site: SiteParams
    tech: TechnoParams
    fin: FinancialParams
    study: StudySettings
    price_history: PriceSeries
    price_model: prices.SyntheticPriceModel | None
    supply_curve: co2mod.SupplyCurve
    transport_params: co2mod.TransportParams
    fuel_track: fuelsmod.FuelPriceTrack
    naphtha_ratio: float
    start_year: int
    pricegen_settings: dict
    config_hash: str
    raw: dict = field(repr=False, default_factory=dict)

    def gate_prices_by_year(self) -> list[dict[str, float]]:
        return self.fuel_track.year_slice(self.start_year, self.fin.project_life_years)

    def ensure_model(self) -> prices.SyntheticPriceModel:
        if self.price_model is None:
            pg = self.pricegen_settings
            self.price_model = prices.fit_price_model(
                self.price_history,
                periods=pg.get("periods", prices.DEFAULT_PERIODS),
                k=pg.get("harmonics", prices.DEFAULT_HARMONICS),
                p=pg.get("p", prices.DEFAULT_P),
                q=pg.get("q", prices.DEFAULT_Q),
                site=self.site.name,
            )
        return self.price_model


def _dataclass_from_dict(cls, base, overrides: dict, label: str):
    if not overrides:
        return base
    valid = set(base.__dataclass_fields__)
    unknown = set(overrides) - valid
    if unknown:
        raise ConfigError(f"{label}: unknown fields {sorted(unknown)}")
    return replace(base, **overrides)


def config_digest(doc: dict, file_paths: list[Path]) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(doc, sort_keys=True).encode())
    for p in sorted(file_paths):
        h.update(p.name.encode())
        h.update(hashlib.sha256(p.read_bytes()).digest())
    return h.hexdigest()[:16]


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"{path}: schema violation at {list(exc.absolute_path)}: {exc.message}") from None
    return doc


def resolve(path) -> Scenario:
    path = Path(path)
    doc = load_config(path)
    base = path.parent

    def filepath(key: str, required: bool = True) -> Path | None:
        rel = doc["files"].get(key)
        if rel is None:
            if required:
                raise ConfigError(f"{path}: files.{key} is required")
            return None
        p = (base / rel).resolve()
        if not p.exists():
            raise ConfigError(f"{path}: referenced file does not exist: {p}")
        return p

    site_doc = dict(doc["site"])
    site = SiteParams(
        name=site_doc["name"],
        npp_capacity_mwe=float(site_doc["npp_capacity_mwe"]),
        market=site_doc.get("market", ""),
        state=site_doc["state"],
        fuel_region=site_doc["fuel_region"],
        state_tax_rate=float(site_doc.get("state_tax_rate", 0.0)),
        capacity_payment_usd_per_mw_yr=float(site_doc.get("capacity_payment_usd_per_mw_yr", 0.0)),
        co2_bound_capacity_mwe=site_doc.get("co2_bound_capacity_mwe"),
        co2_bound_units=int(site_doc.get("co2_bound_units", 1)),
    )
    tech = _dataclass_from_dict(TechnoParams, TechnoParams(), doc.get("techno", {}), "techno")
    fin_doc = dict(doc.get("finance", {}))
    fin_doc.setdefault("state_tax", site.state_tax_rate)
    fin = _dataclass_from_dict(FinancialParams, FinancialParams(), fin_doc, "finance")

    study_doc = dict(doc.get("study", {}))
    sens = tuple(study_doc.pop("sensitivity", DEFAULT_SENSITIVITY_SUITE))
    study = _dataclass_from_dict(StudySettings, StudySettings(), study_doc, "study")
    study = replace(study, sensitivity=sens)

    price_path = filepath("price_history")
    history = read_price_csv(price_path)

    model = None
    model_path = filepath("price_model", required=False)
    if model_path is not None:
        model = prices.load_model(model_path)

    co2_doc = dict(doc.get("co2", {}))
    cost_table = co2_doc.get("capture_cost_table", DEFAULT_CAPTURE_COSTS)
    purity = float(co2_doc.get("purity_threshold_pct", co2mod.PURITY_THRESHOLD_PCT_DEFAULT))
    registry = co2mod.read_registry_csv(filepath("co2_registry"))
    if "transport" in co2_doc:
        tdoc = co2_doc["transport"]
        transport = co2mod.TransportParams(
            a=float(tdoc["a"]), b=float(tdoc["b"]), c=float(tdoc["c"]), beta=float(tdoc["beta"])
        )
    else:
        ref_path = filepath("transport_reference", required=False)
        if ref_path is None:
            raise ConfigError(
                f"{path}: co2.transport parameters or files.transport_reference required"
            )
        transport = co2mod.calibrate_transport(pd.read_csv(ref_path))
    demand_bound = co2_doc.get("demand_bound_tpy")
    if demand_bound is None:
        demand_bound = plant.co2_upper_bound_tpy(site, tech)
    curve = co2mod.build_supply_curve(
        registry,
        float(demand_bound),
        cost_table,
        transport,
        purity_threshold_pct=purity,
        order_by=co2_doc.get("order_by", "unit_cost"),
    )

    retail = pd.read_csv(filepath("retail_prices"))
    adjustments = fuelsmod.read_adjustments_csv(filepath("adjustments"))
    history_df = pd.read_csv(filepath("naphtha_gasoline_history"))
    ratio = fuelsmod.fit_naphtha_ratio(history_df)
    track = fuelsmod.gate_price_track(site.fuel_region, site.state, retail, adjustments, ratio)

    market_doc = doc.get("market", {})
    start_year = int(market_doc.get("start_year", 2023))

    files = [p for p in (
        price_path,
        filepath("co2_registry"),
        filepath("retail_prices"),
        filepath("adjustments"),
        filepath("naphtha_gasoline_history"),
    ) if p is not None]

    return Scenario(
        site=site,
        tech=tech,
        fin=fin,
        study=study,
        price_history=history,
        price_model=model,
        supply_curve=curve,
        transport_params=transport,
        fuel_track=track,
        naphtha_ratio=ratio,
        start_year=start_year,
        pricegen_settings=doc.get("pricegen", {}),
        config_hash=config_digest(doc, files),
        raw=doc,
    )
