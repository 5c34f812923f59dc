"""Plant component transfer functions, cost parameters and capacity ranges.

All transfer functions are linear and pass through the origin; the electrolyzer
heat draw is charged as foregone electricity at the steam-cycle conversion
efficiency, so a single effective kWh-e/kg figure drives every conversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, InfeasibleSite

LITERS_PER_GALLON = 3.78541

# minimum total power requirement of the fuel train (MWe) and the upper
# modelling bound used to cap the electrolyzer axis
TRAIN_MIN_MWE = 100.0
TRAIN_MAX_MWE = 1000.0

SWEEP_POINTS_DEFAULT = 10
STORAGE_HOURS_OF_FT_MAX = 24.0


@dataclass(frozen=True)
class SiteParams:
    """Fixed characteristics of a host nuclear plant."""

    name: str
    npp_capacity_mwe: float
    market: str
    state: str
    fuel_region: str
    state_tax_rate: float
    capacity_payment_usd_per_mw_yr: float = 0.0
    # capacity used for the CO2 demand upper bound (multi-unit stations may
    # differ from the dispatched unit) and the number of units behind it
    co2_bound_capacity_mwe: float | None = None
    co2_bound_units: int = 1

    def __post_init__(self):
        if self.npp_capacity_mwe <= 0:
            raise ConfigError(f"{self.name}: npp capacity must be positive")
        if not 0.0 <= self.state_tax_rate < 1.0:
            raise ConfigError(f"{self.name}: state tax rate out of range")


@dataclass(frozen=True)
class TechnoParams:
    """Technology performance and cost parameters for the fuel train."""

    htse_elec_spec_kwh_per_kg: float = 36.8
    htse_thermal_spec_kwh_per_kg: float = 6.4
    thermal_to_elec_eff: float = 0.33
    htse_capex_usd_per_kw: float = 703.0
    htse_fixed_om_usd_per_mw_yr: float = 32_600.0
    htse_var_om_usd_per_mwh: float = 3.4
    ft_elec_demand_mwe: float = 14.9
    ft_yield_naphtha: float = 0.69
    ft_yield_jet: float = 0.84
    ft_yield_diesel: float = 0.46
    ft_ref_capacity_kg_h: float = 10_625.0
    ft_ref_capex_usd: float = 158_102_945.0
    ft_ref_fixed_om_usd_yr: float = 7_640_007.0
    ft_ref_var_om_usd_yr: float = 21_732_221.0
    ft_scaling_exponent: float = 1.0
    storage_capex_usd_per_kg: float = 500.0
    co2_per_h2_kg: float = 6.20
    density_naphtha_kg_l: float = 0.745
    density_jet_kg_l: float = 0.80
    density_diesel_kg_l: float = 0.84
    h2_ptc_usd_per_kg: float = 3.0

    def __post_init__(self):
        for name in (
            "htse_elec_spec_kwh_per_kg",
            "htse_thermal_spec_kwh_per_kg",
            "htse_capex_usd_per_kw",
            "ft_elec_demand_mwe",
            "ft_ref_capacity_kg_h",
            "ft_ref_capex_usd",
            "storage_capex_usd_per_kg",
            "co2_per_h2_kg",
            "density_naphtha_kg_l",
            "density_jet_kg_l",
            "density_diesel_kg_l",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"techno parameter {name} must be positive")

    @property
    def yields(self) -> dict[str, float]:
        return {
            "naphtha": self.ft_yield_naphtha,
            "jet": self.ft_yield_jet,
            "diesel": self.ft_yield_diesel,
        }

    @property
    def densities_kg_l(self) -> dict[str, float]:
        return {
            "naphtha": self.density_naphtha_kg_l,
            "jet": self.density_jet_kg_l,
            "diesel": self.density_diesel_kg_l,
        }

    def gallons_per_kg_h2(self) -> dict[str, float]:
        """Product gallons obtained per kg of hydrogen through the fuel train."""
        return {
            prod: y / (self.densities_kg_l[prod] * LITERS_PER_GALLON)
            for prod, y in self.yields.items()
        }


FT_CAPACITY_RTOL = 1e-9  # slack for grid points constructed to sit exactly on the max


@dataclass(frozen=True)
class IesConfiguration:
    """The three decision capacities."""

    htse_capacity_mwe: float
    ft_capacity_kg_h: float
    storage_capacity_kg: float

    def validate(self, site: SiteParams, tech: TechnoParams) -> None:
        if min(self.htse_capacity_mwe, self.ft_capacity_kg_h, self.storage_capacity_kg) < 0:
            raise ConfigError("capacities must be non-negative")
        ft_aux = tech.ft_elec_demand_mwe if self.ft_capacity_kg_h > 0 else 0.0
        if self.htse_capacity_mwe + ft_aux > site.npp_capacity_mwe * (1 + 1e-9):
            raise ConfigError(
                f"{site.name}: HTSE {self.htse_capacity_mwe:.1f} MWe plus FT auxiliary load "
                f"exceeds plant capacity {site.npp_capacity_mwe:.1f} MWe"
            )
        max_rate = htse_h2_rate(self.htse_capacity_mwe, tech)
        if self.ft_capacity_kg_h > max_rate * (1 + FT_CAPACITY_RTOL) + 1e-9:
            raise ConfigError(
                f"FT capacity {self.ft_capacity_kg_h:.1f} kg/h exceeds the HTSE maximum "
                f"hydrogen rate {max_rate:.1f} kg/h"
            )


def effective_elec_spec(tech: TechnoParams) -> float:
    """Effective electricity requirement in kWh-e per kg-H2.

    Heat drawn from the steam cycle is priced as the electricity it would have
    produced, hence the multiplication by the conversion efficiency.
    """
    return tech.htse_elec_spec_kwh_per_kg + tech.htse_thermal_spec_kwh_per_kg * tech.thermal_to_elec_eff


def htse_h2_rate(power_mwe: float, tech: TechnoParams) -> float:
    """Hydrogen output in kg/h for a given electric power draw."""
    if power_mwe < 0:
        raise ConfigError("power must be non-negative")
    return power_mwe * 1000.0 / effective_elec_spec(tech)


def htse_power_for_rate(h2_kg_h: float, tech: TechnoParams) -> float:
    """Electric power in MWe needed for a hydrogen rate (inverse of htse_h2_rate)."""
    return h2_kg_h * effective_elec_spec(tech) / 1000.0


def ft_outputs(h2_in_kg_h: float, tech: TechnoParams) -> dict[str, float]:
    """Product mass flows (kg/h) for a hydrogen inflow."""
    if h2_in_kg_h < 0:
        raise ConfigError("hydrogen inflow must be non-negative")
    return {prod: h2_in_kg_h * y for prod, y in tech.yields.items()}


def co2_demand_tpy(h2_in_kg_h: float, tech: TechnoParams) -> float:
    """Annual CO2 feedstock demand in t/yr for a steady hydrogen inflow."""
    if h2_in_kg_h < 0:
        raise ConfigError("hydrogen inflow must be non-negative")
    return h2_in_kg_h * tech.co2_per_h2_kg * 8760.0 / 1000.0


@dataclass(frozen=True)
class AxisRange:
    lo: float
    hi: float

    def points(self, n: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, n)


@dataclass(frozen=True)
class CapacityRanges:
    htse_mwe: AxisRange
    ft_kg_h: AxisRange
    storage_kg: AxisRange


def capacity_ranges(site: SiteParams, tech: TechnoParams) -> CapacityRanges:
    """Sweepable capacity ranges for the three decision variables.

    The electrolyzer axis spans the 100..1000 MWe total-train window less the
    FT auxiliary load, capped by the plant size; the FT axis is the same window
    converted to hydrogen rate; storage spans zero to a day of FT-max draw.
    """
    htse_lo = TRAIN_MIN_MWE - tech.ft_elec_demand_mwe
    htse_hi = min(TRAIN_MAX_MWE, site.npp_capacity_mwe) - tech.ft_elec_demand_mwe
    if htse_hi <= htse_lo:
        # a site at (or below) the minimum train size has no range to sweep
        raise InfeasibleSite(
            f"{site.name}: plant capacity {site.npp_capacity_mwe:.1f} MWe does not clear the "
            f"{TRAIN_MIN_MWE:.0f} MWe minimum total power requirement"
        )
    ft_lo = htse_h2_rate(htse_lo, tech)
    ft_hi = htse_h2_rate(htse_hi, tech)
    return CapacityRanges(
        htse_mwe=AxisRange(htse_lo, htse_hi),
        ft_kg_h=AxisRange(ft_lo, ft_hi),
        storage_kg=AxisRange(0.0, STORAGE_HOURS_OF_FT_MAX * ft_hi),
    )


def co2_upper_bound_tpy(site: SiteParams, tech: TechnoParams) -> float:
    """Upper bound on annual CO2 demand from the station's full capacity.

    Uses the station-level capacity (all units) less one FT auxiliary load per
    unit, converted through the hydrogen spec and the CO2/H2 mass ratio.
    """
    cap = site.co2_bound_capacity_mwe or site.npp_capacity_mwe
    power = cap - tech.ft_elec_demand_mwe * site.co2_bound_units
    if power <= 0:
        raise InfeasibleSite(f"{site.name}: no usable capacity for the CO2 bound")
    return co2_demand_tpy(htse_h2_rate(power, tech), tech)


def with_overrides(tech: TechnoParams, **kwargs) -> TechnoParams:
    return replace(tech, **kwargs)
