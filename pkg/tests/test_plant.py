import numpy as np
import pytest
from hypothesis import given, strategies as st

from synfuel import plant
from synfuel.errors import ConfigError, InfeasibleSite
from synfuel.plant import (
    IesConfiguration,
    SiteParams,
    TechnoParams,
    capacity_ranges,
    co2_demand_tpy,
    co2_upper_bound_tpy,
    effective_elec_spec,
    ft_outputs,
    htse_h2_rate,
)

TECH = TechnoParams()
# effective spec implied by the published capacity table (see pack configs)
TECH_TABLE = TechnoParams(htse_elec_spec_kwh_per_kg=37.683)


def site(name="x", npp=1194.0, **kw):
    return SiteParams(
        name=name, npp_capacity_mwe=npp, market="PJM", state="IL",
        fuel_region="East North Central - IL", state_tax_rate=0.095, **kw
    )


class TestEffectiveSpec:
    def test_defaults(self):
        assert effective_elec_spec(TECH) == pytest.approx(38.912, abs=1e-12)

    def test_zero_conversion_efficiency(self):
        t = TechnoParams(thermal_to_elec_eff=0.0)
        assert effective_elec_spec(t) == pytest.approx(36.8)

    def test_override_reproduces_published_rate(self):
        # 985.1 MWe <-> 24.8 t/h needs ~39.72 kWh/kg effective
        t = TechnoParams(htse_elec_spec_kwh_per_kg=39.72 - 6.4 * 0.33)
        assert effective_elec_spec(t) == pytest.approx(39.72, abs=1e-9)
        assert htse_h2_rate(985.1, t) == pytest.approx(24801, rel=1e-3)


class TestTransferFunctions:
    def test_zero_power(self):
        assert htse_h2_rate(0.0, TECH) == 0.0

    def test_one_mwe(self):
        assert htse_h2_rate(1.0, TECH) == pytest.approx(25.699, abs=1e-3)

    def test_negative_power_rejected(self):
        with pytest.raises(ConfigError):
            htse_h2_rate(-1.0, TECH)

    def test_ft_yields_per_kg(self):
        assert ft_outputs(1.0, TECH) == {"naphtha": 0.69, "jet": 0.84, "diesel": 0.46}

    def test_ft_zero(self):
        assert ft_outputs(0.0, TECH) == {"naphtha": 0.0, "jet": 0.0, "diesel": 0.0}

    def test_ft_reference_plant(self):
        out = ft_outputs(10_625.0, TECH)
        assert out["naphtha"] == pytest.approx(7331.25)
        assert out["jet"] == pytest.approx(8925.0)
        assert out["diesel"] == pytest.approx(4887.5)

    def test_co2_demand_zero(self):
        assert co2_demand_tpy(0.0, TECH) == 0.0

    def test_co2_demand_cooper_scale(self):
        # 19.0 t/h against the 1.0 MMT/yr station bound
        demand = co2_demand_tpy(19_000.0, TECH)
        assert demand == pytest.approx(1_031_616.0)
        assert abs(demand - 1_000_000.0) / 1_000_000.0 < 0.05

    def test_co2_demand_linear(self):
        assert co2_demand_tpy(8_000.0, TECH) == pytest.approx(2 * co2_demand_tpy(4_000.0, TECH))

    @given(st.floats(0.001, 1e5), st.floats(0.01, 100.0))
    def test_homogeneity(self, power, lam):
        assert htse_h2_rate(power * lam, TECH) == pytest.approx(
            lam * htse_h2_rate(power, TECH), rel=1e-12
        )


# published capacity windows: (npp MWe) -> HTSE (lo, hi) MWe, FT (lo, hi) t/h,
# storage (lo, hi) t; checked at the table-implied effective spec
RANGE_CELLS = {
    1194.0: ((85.1, 985.1), (2.14, 24.8), (0.0, 594.1)),
    769.0: ((85.1, 754.1), (2.14, 19.0), (0.0, 454.8)),
    894.0: ((85.1, 879.1), (2.14, 22.1), (0.0, 530.2)),
    522.0: ((85.1, 507.1), (2.14, 12.7), (0.0, 305.8)),
    1280.0: ((85.1, 985.1), (2.14, 24.8), (0.0, 594.1)),
}


class TestCapacityRanges:
    @pytest.mark.parametrize("npp", sorted(RANGE_CELLS))
    def test_reference_cells(self, npp):
        (h_lo, h_hi), (f_lo, f_hi), (s_lo, s_hi) = RANGE_CELLS[npp]
        r = capacity_ranges(site(npp=npp), TECH_TABLE)
        assert r.htse_mwe.lo == pytest.approx(h_lo, abs=0.1)
        assert r.htse_mwe.hi == pytest.approx(h_hi, abs=0.1)
        assert r.ft_kg_h.lo / 1000 == pytest.approx(f_lo, abs=0.1)
        assert r.ft_kg_h.hi / 1000 == pytest.approx(f_hi, abs=0.1)
        assert r.storage_kg.lo / 1000 == pytest.approx(s_lo, abs=0.1)
        assert r.storage_kg.hi / 1000 == pytest.approx(s_hi, abs=0.1)

    def test_points_are_equidistant(self):
        r = capacity_ranges(site(), TECH_TABLE)
        pts = r.htse_mwe.points(10)
        assert len(pts) == 10
        assert np.allclose(np.diff(pts), pts[1] - pts[0])

    def test_minimum_size_site_rejected(self):
        with pytest.raises(InfeasibleSite):
            capacity_ranges(site(npp=100.0), TECH_TABLE)


class TestCo2UpperBound:
    # station-level capacities and published demand bounds (t/yr)
    CASES = {
        "braidwood": (2354.0, 2, 2_900_000.0),
        "cooper": (769.0, 1, 1_000_000.0),
        "davis_besse": (894.0, 1, 1_100_000.0),
        "prairie_island": (1041.0, 2, 1_300_000.0),
        "south_texas": (1280.0, 1, 1_700_000.0),
    }

    @pytest.mark.parametrize("name", sorted(CASES))
    def test_within_ten_percent(self, name):
        cap, units, bound = self.CASES[name]
        s = site(name=name, npp=cap, co2_bound_capacity_mwe=cap, co2_bound_units=units)
        estimate = co2_upper_bound_tpy(s, TECH_TABLE)
        assert abs(estimate - bound) / bound < 0.10


class TestConfigurationValidation:
    def test_oversized_htse(self):
        cfg = IesConfiguration(1300.0, 1000.0, 0.0)
        with pytest.raises(ConfigError):
            cfg.validate(site(npp=1194.0), TECH)

    def test_ft_beyond_max_rate(self):
        cfg = IesConfiguration(100.0, htse_h2_rate(100.0, TECH) * 1.2, 0.0)
        with pytest.raises(ConfigError):
            cfg.validate(site(), TECH)

    def test_ft_exactly_at_max_rate_ok(self):
        cfg = IesConfiguration(100.0, htse_h2_rate(100.0, TECH), 0.0)
        cfg.validate(site(), TECH)

    def test_zero_storage_allowed(self):
        IesConfiguration(100.0, 1000.0, 0.0).validate(site(), TECH)

    def test_negative_rejected(self):
        with pytest.raises(ConfigError):
            IesConfiguration(-1.0, 0.0, 0.0).validate(site(), TECH)
