import numpy as np
import pandas as pd
import pytest
from hypothesis import given, strategies as st

from synfuel import fuels
from synfuel.errors import ConfigError
from synfuel.fuels import (
    FuelAdjustment,
    fit_naphtha_ratio,
    gate_price_track,
    mean_track_check,
    naphtha_track,
    read_adjustments_csv,
    retail_to_gate,
)

# regional refinery-gate means, $/gal, 2022-2050 window
GATE_MEANS = {
    "West North Central - NE": {"naphtha": 0.75, "diesel": 1.83, "jet": 1.93},
    "West North Central - MN": {"naphtha": 1.08, "diesel": 1.80, "jet": 1.80},
    "West South Central": {"naphtha": 0.71, "diesel": 1.99, "jet": 2.00},
    "East North Central - OH": {"naphtha": 1.15, "diesel": 1.79, "jet": 1.88},
    "East North Central - IL": {"naphtha": 0.82, "diesel": 1.55, "jet": 1.85},
}
REGION_STATE = {
    "West North Central - NE": "NE",
    "West North Central - MN": "MN",
    "West South Central": "TX",
    "East North Central - OH": "OH",
    "East North Central - IL": "IL",
}


class TestRetailToGate:
    def test_texas_diesel(self):
        adj = FuelAdjustment(tax_usd_per_gal=0.444, md_pct_of_retail=0.202)
        assert retail_to_gate(3.000, "diesel", adj) == pytest.approx(1.950, abs=1e-9)

    def test_zero_factors_identity(self):
        assert retail_to_gate(2.5, "diesel", FuelAdjustment()) == 2.5

    def test_jet_uses_flat_line_items(self):
        adj = FuelAdjustment(
            tax_usd_per_gal=0.219, marketing_usd_per_gal=0.06, distribution_usd_per_gal=0.12
        )
        assert retail_to_gate(2.5, "jet", adj) == pytest.approx(2.5 - 0.219 - 0.06 - 0.12)

    def test_floor_at_zero(self):
        adj = FuelAdjustment(tax_usd_per_gal=5.0)
        assert retail_to_gate(1.0, "diesel", adj) == 0.0

    @given(st.floats(0.5, 8.0), st.floats(0.501, 8.0))
    def test_monotone_in_retail(self, a, b):
        adj = FuelAdjustment(tax_usd_per_gal=0.3, md_pct_of_retail=0.15)
        lo, hi = sorted((a, b))
        assert retail_to_gate(lo, "diesel", adj) <= retail_to_gate(hi, "diesel", adj)

    @given(st.floats(0.5, 8.0))
    def test_gate_below_retail_with_positive_factor(self, r):
        adj = FuelAdjustment(tax_usd_per_gal=0.01)
        assert retail_to_gate(r, "diesel", adj) < r


class TestNaphthaTrack:
    def test_unit_ratio_identity(self):
        g = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(naphtha_track(g, 1.0), g)

    def test_fitted_ratio_from_history(self, pack_dir):
        hist = pd.read_csv(pack_dir / "data" / "naphtha_gasoline_history.csv")
        ratio = fit_naphtha_ratio(hist)
        assert ratio == pytest.approx(0.85, abs=1e-9)

    def test_regression_oracle(self):
        rng = np.random.default_rng(3)
        gas = rng.uniform(1.5, 3.5, 40)
        true_ratio = 0.78
        naph = true_ratio * gas + rng.normal(0, 0.01, 40)
        hist = pd.DataFrame({"naphtha_usd_per_gal": naph, "gasoline_usd_per_gal": gas})
        want = float(gas @ naph) / float(gas @ gas)
        assert fit_naphtha_ratio(hist) == pytest.approx(want, rel=1e-12)
        assert fit_naphtha_ratio(hist) == pytest.approx(true_ratio, abs=0.01)


class TestPackGateTracks:
    @pytest.mark.parametrize("region", sorted(GATE_MEANS))
    def test_all_region_means(self, region, pack_dir):
        state = REGION_STATE[region]
        retail = pd.read_csv(pack_dir / "data" / f"retail_prices_{state}.csv")
        factors = read_adjustments_csv(pack_dir / "data" / "adjustments.csv")
        hist = pd.read_csv(pack_dir / "data" / "naphtha_gasoline_history.csv")
        track = gate_price_track(region, state, retail, factors, fit_naphtha_ratio(hist))
        for product, want in GATE_MEANS[region].items():
            got = mean_track_check(track.prices[product])
            assert got == pytest.approx(want, abs=0.03), (region, product)

    def test_constant_track_mean(self):
        assert mean_track_check(np.full(29, 1.79)) == pytest.approx(1.79)

    def test_year_slice_covers_project(self, braidwood):
        gate = braidwood.gate_prices_by_year()
        assert len(gate) == braidwood.fin.project_life_years
        assert set(gate[0]) == {"naphtha", "jet", "diesel"}

    def test_missing_year_raises(self, braidwood):
        with pytest.raises(ConfigError):
            braidwood.fuel_track.year_slice(2049, 10)
