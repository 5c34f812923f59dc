"""Synthetic electricity price models: Fourier trend + ARMA residual.

Training pipeline: least-squares Fourier detrend, empirical-quantile
gaussianization of the residual, then ARMA estimation (Hannan-Rissanen start,
conditional-sum-of-squares refinement). Generation runs the ARMA recursion in
normal space, maps back through the quantile transform and adds the trend;
output is bit-reproducible per (model, hours, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import optimize, signal, stats

from .errors import ConfigError, FitError
from .series import PriceSeries

MODEL_SCHEMA = "pricegen.model.v1"

DEFAULT_PERIODS = (8760.0, 168.0, 24.0)
DEFAULT_HARMONICS = 3
DEFAULT_P = 3
DEFAULT_Q = 1

_STATIONARITY_MARGIN = 1e-9
_GENERATE_BURN_IN = 512


# ---------------------------------------------------------------------------
# Fourier trend


@dataclass(frozen=True)
class FourierModel:
    """Harmonic trend: intercept + sum of a*sin + b*cos per (period, harmonic)."""

    periods: tuple[float, ...]
    harmonics: int
    intercept: float
    # coefficient rows align with _design column order (sin, cos per harmonic)
    coef: np.ndarray

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        X = _design(t, self.periods, self.harmonics)
        return self.intercept + X @ self.coef


def _design(t: np.ndarray, periods, k: int) -> np.ndarray:
    cols = []
    for c in periods:
        for i in range(1, k + 1):
            w = 2.0 * np.pi * i / c
            cols.append(np.sin(w * t))
            cols.append(np.cos(w * t))
    return np.column_stack(cols) if cols else np.zeros((t.size, 0))


def fit_fourier(series, periods=DEFAULT_PERIODS, k: int = DEFAULT_HARMONICS) -> FourierModel:
    """Least-squares harmonic fit; duplicate or aliased periods raise FitError."""
    prices = series.prices if isinstance(series, PriceSeries) else np.asarray(series, dtype=np.float64)
    periods = tuple(float(c) for c in periods)
    if any(c <= 0 for c in periods):
        raise ConfigError("periods must be positive")
    if len(set(periods)) != len(periods):
        raise FitError(f"duplicate periods in {periods}")
    n = prices.size
    if n < 2 * k * max(1, len(periods)):
        raise FitError("series too short for the requested harmonic count")

    t = np.arange(n, dtype=np.float64)
    X = _design(t, periods, k)
    Xfull = np.column_stack([np.ones(n), X])
    coef, _, rank, _ = np.linalg.lstsq(Xfull, prices, rcond=None)
    if rank < Xfull.shape[1]:
        raise FitError(
            "rank-deficient harmonic design (aliased periods "
            f"{periods} at k={k}); drop or merge the aliased frequencies"
        )
    return FourierModel(periods=periods, harmonics=k, intercept=float(coef[0]), coef=coef[1:])


# ---------------------------------------------------------------------------
# Gaussianization


@dataclass(frozen=True)
class Gaussianizer:
    """Monotone empirical quantile map between data space and standard-normal
    space, with exponential tail extrapolation beyond the training range."""

    x_nodes: np.ndarray
    z_nodes: np.ndarray
    tail_scale_left: float
    tail_scale_right: float

    @classmethod
    def fit(cls, values: np.ndarray) -> "Gaussianizer":
        v = np.sort(np.asarray(values, dtype=np.float64))
        n = v.size
        if n < 10:
            raise FitError("too few samples to gaussianize")
        xg, start_counts = np.unique(v, return_index=True)
        # midrank plotting position per tied group
        ends = np.append(start_counts[1:], n)
        mid = (start_counts + ends - 1) / 2.0
        p = (mid + 0.5) / n
        zg = stats.norm.ppf(p)
        # tail scales from the mean excess of the deepest tail points
        k = max(12, n // 2000)
        scale = max(1e-9, float(np.std(v)) * 1e-3)
        beta_r = max(scale, float(np.mean(v[n - k :]) - v[n - k]))
        beta_l = max(scale, float(v[k - 1] - np.mean(v[:k])))
        return cls(
            x_nodes=xg,
            z_nodes=zg,
            tail_scale_left=beta_l,
            tail_scale_right=beta_r,
        )

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        z = np.interp(x, self.x_nodes, self.z_nodes)
        xmin, xmax = self.x_nodes[0], self.x_nodes[-1]
        zmin, zmax = self.z_nodes[0], self.z_nodes[-1]
        hi = x > xmax
        if np.any(hi):
            sf_edge = stats.norm.sf(zmax)
            z[hi] = stats.norm.isf(sf_edge * np.exp(-(x[hi] - xmax) / self.tail_scale_right))
        lo = x < xmin
        if np.any(lo):
            cdf_edge = stats.norm.cdf(zmin)
            z[lo] = stats.norm.ppf(cdf_edge * np.exp((x[lo] - xmin) / self.tail_scale_left))
        return z

    def inverse(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        x = np.interp(z, self.z_nodes, self.x_nodes)
        zmin, zmax = self.z_nodes[0], self.z_nodes[-1]
        hi = z > zmax
        if np.any(hi):
            sf_edge = stats.norm.sf(zmax)
            ratio = sf_edge / stats.norm.sf(z[hi])
            x[hi] = self.x_nodes[-1] + self.tail_scale_right * np.log(ratio)
        lo = z < zmin
        if np.any(lo):
            cdf_edge = stats.norm.cdf(zmin)
            ratio = cdf_edge / stats.norm.cdf(z[lo])
            x[lo] = self.x_nodes[0] - self.tail_scale_left * np.log(ratio)
        return x


def identity_gaussianizer(scale: float = 1.0, span: float = 12.0) -> Gaussianizer:
    """Linear map (x = scale*z) over a wide node range; test/support helper."""
    z = np.linspace(-span, span, 41)
    return Gaussianizer(
        x_nodes=z * scale, z_nodes=z, tail_scale_left=scale, tail_scale_right=scale
    )


# ---------------------------------------------------------------------------
# ARMA


def _ar_roots_margin(phi: np.ndarray) -> float:
    """Smallest AR root magnitude minus one (positive means stationary)."""
    if phi.size == 0:
        return np.inf
    poly = np.concatenate([[-c for c in phi[::-1]], [1.0]])
    roots = np.roots(poly)
    if roots.size == 0:
        return np.inf
    return float(np.min(np.abs(roots))) - 1.0


@dataclass(frozen=True)
class ArmaModel:
    phi: np.ndarray
    theta: np.ndarray
    sigma: float
    gaussianizer: Gaussianizer

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=np.float64)
        theta = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)
        if self.sigma <= 0:
            raise FitError("innovation stddev must be positive")
        if _ar_roots_margin(phi) <= _STATIONARITY_MARGIN:
            raise FitError(f"non-stationary AR polynomial (phi={phi.tolist()})")

    @property
    def p(self) -> int:
        return int(self.phi.size)

    @property
    def q(self) -> int:
        return int(self.theta.size)

    def marginal_std(self, n_psi: int = 4096) -> float:
        """Stationary marginal stddev via the impulse-response expansion."""
        impulse = np.zeros(n_psi)
        impulse[0] = 1.0
        psi = signal.lfilter(
            np.concatenate([[1.0], self.theta]), np.concatenate([[1.0], -self.phi]), impulse
        )
        return float(self.sigma * np.sqrt(np.sum(psi**2)))

    def innovations(self, z: np.ndarray) -> np.ndarray:
        """Conditional one-step residuals for a normal-space series."""
        return signal.lfilter(
            np.concatenate([[1.0], -self.phi]), np.concatenate([[1.0], self.theta]), z
        )

    def recurse(self, eps: np.ndarray) -> np.ndarray:
        """Run the ARMA difference equation over an innovation sequence."""
        return signal.lfilter(
            np.concatenate([[1.0], self.theta]), np.concatenate([[1.0], -self.phi]), eps
        )


def _hannan_rissanen(z: np.ndarray, p: int, q: int) -> np.ndarray:
    n = z.size
    out = []
    if q == 0:
        # direct OLS autoregression
        L = p
        Y = z[L:]
        X = np.column_stack([z[L - i : n - i] for i in range(1, p + 1)])
        coef, *_ = np.linalg.lstsq(X, Y, rcond=None)
        return coef
    L = max(20, 2 * (p + q))
    Y = z[L:]
    X = np.column_stack([z[L - i : n - i] for i in range(1, L + 1)])
    ar_long, *_ = np.linalg.lstsq(X, Y, rcond=None)
    eps = np.zeros(n)
    eps[L:] = Y - X @ ar_long
    M = max(p, q)
    rows = []
    for i in range(1, p + 1):
        rows.append(z[M - i : n - i])
    for j in range(1, q + 1):
        rows.append(eps[M - j : n - j])
    X2 = np.column_stack(rows)
    coef, *_ = np.linalg.lstsq(X2, z[M:], rcond=None)
    return coef


def fit_arma(residual: np.ndarray, p: int = DEFAULT_P, q: int = DEFAULT_Q) -> ArmaModel:
    """Fit an ARMA model to a detrended residual series.

    The residual is gaussianized first; estimation minimizes the conditional
    sum of squares from a Hannan-Rissanen start. Non-stationary solutions are
    rejected, non-convergence raises FitError with solver diagnostics.
    """
    residual = np.asarray(residual, dtype=np.float64)
    if p < 0 or q < 0 or p + q < 1:
        raise ConfigError("need p + q >= 1")
    if residual.size < 50 * (p + q):
        raise FitError(f"need at least {50 * (p + q)} samples to fit ARMA({p},{q})")

    gauss = Gaussianizer.fit(residual)
    z = gauss.forward(residual)

    x0 = _hannan_rissanen(z, p, q)

    b_ar = np.empty(p + 1)
    a_ma = np.empty(q + 1)

    def css(params: np.ndarray) -> float:
        phi = params[:p]
        theta = params[p:]
        margin = _ar_roots_margin(phi)
        penalty = 0.0
        if margin < 1e-3:
            penalty += 1e4 * (1e-3 - margin)
            if margin <= 0:
                return 1e8 + penalty
        if q:
            ma_margin = _ar_roots_margin(-theta)  # invertibility of the MA polynomial
            if ma_margin < 1e-6:
                penalty += 1e4 * (1e-6 - ma_margin)
                if ma_margin <= -0.5:
                    return 1e8 + penalty
        b_ar[0] = 1.0
        b_ar[1:] = -phi
        a_ma[0] = 1.0
        a_ma[1:] = theta
        e = signal.lfilter(b_ar, a_ma, z)
        return float(np.log(np.mean(e**2))) + penalty

    res = optimize.minimize(
        css,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 4000, "maxfev": 6000},
    )
    if not res.success:
        raise FitError(
            "ARMA likelihood maximization did not converge",
            diagnostics={"iterations": int(res.nit), "message": res.message, "fun": float(res.fun)},
        )
    phi = res.x[:p]
    theta = res.x[p:]
    e = signal.lfilter(
        np.concatenate([[1.0], -phi]), np.concatenate([[1.0], theta]), z
    )
    sigma = float(np.sqrt(np.mean(e**2)))
    return ArmaModel(phi=phi, theta=theta, sigma=sigma, gaussianizer=gauss)


# ---------------------------------------------------------------------------
# Combined model


@dataclass(frozen=True)
class SyntheticPriceModel:
    fourier: FourierModel
    arma: ArmaModel
    site: str = ""
    train_start: str = ""
    train_hours: int = 0
    metadata: dict = field(default_factory=dict)


def fit_price_model(
    series: PriceSeries,
    periods=DEFAULT_PERIODS,
    k: int = DEFAULT_HARMONICS,
    p: int = DEFAULT_P,
    q: int = DEFAULT_Q,
    site: str = "",
) -> SyntheticPriceModel:
    fourier = fit_fourier(series, periods, k)
    trend = fourier.evaluate(np.arange(len(series), dtype=np.float64))
    arma = fit_arma(series.prices - trend, p, q)
    return SyntheticPriceModel(
        fourier=fourier,
        arma=arma,
        site=site,
        train_start=str(series.start),
        train_hours=len(series),
    )


SYNTHETIC_START = "2030-01-01 00:00:00"


def generate(model: SyntheticPriceModel, hours: int, seed: int) -> PriceSeries:
    """Seeded synthetic price series; deterministic per (model, hours, seed)."""
    if hours < 1:
        raise ConfigError("hours must be at least 1")
    rng = np.random.default_rng(seed)
    arma = model.arma
    eps = rng.standard_normal(hours + _GENERATE_BURN_IN) * arma.sigma
    y = arma.recurse(eps)[_GENERATE_BURN_IN:]
    # normalize to a unit marginal so the quantile map sees N(0,1) input
    y = y / arma.marginal_std()
    resid = arma.gaussianizer.inverse(y)
    trend = model.fourier.evaluate(np.arange(hours, dtype=np.float64))
    return PriceSeries(start=pd.Timestamp(SYNTHETIC_START), prices=trend + resid)


# ---------------------------------------------------------------------------
# Moment validation

MOMENT_NAMES = ("mean", "std", "min", "p25", "p50", "p75", "max", "kurtosis", "skewness")


def _moments(x: np.ndarray) -> dict[str, float]:
    return {
        "mean": float(np.mean(x)),
        "std": float(np.std(x, ddof=1)),
        "min": float(np.min(x)),
        "p25": float(np.percentile(x, 25)),
        "p50": float(np.percentile(x, 50)),
        "p75": float(np.percentile(x, 75)),
        "max": float(np.max(x)),
        "kurtosis": float(stats.kurtosis(x, fisher=True, bias=False)),
        "skewness": float(stats.skew(x, bias=False)),
    }


DEFAULT_TOLERANCES = {
    # (relative, absolute floor near zero, spread-scaled floor as fraction of
    # the historical std). Extremes are single order statistics, so their
    # floor scales with the spread; the central stats keep a fixed 0.5 floor.
    "mean": (0.05, 0.5, 0.0),
    "std": (0.05, 0.5, 0.0),
    "min": (0.05, 0.5, 0.4),
    "p25": (0.05, 0.5, 0.0),
    "p50": (0.05, 0.5, 0.0),
    "p75": (0.05, 0.5, 0.0),
    "max": (0.05, 0.5, 0.4),
    "kurtosis": (0.05, 0.05, 0.0),
    "skewness": (0.05, 0.05, 0.0),
}


@dataclass(frozen=True)
class MomentReport:
    historical: dict[str, float]
    synthetic: dict[str, float]
    delta: dict[str, float]
    passed: dict[str, bool]

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "statistic": list(MOMENT_NAMES),
                "historical": [self.historical[m] for m in MOMENT_NAMES],
                "synthetic": [self.synthetic[m] for m in MOMENT_NAMES],
                "delta": [self.delta[m] for m in MOMENT_NAMES],
                "passed": [self.passed[m] for m in MOMENT_NAMES],
            }
        )


def validate_moments(
    historical: PriceSeries | np.ndarray,
    synthetic: PriceSeries | np.ndarray,
    tolerances: dict | None = None,
) -> MomentReport:
    h = historical.prices if isinstance(historical, PriceSeries) else np.asarray(historical)
    s = synthetic.prices if isinstance(synthetic, PriceSeries) else np.asarray(synthetic)
    if h.size == 0 or s.size == 0:
        raise ConfigError("both series must be non-empty")
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    hm = _moments(h)
    sm = _moments(s)
    delta = {m: sm[m] - hm[m] for m in MOMENT_NAMES}
    passed = {}
    for m in MOMENT_NAMES:
        rel, floor, spread_frac = tol[m]
        limit = max(rel * abs(hm[m]), floor, spread_frac * hm["std"])
        passed[m] = abs(delta[m]) <= limit
    return MomentReport(historical=hm, synthetic=sm, delta=delta, passed=passed)


# ---------------------------------------------------------------------------
# Persistence


def model_to_dict(model: SyntheticPriceModel) -> dict:
    f = model.fourier
    a = model.arma
    g = a.gaussianizer
    return {
        "schema": MODEL_SCHEMA,
        "site": model.site,
        "train_start": model.train_start,
        "train_hours": model.train_hours,
        "fourier": {
            "periods": list(f.periods),
            "harmonics": f.harmonics,
            "intercept": f.intercept,
            "coef": f.coef.tolist(),
        },
        "arma": {
            "p": a.p,
            "q": a.q,
            "phi": a.phi.tolist(),
            "theta": a.theta.tolist(),
            "sigma": a.sigma,
        },
        "gaussianizer": {
            "x_nodes": g.x_nodes.tolist(),
            "z_nodes": g.z_nodes.tolist(),
            "tail_scale_left": g.tail_scale_left,
            "tail_scale_right": g.tail_scale_right,
        },
        "metadata": model.metadata,
    }


def model_from_dict(doc: dict) -> SyntheticPriceModel:
    if doc.get("schema") != MODEL_SCHEMA:
        raise ConfigError(f"unsupported model schema: {doc.get('schema')!r}")
    f = doc["fourier"]
    g = doc["gaussianizer"]
    a = doc["arma"]
    gauss = Gaussianizer(
        x_nodes=np.asarray(g["x_nodes"], dtype=np.float64),
        z_nodes=np.asarray(g["z_nodes"], dtype=np.float64),
        tail_scale_left=float(g["tail_scale_left"]),
        tail_scale_right=float(g["tail_scale_right"]),
    )
    return SyntheticPriceModel(
        fourier=FourierModel(
            periods=tuple(f["periods"]),
            harmonics=int(f["harmonics"]),
            intercept=float(f["intercept"]),
            coef=np.asarray(f["coef"], dtype=np.float64),
        ),
        arma=ArmaModel(
            phi=np.asarray(a["phi"], dtype=np.float64),
            theta=np.asarray(a["theta"], dtype=np.float64),
            sigma=float(a["sigma"]),
            gaussianizer=gauss,
        ),
        site=doc.get("site", ""),
        train_start=doc.get("train_start", ""),
        train_hours=int(doc.get("train_hours", 0)),
        metadata=doc.get("metadata", {}),
    )


def save_model(path, model: SyntheticPriceModel) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=1)


def load_model(path) -> SyntheticPriceModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
