"""Performance metrics and their sampling distributions.

Catalogue: survival-conditioned cumulative P/L with an absorbing barrier,
the binary tally, the Brier score, the M4 precision scores (sMAPE / MASE)
and an extrema-based M5 variant. Alongside the metrics live their analytics:
tally cumulants, closed-form Brier mean/variance, kurtosis limits, the exact
single-evaluation Brier density, and the characteristic function of the
n-evaluation score built from a regularized generalized hypergeometric
series.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import DomainError, SeriesTruncationError, ValidationError


@dataclass(frozen=True)
class ForecastSeries:
    """Paired forecast records.

    Probabilistic scoring uses (probabilities, hits); point scoring uses
    (forecasts, realizations). Exactly one pair is populated.
    """

    probabilities: np.ndarray | None = None
    hits: np.ndarray | None = None
    forecasts: np.ndarray | None = None
    realizations: np.ndarray | None = None

    @classmethod
    def from_probabilities(cls, f, hits) -> "ForecastSeries":
        f = np.asarray(f, dtype=float)
        h = np.asarray(hits, dtype=float)
        if f.size < 1 or f.size != h.size:
            raise ValidationError("need n >= 1 paired (f, hit) records")
        if np.any((f < 0) | (f > 1)):
            raise ValidationError("forecast probabilities must lie in [0, 1]")
        if not np.all(np.isin(h, (0.0, 1.0))):
            raise ValidationError("hits must be 0/1 indicators")
        return cls(probabilities=f, hits=h)

    @classmethod
    def from_points(cls, forecasts, realizations) -> "ForecastSeries":
        xf = np.asarray(forecasts, dtype=float)
        xr = np.asarray(realizations, dtype=float)
        if xf.size < 1 or xf.size != xr.size:
            raise ValidationError("need n >= 1 paired (forecast, realized) records")
        return cls(forecasts=xf, realizations=xr)

    @property
    def n(self) -> int:
        arr = self.probabilities if self.probabilities is not None else self.forecasts
        return int(arr.size)


def read_forecast_csv(path) -> ForecastSeries:
    """Ingest `f,hit` (probabilistic) or `forecast,realized` (point) CSV."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = [f.strip() for f in reader.fieldnames or []]
        rows = list(reader)
    if not rows:
        raise ValidationError(f"{path}: no records")
    if {"f", "hit"} <= set(fields):
        return ForecastSeries.from_probabilities(
            [r["f"] for r in rows], [r["hit"] for r in rows]
        )
    if {"forecast", "realized"} <= set(fields):
        return ForecastSeries.from_points(
            [r["forecast"] for r in rows], [r["realized"] for r in rows]
        )
    raise ValidationError(
        f"{path}: header must contain f,hit or forecast,realized (got {fields})"
    )


@dataclass(frozen=True)
class SurvivalConfig:
    b: float = -math.inf  # survival mark; running P/L must stay strictly above
    initial: float = 0.0


@dataclass(frozen=True)
class ScoreReport:
    metric: str
    value: float
    n: int
    absorbed: bool = False
    absorbed_at: int | None = None
    skipped: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "metric": self.metric,
                "value": self.value,
                "n": self.n,
                "absorbed": self.absorbed,
                "absorbed_at": self.absorbed_at,
            }
        )


# ------------------------------------------------------------------- metrics

def pl_score(payoff_stream: Sequence[float], cfg: SurvivalConfig = SurvivalConfig()) -> ScoreReport:
    """Cumulative P/L with an absorbing barrier.

    Each period accrues only while the running pre-period sum stays strictly
    above the survival mark; the first failure freezes the account for good.
    Note the empty pre-sum is 0, so a mark b >= 0 absorbs immediately.
    """
    total = cfg.initial
    pre = 0.0
    absorbed = False
    absorbed_at = None
    stream = list(payoff_stream)
    for t, gx in enumerate(stream, start=1):
        if not pre > cfg.b:
            absorbed = True
            absorbed_at = t
            break
        total += gx
        pre += gx
    return ScoreReport(
        metric="pl", value=float(total), n=len(stream),
        absorbed=absorbed, absorbed_at=absorbed_at,
    )


def tally(hits: Sequence[float]) -> ScoreReport:
    """Fraction of correct binary calls."""
    h = np.asarray(hits, dtype=float)
    if h.size < 1:
        raise ValidationError("need at least one indicator")
    if not np.all(np.isin(h, (0.0, 1.0))):
        raise ValidationError("tally expects 0/1 indicators")
    return ScoreReport(metric="tally", value=float(h.mean()), n=int(h.size))


def brier(series: ForecastSeries) -> ScoreReport:
    """Mean squared gap between announced probabilities and outcomes."""
    if series.probabilities is None:
        raise ValidationError("brier needs probabilistic records (f, hit)")
    f, h = series.probabilities, series.hits
    return ScoreReport(metric="brier", value=float(np.mean((f - h) ** 2)), n=series.n)


def m4_score(
    series: ForecastSeries,
    variant: str = "s1_smape",
    naive_errors: Sequence[float] | float | None = None,
) -> ScoreReport:
    """Scaled absolute error: sMAPE scaling (s1) or MASE scaling (s2).

    0/0 terms under s1 (forecast and realization both zero) are skipped with
    a warning; the skipped count is reported.
    """
    if series.forecasts is None:
        raise ValidationError("m4 scores need point records (forecast, realized)")
    xf, xr = series.forecasts, series.realizations
    if variant == "s1_smape":
        s = 0.5 * (np.abs(xf) + np.abs(xr))
    elif variant == "s2_mase":
        if naive_errors is None:
            raise ValidationError("s2_mase requires naive_errors")
        s = np.broadcast_to(np.asarray(naive_errors, dtype=float), xf.shape).copy()
        if np.any(s <= 0):
            raise ValidationError("naive_errors must be > 0")
    else:
        raise ValidationError(f"variant must be s1_smape or s2_mase, got {variant!r}")
    err = np.abs(xf - xr)
    usable = s > 0
    skipped = int(np.sum(~usable))
    if skipped:
        warnings.warn(f"m4_score: skipped {skipped} indeterminate 0/0 term(s)")
        if not np.any(usable):
            raise ValidationError("all terms indeterminate")
    value = float(np.mean(err[usable] / s[usable]))
    return ScoreReport(metric=f"m4_{variant}", value=value, n=series.n, skipped=skipped)


def naive_mad(observations: Sequence[float]) -> float:
    """In-sample one-step naive-forecast mean absolute deviation (MASE scale)."""
    x = np.asarray(observations, dtype=float)
    if x.size < 2:
        raise ValidationError("need at least two observations")
    return float(np.mean(np.abs(np.diff(x))))


def m5_extrema_score(
    forecast_min: float,
    forecast_max: float,
    realized_path: Sequence[float],
    variant: str = "s1_smape",
    naive_errors: Sequence[float] | float | None = None,
) -> ScoreReport:
    """Precision on the path extrema: the unweighted mean of the two scaled
    absolute-error terms for the forecast minimum and maximum. An exact
    forecast contributes 0 even where the scale degenerates."""
    path = np.asarray(realized_path, dtype=float)
    if path.size < 1:
        raise ValidationError("realized path must be non-empty")
    targets = (float(path.min()), float(path.max()))
    forecasts = (float(forecast_min), float(forecast_max))
    if variant == "s2_mase":
        if naive_errors is None:
            raise ValidationError("s2_mase requires naive_errors")
        scales = np.broadcast_to(np.asarray(naive_errors, dtype=float), (2,))
        if np.any(scales <= 0):
            raise ValidationError("naive_errors must be > 0")
    elif variant != "s1_smape":
        raise ValidationError(f"variant must be s1_smape or s2_mase, got {variant!r}")
    terms = []
    for i, (xf, xr) in enumerate(zip(forecasts, targets)):
        if xf == xr:
            terms.append(0.0)
            continue
        s = 0.5 * (abs(xf) + abs(xr)) if variant == "s1_smape" else float(scales[i])
        terms.append(abs(xf - xr) / s)
    return ScoreReport(
        metric=f"m5_{variant}", value=float(np.mean(terms)), n=int(path.size)
    )


# ----------------------------------------------------------- Brier analytics

@dataclass(frozen=True)
class BrierModel:
    """Forecasts Beta(a, b) distributed, outcomes Bernoulli(p)."""

    a: float
    b: float
    p: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValidationError("Beta parameters a, b must be > 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError("success rate p must lie in [0, 1]")


def _y2_moment4(model: BrierModel) -> float:
    """E[(f - Y)^4] from the rising moments of the Beta distribution."""
    a, b, p = model.a, model.b, model.p
    denom = (a + b) * (a + b + 1) * (a + b + 2) * (a + b + 3)
    ef4 = a * (a + 1) * (a + 2) * (a + 3) / denom
    e1mf4 = b * (b + 1) * (b + 2) * (b + 3) / denom
    return p * e1mf4 + (1.0 - p) * ef4


def brier_moments(model: BrierModel, n: int) -> tuple[float, float]:
    """Closed-form mean and variance of the n-evaluation Brier score.

    The variance is that of the mean of n i.i.d. squared gaps,
    (E[y^4] - mu^2) / n with y = f - Y.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    a, b, p = model.a, model.b, model.p
    mu = (a * a * (1.0 - p) - a * p + a + b * (b + 1) * p) / ((a + b) * (a + b + 1))
    sigma2_n = (_y2_moment4(model) - mu * mu) / n
    return mu, sigma2_n


def brier_kurtosis(model: BrierModel, n: int, regime: str) -> float:
    """Fourth cumulant of the score in the two tractable limits.

    max_entropy (a = b = 1): -6 / (7n) regardless of p.
    max_variance (a, b -> 0): -(6(p-1)p + 1) / (n (p-1) p).
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if regime == "max_entropy":
        return -6.0 / (7.0 * n)
    if regime == "max_variance":
        p = model.p
        if p in (0.0, 1.0):
            raise DomainError("max_variance regime needs p not in {0, 1}")
        return -(6.0 * (p - 1.0) * p + 1.0) / (n * (p - 1.0) * p)
    raise ValidationError(f"regime must be max_entropy or max_variance, got {regime!r}")


def brier_pdf_single(z: float, model: BrierModel) -> float:
    """Exact density of a single squared gap (f - Y)^2 on (0, 1).

    Mixture form: conditioning on the outcome maps z back to f = 1 - sqrt(z)
    or f = sqrt(z) with Jacobian 1 / (2 sqrt(z)). For a = b = 1 this
    collapses to 1 / (2 sqrt(z)).
    """
    if not 0.0 < z < 1.0:
        raise DomainError(f"z must lie in (0, 1), got {z}")
    a, b, p = model.a, model.b, model.p
    r = math.sqrt(z)
    g1 = stats.beta.pdf(1.0 - r, a, b)
    g0 = stats.beta.pdf(r, a, b)
    return (p * g1 + (1.0 - p) * g0) / (2.0 * r)


_MAX_TERMS = 500
_SERIES_TOL = 1e-12


def _hyp2f2_regularized(
    a1: float, a2: float, b1: float, b2: float, z: complex
) -> complex:
    """Regularized 2F2 via Pochhammer-recurrence series with early exit.

    2F2 is entire, so the series always converges; the budget bounds the
    usable argument size (|z| up to roughly 50 within 500 terms).
    """
    term = 1.0 + 0.0j
    total = term
    for k in range(_MAX_TERMS):
        term *= (a1 + k) * (a2 + k) / ((b1 + k) * (b2 + k)) * z / (k + 1)
        total += term
        if abs(term) < _SERIES_TOL * max(abs(total), 1.0):
            break
    else:
        raise SeriesTruncationError(
            f"2F2 series did not reach tol={_SERIES_TOL} in {_MAX_TERMS} terms "
            f"(last |term| / |sum| = {abs(term) / max(abs(total), 1.0):.3g})",
            achieved=abs(term) / max(abs(total), 1.0),
        )
    return total / (math.gamma(b1) * math.gamma(b2))


def _single_charfn(t: float, model: BrierModel) -> complex:
    """Characteristic function of one squared gap (f - Y)^2."""
    if t == 0.0:
        return 1.0 + 0.0j
    a, b, p = model.a, model.b, model.p
    z = 1j * t
    pref = math.sqrt(math.pi) * 2.0 ** (1.0 - a - b) * math.gamma(a + b)
    h1 = (a + b) / 2.0
    h2 = (a + b + 1.0) / 2.0
    f_b = _hyp2f2_regularized((b + 1.0) / 2.0, b / 2.0, h1, h2, z)
    f_a = _hyp2f2_regularized((a + 1.0) / 2.0, a / 2.0, h1, h2, z)
    return pref * (p * f_b - (p - 1.0) * f_a)


def brier_charfn(t: float, model: BrierModel, n: int) -> complex:
    """Characteristic function of the n-evaluation Brier score.

    The score is the mean of n i.i.d. squared gaps, so the value is the
    per-gap characteristic function at t / n raised to the n-th power;
    exactly 1 at t = 0 and bounded by 1 in modulus.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if t == 0.0:
        return 1.0 + 0.0j
    return _single_charfn(t / n, model) ** n


def tally_cumulants(p: float, N: int) -> tuple[float, float, float, float]:
    """First four cumulants of the N-averaged Bernoulli tally."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    k1 = p
    k2 = (1.0 - p) * p / N
    k3 = (p - 1.0) * p * (2.0 * p - 1.0) / N**2
    k4 = (1.0 - p) * p * (6.0 * (p - 1.0) * p + 1.0) / N**3
    return k1, k2, k3, k4


def simulate_brier_scores(
    model: BrierModel, n: int, replications: int, seed: int
) -> np.ndarray:
    """Monte Carlo replications of the n-evaluation Brier score."""
    rng = np.random.default_rng(seed)
    f = rng.beta(model.a, model.b, size=(replications, n))
    y = rng.binomial(1, model.p, size=(replications, n))
    return np.mean((f - y) ** 2, axis=1)
