"""Expected payoff above a threshold versus probability-times-impact.

``expected_payoff_above`` computes I1, the integral of g(x) f(x) over the
exceedance region; ``probability_impact`` computes I2 = g(K) P(X > K).
Treating the two as interchangeable is only harmless when g is flat above K;
for a growing payoff under a regular-variation tail the gap is a constant
factor a / (a - 1) in the tail index a, which the corrected probability
p* = I1 / K makes explicit. Also here: the lognormal example where the
exceedance probability and the expectation above the mean move in opposite
directions as uncertainty rises, the closed-form convexities used for
distributional-uncertainty checks, and VaR / CVaR.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, special

from . import distributions as dists
from . import payoffs as po
from .distributions import DistributionSpec, Family
from .errors import DomainError, EstimationError, InfiniteMeanError
from .payoffs import PayoffFunction


@dataclass(frozen=True)
class ConflationReport:
    """One row of the pseudo-overestimation analysis (linear payoff)."""

    p: float
    k_p: float
    i1: float
    i2: float
    p_star: float
    ratio: float
    diagnostic_overflow: bool = False  # p_star > 1 under gross misspecification


@dataclass(frozen=True)
class RiskMeasures:
    var_alpha: float
    cvar_alpha: float
    alpha: float


def _kernel_tail_integral(dist: DistributionSpec, K: float, kernel) -> float:
    """integral over (K, inf) of kernel(x) f(x) dx."""
    fr = dists.frozen(dist)
    if isinstance(kernel, po.Constant):
        return kernel.c * float(fr.sf(K))
    if isinstance(kernel, po.Heaviside):
        return float(fr.sf(max(K, kernel.k)))
    if isinstance(kernel, po.Linear):
        return dists.partial_mean(dist, K)
    if isinstance(kernel, po.Square):
        p = dict(dist.params)
        if dist.family is Family.PARETO and p["alpha"] <= 2:
            raise InfiniteMeanError("tail integral of x^2 diverges for alpha <= 2")
        if dist.family is Family.STUDENT_T and p["df"] <= 2:
            raise InfiniteMeanError("tail integral of x^2 diverges for df <= 2")
        val, _ = integrate.quad(
            lambda x: x * x * fr.pdf(x), K, np.inf, epsrel=1e-9, limit=200
        )
        return float(val)
    if isinstance(kernel, po.Softplus):
        dists.mean(dist)  # softplus grows linearly; diverges with the mean
        k, s = kernel.k, kernel.sharpness
        val, _ = integrate.quad(
            lambda x: (k + np.logaddexp(0.0, s * (x - k)) / s) * fr.pdf(x),
            K,
            np.inf,
            epsrel=1e-9,
            limit=200,
            points=None,
        )
        return float(val)
    raise DomainError(f"unknown kernel {kernel!r}")


_LINEAR = po.linear()


def expected_payoff_above(
    dist: DistributionSpec, K: float, g: PayoffFunction = _LINEAR
) -> float:
    """I1 = integral of g(x) f(x) dx over x > K."""
    return float(
        sum(w * _kernel_tail_integral(dist, K, kernel) for w, kernel in g.terms)
    )


def probability_impact(
    dist: DistributionSpec, K: float, g: PayoffFunction = _LINEAR
) -> float:
    """I2 = g(K) * P(X > K)."""
    return g(K) * float(dists.frozen(dist).sf(K))


def corrected_probability(dist: DistributionSpec, p: float) -> float:
    """p* = I1(K_p) / K_p for the linear payoff: the de-binarized probability.

    For a Pareto tail, p* / p = alpha / (alpha - 1) exactly; the value may
    exceed 1 under gross misspecification and is reported, not clamped.
    """
    k_p = dists.quantile_threshold(dist, p)
    return dists.partial_mean(dist, k_p) / k_p


def conflation_row(dist: DistributionSpec, p: float) -> ConflationReport:
    k_p = dists.quantile_threshold(dist, p)
    i1 = dists.partial_mean(dist, k_p)
    i2 = k_p * float(dists.frozen(dist).sf(k_p))
    p_star = i1 / k_p
    return ConflationReport(
        p=p,
        k_p=k_p,
        i1=i1,
        i2=i2,
        p_star=p_star,
        ratio=p_star / p,
        diagnostic_overflow=p_star > 1.0,
    )


def pseudo_table(dist: DistributionSpec, ps: Sequence[float]) -> list[ConflationReport]:
    return [conflation_row(dist, p) for p in ps]


def _sig6(x: float) -> str:
    return f"{x:.6g}"


def pseudo_table_csv(rows: Sequence[ConflationReport]) -> str:
    buf = io.StringIO()
    buf.write("p,K_p,I1,I2,p_star,ratio\n")
    for r in rows:
        buf.write(
            ",".join(_sig6(v) for v in (r.p, r.k_p, r.i1, r.i2, r.p_star, r.ratio))
            + "\n"
        )
    return buf.getvalue()


def pseudo_table_json(rows: Sequence[ConflationReport]) -> str:
    return json.dumps(
        [
            {
                "p": r.p,
                "K_p": r.k_p,
                "I1": r.i1,
                "I2": r.i2,
                "p_star": r.p_star,
                "ratio": r.ratio,
                "diagnostic_overflow": r.diagnostic_overflow,
            }
            for r in rows
        ]
    )


def lognormal_binary_vs_expectation(x0: float, sigma: float) -> tuple[float, float]:
    """(E[X 1{X > x0}], P(X > x0)) for the mean-x0 lognormal.

    As sigma rises the expectation above the mean climbs toward x0 while the
    exceedance probability collapses to 0: binary and continuous views of the
    same event move in opposite directions.
    """
    if x0 <= 0 or sigma <= 0:
        raise DomainError(f"x0 and sigma must be > 0, got x0={x0}, sigma={sigma}")
    e = float(special.erf(sigma / (2.0 * math.sqrt(2.0))))
    return 0.5 * x0 * (1.0 + e), 0.5 * (1.0 - e)


def gaussian_sigma_convexity(K: float, sigma: float) -> float:
    """Second derivative in sigma of the gap between the tail integral of
    x f(x) and the exceedance probability, for a centered Gaussian of scale
    sigma; strictly positive for K >= 1 at moderate scales."""
    if sigma <= 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    return (
        math.exp(-(K * K) / (2.0 * sigma * sigma))
        * ((K - 1.0) * K**3 - (K - 2.0) * K * sigma * sigma)
        / (math.sqrt(2.0 * math.pi) * sigma**5)
    )


def pareto_alpha_convexity(K: float, alpha: float) -> float:
    """Second derivative in alpha of the ratio I1 / I2 for a Pareto tail:
    2K / (alpha - 1)^3, positive and blowing up as alpha -> 1."""
    if alpha <= 1:
        raise DomainError(f"alpha must be > 1, got {alpha}")
    if K <= 0:
        raise DomainError(f"K must be > 0, got {K}")
    return 2.0 * K / (alpha - 1.0) ** 3


# ------------------------------------------------------------- risk measures

def _discrete_risk(values: np.ndarray, probs: np.ndarray, alpha: float) -> RiskMeasures:
    order = np.argsort(values)
    v = values[order]
    q = probs[order]
    cum = np.cumsum(q)
    # VaR: negate the smallest x whose CDF strictly exceeds alpha
    idx = int(np.searchsorted(cum, alpha, side="right"))
    var = -float(v[min(idx, len(v) - 1)])
    # expected shortfall: average of the quantile function over (0, alpha)
    remaining = alpha
    acc = 0.0
    for vi, qi in zip(v, q):
        take = min(qi, remaining)
        acc += -vi * take
        remaining -= take
        if remaining <= 0:
            break
    if remaining > 1e-12:
        raise EstimationError("probabilities sum to less than alpha")
    return RiskMeasures(var_alpha=var, cvar_alpha=acc / alpha, alpha=alpha)


def risk_measures(source, alpha: float) -> RiskMeasures:
    """VaR and CVaR (expected shortfall) at level alpha, losses negative.

    source may be a DistributionSpec, a sequence of (value, probability)
    pairs, or an array of sampled outcomes (equal weights).
    """
    if not 0.0 < alpha < 0.5:
        raise DomainError(f"alpha must be in (0, 0.5), got {alpha}")
    if isinstance(source, DistributionSpec):
        fr = dists.frozen(source)
        var = -float(fr.ppf(alpha))
        val, _ = integrate.quad(
            lambda u: fr.ppf(u), 0.0, alpha, epsrel=1e-9, limit=200
        )
        return RiskMeasures(var_alpha=var, cvar_alpha=-val / alpha, alpha=alpha)
    arr = np.asarray(source, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        values, probs = arr[:, 0], arr[:, 1]
    elif arr.ndim == 1:
        if arr.size == 0:
            raise EstimationError("empty sample")
        values = arr
        probs = np.full(arr.size, 1.0 / arr.size)
    else:
        raise DomainError("source must be a spec, (value, prob) pairs, or a 1-d sample")
    return _discrete_risk(values, probs, alpha)
