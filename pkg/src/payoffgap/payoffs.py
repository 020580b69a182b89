"""Payoff algebra: binary, linear, softplus and square kernels, weighted
compositions, named option structures, and expectations under a distribution.

A payoff is a weighted sum of kernels. The softplus kernel
``K + log(exp(sharpness * (x - K)) + 1) / sharpness`` is the smooth,
call-like building block; at high sharpness it converges to
``K + max(x - K, 0)``, so piecewise-linear option structures are assembled
from softplus legs with a large default sharpness.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate

from . import distributions as dists
from .distributions import DistributionSpec
from .errors import ValidationError

# sharp enough that the kink error log(2)/sharpness is ~7e-5
DEFAULT_SHARPNESS = 1e4


@dataclass(frozen=True)
class Heaviside:
    """Binary kernel: 1 if x >= k else 0 (boundary included)."""

    k: float


@dataclass(frozen=True)
class Linear:
    pass


@dataclass(frozen=True)
class Softplus:
    k: float
    sharpness: float = DEFAULT_SHARPNESS

    def __post_init__(self):
        if self.sharpness <= 0:
            raise ValidationError(f"softplus sharpness must be > 0, got {self.sharpness}")


@dataclass(frozen=True)
class Square:
    pass


@dataclass(frozen=True)
class Constant:
    c: float


Kernel = Union[Heaviside, Linear, Softplus, Square, Constant]


def _eval_kernel(kernel: Kernel, x: np.ndarray) -> np.ndarray:
    if isinstance(kernel, Heaviside):
        return np.where(x >= kernel.k, 1.0, 0.0)
    if isinstance(kernel, Linear):
        return np.asarray(x, dtype=float)
    if isinstance(kernel, Softplus):
        p = kernel.sharpness
        # logaddexp keeps both deep-ITM and deep-OTM regions overflow-safe
        return kernel.k + np.logaddexp(0.0, p * (x - kernel.k)) / p
    if isinstance(kernel, Square):
        return np.square(x)
    if isinstance(kernel, Constant):
        return np.full_like(np.asarray(x, dtype=float), kernel.c)
    raise ValidationError(f"unknown kernel {kernel!r}")


@dataclass(frozen=True)
class PayoffFunction:
    """Weighted sum of payoff kernels."""

    terms: tuple[tuple[float, Kernel], ...]

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.zeros_like(arr)
        for w, kernel in self.terms:
            out = out + w * _eval_kernel(kernel, arr)
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    def to_json(self) -> str:
        return json.dumps({"terms": [_term_obj(w, k) for w, k in self.terms]})

    @classmethod
    def from_json(cls, text: str) -> "PayoffFunction":
        try:
            obj = json.loads(text)
            terms = tuple(_term_from_obj(t) for t in obj["terms"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValidationError(f"malformed payoff spec: {exc}") from exc
        return cls(terms)


def _term_obj(w: float, kernel: Kernel) -> dict:
    if isinstance(kernel, Heaviside):
        spec = {"type": "heaviside", "k": kernel.k}
    elif isinstance(kernel, Linear):
        spec = {"type": "linear"}
    elif isinstance(kernel, Softplus):
        spec = {"type": "softplus", "k": kernel.k, "sharpness": kernel.sharpness}
    elif isinstance(kernel, Square):
        spec = {"type": "square"}
    else:
        spec = {"type": "constant", "c": kernel.c}
    return {"w": w, "kernel": spec}


def _term_from_obj(obj: dict) -> tuple[float, Kernel]:
    w = float(obj["w"])
    spec = obj["kernel"]
    kind = spec["type"]
    if kind == "heaviside":
        return w, Heaviside(float(spec["k"]))
    if kind == "linear":
        return w, Linear()
    if kind == "softplus":
        return w, Softplus(float(spec["k"]), float(spec.get("sharpness", DEFAULT_SHARPNESS)))
    if kind == "square":
        return w, Square()
    if kind == "constant":
        return w, Constant(float(spec["c"]))
    raise ValidationError(f"unknown kernel type {kind!r}")


def eval_payoff(g: PayoffFunction, x) -> float:
    return g(x)


# ---------------------------------------------------------------- structures

def binary(K: float) -> PayoffFunction:
    return PayoffFunction(((1.0, Heaviside(K)),))


def linear() -> PayoffFunction:
    return PayoffFunction(((1.0, Linear()),))


def call(K: float, sharpness: float = DEFAULT_SHARPNESS) -> PayoffFunction:
    """max(x - K, 0) as a sharp softplus leg."""
    return PayoffFunction(((1.0, Softplus(K, sharpness)), (1.0, Constant(-K))))


def put(K: float, sharpness: float = DEFAULT_SHARPNESS) -> PayoffFunction:
    """max(K - x, 0): a sharp softplus leg minus the linear kernel."""
    return PayoffFunction(((1.0, Softplus(K, sharpness)), (-1.0, Linear())))


def christmas_tree(
    K: float, delta1: float, delta2: float, sharpness: float = DEFAULT_SHARPNESS
) -> PayoffFunction:
    """Long a put at K, short puts at K - delta1 and K - delta2.

    Profits on moderate declines, slope -1 on deep declines.
    """
    if not (delta2 >= delta1 >= 0):
        raise ValidationError(
            f"require delta2 >= delta1 >= 0, got delta1={delta1}, delta2={delta2}"
        )
    return PayoffFunction(
        (
            (1.0, Softplus(K, sharpness)),
            (-1.0, Softplus(K - delta1, sharpness)),
            (-1.0, Softplus(K - delta2, sharpness)),
            (1.0, Linear()),
        )
    )


def butterfly(
    K1: float, K2: float, K3: float, sharpness: float = DEFAULT_SHARPNESS
) -> PayoffFunction:
    """Calls weighted +1 / -2 / +1 at the three strikes (classic construction)."""
    if not (K1 < K2 < K3):
        raise ValidationError(f"require K1 < K2 < K3, got {K1}, {K2}, {K3}")
    return PayoffFunction(
        (
            (1.0, Softplus(K1, sharpness)),
            (-2.0, Softplus(K2, sharpness)),
            (1.0, Softplus(K3, sharpness)),
            (1.0, Constant(-K1 + 2.0 * K2 - K3)),
        )
    )


def short_volatility() -> PayoffFunction:
    """Variance-swap-like short volatility book: 1 - x^2 evaluated per period."""
    return PayoffFunction(((1.0, Constant(1.0)), (-1.0, Square())))


_STRUCTURES = {
    "call": call,
    "put": put,
    "christmas_tree": christmas_tree,
    "butterfly": butterfly,
    "short_volatility": short_volatility,
    "binary": binary,
    "linear": linear,
}


def build_structure(kind: str, **params) -> PayoffFunction:
    try:
        builder = _STRUCTURES[kind]
    except KeyError:
        raise ValidationError(
            f"unknown structure {kind!r}; choose from {sorted(_STRUCTURES)}"
        ) from None
    return builder(**params)


# -------------------------------------------------------------- expectations

def _kernel_expectation(kernel: Kernel, dist: DistributionSpec) -> float:
    if isinstance(kernel, Constant):
        return kernel.c
    if isinstance(kernel, Heaviside):
        return float(dists.frozen(dist).sf(kernel.k))
    if isinstance(kernel, Linear):
        return dists.mean(dist)
    if isinstance(kernel, Square):
        return dists.second_moment(dist)
    # softplus: K plus the expectation of the smooth excess, which decays to 0
    # below K and grows linearly above it (finite iff the mean is finite)
    dists.mean(dist)  # raises InfiniteMeanError where the leg diverges
    fr = dists.frozen(dist)
    k, p = kernel.k, kernel.sharpness

    def excess(x):
        return np.logaddexp(0.0, p * (x - k)) / p * fr.pdf(x)

    lo, hi = dists.support(dist)
    lo = max(lo, -np.inf)
    pieces = []
    if lo < k:
        pieces.append(integrate.quad(excess, lo, k, epsrel=1e-9, limit=200)[0])
    val, _ = integrate.quad(excess, max(lo, k), np.inf, epsrel=1e-9, limit=200)
    pieces.append(val)
    return k + float(sum(pieces))


def expectation(g: PayoffFunction, dist: DistributionSpec) -> float:
    """E[g(X)] as the weighted sum of per-kernel expectations."""
    return float(sum(w * _kernel_expectation(kernel, dist) for w, kernel in g.terms))
