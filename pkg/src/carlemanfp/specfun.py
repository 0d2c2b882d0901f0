"""Special functions behind the closed-form expressions of the bound suite.

The general Gauss hypergeometric, digamma and dilogarithm are delegated
to scipy.special (mature, machine-precision implementations; the test
suite cross-checks them against independent brute-force series).  The
``2F1(1, mu; 1+mu; z)`` family, which enters the power-law Hilbert
transform identity, is implemented natively because it is needed in
vectorised form arbitrarily close to ``z = 1``, where a logarithmic
rearrangement keeps full relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .coupling import Coupling

EULER_GAMMA = 0.57721566490153286061

_SERIES_SWITCH = 0.8     # direct Gauss series below, log-split above
_SERIES_RTOL = 1e-17
_SERIES_MAX_TERMS = 2000


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _kahan_step(total, comp, term):
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def _gauss_series_1mu(mu: float, z: np.ndarray) -> np.ndarray:
    """mu * sum_k z^k / (mu + k), compensated summation."""
    total = np.ones_like(z)
    comp = np.zeros_like(z)
    zk = np.ones_like(z)
    for k in range(1, _SERIES_MAX_TERMS):
        zk = zk * z
        term = mu * zk / (mu + k)
        total, comp = _kahan_step(total, comp, term)
        if np.all(np.abs(term) <= _SERIES_RTOL * np.abs(total)):
            break
    else:
        raise RuntimeError("hypergeometric series did not converge")
    return total


def _log_series_1mu(mu: float, z: np.ndarray) -> np.ndarray:
    """Rearrangement near z=1 splitting off the -log(1-z) divergence.

    2F1(1,mu;1+mu;z) = mu * sum_n (mu)_n/n! * (psi(n+1) - psi(mu+n)
    - log(1-z)) * (1-z)^n, valid for the zero-balanced parameter set.
    """
    w = 1.0 - z
    logw = np.log(w)
    coeff = 1.0                      # (mu)_n / n!
    psi_n = -EULER_GAMMA             # psi(1)
    psi_mun = float(_sp.psi(mu))     # psi(mu)
    total = mu * (psi_n - psi_mun - logw)
    comp = np.zeros_like(z)
    wn = np.ones_like(z)
    for n in range(1, _SERIES_MAX_TERMS):
        coeff *= (mu + n - 1.0) / n
        psi_n += 1.0 / n
        psi_mun += 1.0 / (mu + n - 1.0)
        wn = wn * w
        term = mu * coeff * (psi_n - psi_mun - logw) * wn
        total, comp = _kahan_step(total, comp, term)
        if np.all(np.abs(term) <= _SERIES_RTOL * np.abs(total)):
            break
    else:
        raise RuntimeError("log-split hypergeometric series did not converge")
    return total


def hyp2f1_1mu(mu: float, z):
    """Gauss hypergeometric 2F1(1, mu; 1+mu; z) for 0 < mu, 0 <= z < 1.

    Equals ``mu * sum_k z^k/(mu+k)``; strictly increasing in z and >= 1.
    Relative accuracy is kept at ~1e-13 up to z = 1 - 1e-8 by switching
    to the logarithmic rearrangement for z > 0.8.
    """
    if not mu > 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    z, scalar = _as_float_array(z)
    if np.any(z < 0.0) or np.any(z >= 1.0):
        raise ValueError("argument must satisfy 0 <= z < 1")
    out = np.empty_like(z)
    near = z > _SERIES_SWITCH
    if np.any(~near):
        out[~near] = _gauss_series_1mu(mu, z[~near])
    if np.any(near):
        out[near] = _log_series_1mu(mu, z[near])
    return float(out) if scalar else out


@dataclass(frozen=True)
class HypParams:
    """Parameter set for a real Gauss hypergeometric evaluation."""

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self) -> None:
        if self.c <= 0.0 and float(self.c).is_integer():
            raise ValueError(f"c must not be a non-positive integer, got {self.c}")
        if not (0.0 <= self.z < 1.0):
            raise ValueError(f"argument must lie in [0, 1), got {self.z}")

    def value(self) -> float:
        return float(hyp2f1(self.a, self.b, self.c, self.z))


def hyp2f1(a: float, b: float, c: float, z):
    """Gauss hypergeometric 2F1(a, b; c; z) on z in [0, 1), c > b > 0."""
    if not (c > b > 0.0):
        raise ValueError(f"parameters must satisfy c > b > 0, got b={b}, c={c}")
    z, scalar = _as_float_array(z)
    if np.any(z < 0.0) or np.any(z >= 1.0):
        raise ValueError("argument must satisfy 0 <= z < 1")
    out = _sp.hyp2f1(a, b, c, z)
    return float(out) if scalar else out


def digamma(x):
    """Digamma psi(x) for x > 0."""
    x, scalar = _as_float_array(x)
    if np.any(x <= 0.0):
        raise ValueError("digamma argument must be positive")
    out = _sp.psi(x)
    return float(out) if scalar else out


def dilog(x):
    """Dilogarithm Li2(x) for x <= 1."""
    x, scalar = _as_float_array(x)
    if np.any(x > 1.0):
        raise ValueError("dilogarithm argument must be <= 1")
    out = _sp.spence(1.0 - x)
    return float(out) if scalar else out


def trigamma(x):
    """Trigamma psi'(x), used by tests as an oracle for zeta_lambda."""
    x, scalar = _as_float_array(x)
    out = _sp.polygamma(1, x)
    return float(out) if scalar else out


def _tail_inverse_square(m: float) -> float:
    # Euler-Maclaurin tail of sum_{k>N} (k+x)^{-2} with m = N+1+x.
    return 1.0 / m + 0.5 / m**2 + 1.0 / (6.0 * m**3) - 1.0 / (30.0 * m**5)


def zeta_lambda(coupling: Coupling, n_terms: int = 100_000) -> float:
    """Series constant (1/pi) * sum_k [1/(k+|lam|)^2 + 1/(k-lambda_r)^2].

    Explicit partial sum plus Euler-Maclaurin tail; absolute error is far
    below 1e-12 at the default term count.  Requires |lam| < 1/3 so that
    the second family of denominators stays away from zero.
    """
    al = coupling.abs_lambda
    lr = coupling.lambda_r
    if al >= 1.0 / 3.0:
        raise ValueError("series constant requires |lambda| < 1/3")
    k = np.arange(1, n_terms + 1, dtype=float)
    body = math.fsum((1.0 / (k + al) ** 2 + 1.0 / (k - lr) ** 2).tolist())
    tail = _tail_inverse_square(n_terms + 1.0 + al) + _tail_inverse_square(
        n_terms + 1.0 - lr
    )
    return (body + tail) / math.pi
