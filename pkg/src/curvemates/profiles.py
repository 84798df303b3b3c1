"""Curvature/torsion profiles and the derived scalar/vector apparatus.

A profile carries kappa(s) and tau(s) either as expression trees (exact,
with symbolic derivatives) or as uniform samples (derivatives from 5-point
finite-difference stencils, off-grid values from cubic interpolation).
Everything downstream (harmonic curvature H, sigma, the Darboux vectors)
is computed pointwise from these.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import expressions as ex
from .liegroup import GroupSpec

SINGULAR_SIGMA_TOL = 1e-12


class FrenetViolation(ValueError):
    """kappa <= 0 somewhere it must be positive."""

    def __init__(self, message: str, s=None):
        super().__init__(message)
        self.s = s


class SingularSigma(ArithmeticError):
    """H' vanishes: sigma is undefined, the curve is locally a general helix."""


def _derivative_samples(values: np.ndarray, h: float) -> np.ndarray:
    """5-point stencils: central in the interior, one-sided at the two
    boundary pairs.  O(h^4) throughout."""
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if n < 5:
        raise ValueError("5-point stencils need at least 5 samples")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    return d


def _cubic_interp(s_grid: np.ndarray, values: np.ndarray, s) -> np.ndarray:
    """4-point Lagrange cubic on a uniform grid (clamped near the ends)."""
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    sq = np.atleast_1d(s)
    n = s_grid.shape[0]
    h = s_grid[1] - s_grid[0]
    pos = (sq - s_grid[0]) / h
    i = np.clip(np.floor(pos).astype(int), 1, n - 3)
    x = pos - i  # in [0,1] inside the cell, outside when clamped
    fm1, f0, f1, f2 = values[i - 1], values[i], values[i + 1], values[i + 2]
    out = (
        fm1 * (-x * (x - 1.0) * (x - 2.0) / 6.0)
        + f0 * ((x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0)
        + f1 * (-(x + 1.0) * x * (x - 2.0) / 2.0)
        + f2 * ((x + 1.0) * x * (x - 1.0) / 6.0)
    )
    return out[0] if scalar else out


@dataclass(frozen=True)
class CurvatureProfile:
    """(kappa, tau) over a domain, in expression or sampled form."""

    s_min: float
    s_max: float
    kappa_expr: Optional[ex.Expr] = None
    tau_expr: Optional[ex.Expr] = None
    s_grid: Optional[np.ndarray] = field(default=None, repr=False)
    kappa_samples: Optional[np.ndarray] = field(default=None, repr=False)
    tau_samples: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_expressions(cls, kappa, tau, domain) -> "CurvatureProfile":
        s_min, s_max = float(domain[0]), float(domain[1])
        if not s_min < s_max:
            raise ValueError("empty domain")
        return cls(s_min, s_max, kappa_expr=ex.ensure_expr(kappa),
                   tau_expr=ex.ensure_expr(tau))

    @classmethod
    def from_samples(cls, s_grid, kappa_samples, tau_samples) -> "CurvatureProfile":
        s_grid = np.asarray(s_grid, dtype=float)
        if s_grid.shape[0] < 5:
            raise ValueError("sampled profiles need at least 5 points")
        steps = np.diff(s_grid)
        if not np.allclose(steps, steps[0], rtol=0, atol=1e-12 * max(1.0, abs(steps[0]))):
            raise ValueError("sampled profiles require a uniform grid")
        return cls(float(s_grid[0]), float(s_grid[-1]), s_grid=s_grid,
                   kappa_samples=np.asarray(kappa_samples, dtype=float),
                   tau_samples=np.asarray(tau_samples, dtype=float))

    @property
    def is_symbolic(self) -> bool:
        return self.kappa_expr is not None

    @property
    def h(self) -> Optional[float]:
        if self.s_grid is None:
            return None
        return float(self.s_grid[1] - self.s_grid[0])

    @property
    def domain(self) -> tuple[float, float]:
        return (self.s_min, self.s_max)

    def kappa_at(self, s):
        if self.is_symbolic:
            return ex.evaluate(self.kappa_expr, s)
        return _cubic_interp(self.s_grid, self.kappa_samples, s)

    def tau_at(self, s):
        if self.is_symbolic:
            return ex.evaluate(self.tau_expr, s)
        return _cubic_interp(self.s_grid, self.tau_samples, s)

    def kappa_prime_at(self, s):
        if self.is_symbolic:
            return ex.evaluate(ex.differentiate(self.kappa_expr), s)
        d = _derivative_samples(self.kappa_samples, self.h)
        return _cubic_interp(self.s_grid, d, s)

    def tau_prime_at(self, s):
        if self.is_symbolic:
            return ex.evaluate(ex.differentiate(self.tau_expr), s)
        d = _derivative_samples(self.tau_samples, self.h)
        return _cubic_interp(self.s_grid, d, s)

    def grid(self, n: int = 2001) -> np.ndarray:
        if self.s_grid is not None and n == self.s_grid.shape[0]:
            return self.s_grid
        return np.linspace(self.s_min, self.s_max, n)

    def restricted(self, s_min: float, s_max: float) -> "CurvatureProfile":
        """Same data on a subdomain (symbolic form only)."""
        if not self.is_symbolic:
            raise ValueError("restriction is only supported for symbolic profiles")
        return CurvatureProfile.from_expressions(self.kappa_expr, self.tau_expr,
                                                 (s_min, s_max))


def frenet_scan(p: CurvatureProfile, n: int = 1001, tol: float = 1e-12):
    """Check kappa > tol on an evaluation grid.

    Returns (ok, trimmed_domain): when violations are confined to the ends,
    the suggested trimmed domain still covers the positive part; a violation
    in the interior yields ok=False with trimmed_domain=None.
    """
    s = p.grid(n)
    kappa = np.atleast_1d(p.kappa_at(s))
    good = kappa > tol
    if np.all(good):
        return True, (p.s_min, p.s_max)
    idx = np.nonzero(good)[0]
    if idx.size == 0:
        return False, None
    lo, hi = idx[0], idx[-1]
    if not np.all(good[lo:hi + 1]):
        return False, None
    return False, (float(s[lo]), float(s[hi]))


# ---------------------------------------------------------------------------
# derived apparatus

def harmonic_curvature(p: CurvatureProfile, spec: GroupSpec, s):
    """(tau - tau_G)/kappa; requires kappa > 0."""
    kappa = p.kappa_at(s)
    if np.any(np.atleast_1d(kappa) <= 0):
        raise FrenetViolation("kappa <= 0 inside the domain", s)
    return (p.tau_at(s) - spec.tau_g) / kappa


def harmonic_curvature_prime(p: CurvatureProfile, spec: GroupSpec, s):
    """dH/ds via the quotient rule from the profile derivatives."""
    kappa = p.kappa_at(s)
    m = p.tau_at(s) - spec.tau_g
    return (p.tau_prime_at(s) * kappa - m * p.kappa_prime_at(s)) / kappa**2


def sigma(p: CurvatureProfile, spec: GroupSpec, s):
    """kappa (H^2+1)^(3/2) / H'; raises SingularSigma where H' vanishes."""
    hp = harmonic_curvature_prime(p, spec, s)
    if np.any(np.abs(np.atleast_1d(hp)) <= SINGULAR_SIGMA_TOL):
        raise SingularSigma("H' vanishes; curve is locally a general helix")
    h = harmonic_curvature(p, spec, s)
    return p.kappa_at(s) * (h * h + 1.0) ** 1.5 / hp


def omega(p: CurvatureProfile, spec: GroupSpec, s):
    """Length of the extrinsic Darboux vector: sqrt((tau-tau_G)^2 + kappa^2)."""
    m = p.tau_at(s) - spec.tau_g
    k = p.kappa_at(s)
    return np.sqrt(m * m + k * k)


def darboux_vectors(p: CurvatureProfile, spec: GroupSpec, s):
    """(D, Omega, Omega*) as coefficient triples in the (T, N, B) frame.

    D = (tau, 0, kappa) drives the covariant-derivative rotation; Omega =
    (tau - tau_G, 0, kappa) the plain-derivative one; Omega* = N'.
    """
    k = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    tau = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float))
    m = tau - spec.tau_g
    zero = np.zeros_like(k)
    d = np.stack([tau, zero, k], axis=-1)
    big = np.stack([m, zero, k], axis=-1)
    costar = np.stack([-k, zero, m], axis=-1)
    if np.ndim(s) == 0:
        return d[0], big[0], costar[0]
    return d, big, costar


@dataclass(frozen=True)
class ApparatusSample:
    """All per-point scalar/vector apparatus at one parameter value."""

    s: float
    kappa: float
    tau: float
    tau_g: float
    H: float
    H_prime: float
    sigma: Optional[float]  # None where H' vanishes
    omega: float
    D: np.ndarray
    Omega: np.ndarray
    Omega_star: np.ndarray


def apparatus_sample(p: CurvatureProfile, spec: GroupSpec, s: float) -> ApparatusSample:
    s = float(s)
    kappa = float(p.kappa_at(s))
    tau = float(p.tau_at(s))
    h = float(harmonic_curvature(p, spec, s))
    hp = float(harmonic_curvature_prime(p, spec, s))
    try:
        sig = float(sigma(p, spec, s))
    except SingularSigma:
        sig = None
    d, big, costar = darboux_vectors(p, spec, s)
    return ApparatusSample(s, kappa, tau, spec.tau_g, h, hp, sig,
                           float(omega(p, spec, s)), d, big, costar)
