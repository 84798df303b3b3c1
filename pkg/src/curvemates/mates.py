"""Analytic natural and conjugate mate apparatus.

The natural mate (tangent = parent principal normal) has

    kappa_bar = omega = sqrt((tau - tau_G)^2 + kappa^2)
    tau_bar   = tau_G + H' / (1 + H^2)

and frames (N, Omega*/omega, Omega/omega) in parent-frame coordinates.  The
conjugate mate (tangent = parent binormal) has kappa* = |tau - tau_G|,
tau* = kappa + tau_G, with frames (B, -sign N, sign T); it is only a Frenet
curve away from zeros of tau - tau_G, so its domain splits into maximal
segments of constant sign.

For expression-form parents the mate curvatures are built as expression
trees, so downstream symbolic derivatives (and second derivatives via
another differentiation) stay exact.  Sampled parents yield sampled mates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import expressions as ex
from .liegroup import GroupSpec, cumulative_quadrature
from .profiles import (CurvatureProfile, FrenetViolation, harmonic_curvature,
                       harmonic_curvature_prime, sigma)

# |tau - tau_G| below this counts as a zero when splitting conjugate segments:
# below finite-difference noise, above accumulated RK4 error.
ZERO_TOL = 1e-9


class NotAFrenetMate(ValueError):
    """tau - tau_G vanishes identically: the conjugate mate degenerates."""

    def __init__(self, message: str, crossings=()):
        super().__init__(message)
        self.crossings = list(crossings)


@dataclass(frozen=True)
class Segment:
    s_min: float
    s_max: float
    sign: int

    def contains(self, s) -> np.ndarray:
        s = np.asarray(s)
        return (s >= self.s_min) & (s <= self.s_max)


@dataclass(frozen=True)
class MateApparatus:
    """Curvature/torsion/frames of a natural or conjugate mate."""

    kind: str                     # "natural" | "conjugate"
    profile: CurvatureProfile     # the mate's own (kappa, tau)
    tau_g: float                  # inherited from the parent group
    parent: CurvatureProfile
    spec: GroupSpec
    segments: tuple[Segment, ...]

    def kappa_at(self, s):
        return self.profile.kappa_at(s)

    def tau_at(self, s):
        return self.profile.tau_at(s)

    def sign_at(self, s):
        """Per-segment sign of tau - tau_G (NaN outside every segment)."""
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, np.nan)
        for seg in self.segments:
            out = np.where(seg.contains(s), float(seg.sign), out)
        return out if s.ndim else float(out)

    def frames_at(self, s):
        """Mate frame rows (T, N, B) in parent-frame coordinates, shape (n, 3) each."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.kind == "natural":
            k = np.atleast_1d(self.parent.kappa_at(s))
            m = np.atleast_1d(self.parent.tau_at(s)) - self.tau_g
            w = np.sqrt(m * m + k * k)
            zero = np.zeros_like(k)
            one = np.ones_like(k)
            t = np.stack([zero, one, zero], axis=1)
            n = np.stack([-k / w, zero, m / w], axis=1)
            b = np.stack([m / w, zero, k / w], axis=1)
            return t, n, b
        sign = np.atleast_1d(self.sign_at(s))
        zero = np.zeros_like(sign)
        one = np.ones_like(sign)
        t = np.stack([zero, zero, one], axis=1)
        n = np.stack([zero, -sign, zero], axis=1)
        b = np.stack([sign, zero, zero], axis=1)
        return t, n, b


def _mate_zero_structure(p: CurvatureProfile, spec: GroupSpec, n: int):
    s = p.grid(n)
    m = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float)) - spec.tau_g
    valid = np.abs(m) > ZERO_TOL
    crossings = []
    for i in range(len(s) - 1):
        if valid[i] and valid[i + 1] and np.sign(m[i]) != np.sign(m[i + 1]):
            # linear interpolation of the crossing
            crossings.append(float(s[i] - m[i] * (s[i + 1] - s[i]) / (m[i + 1] - m[i])))
        elif valid[i] and not valid[i + 1]:
            crossings.append(float(s[i + 1]))
    return s, m, valid, crossings


def _conjugate_segments(p: CurvatureProfile, spec: GroupSpec, n: int):
    s, m, valid, crossings = _mate_zero_structure(p, spec, n)
    if not np.any(valid):
        raise NotAFrenetMate(
            f"tau - tau_G vanishes identically on [{p.s_min}, {p.s_max}]", crossings)
    segments = []
    i = 0
    total = len(s)
    while i < total:
        if not valid[i]:
            i += 1
            continue
        j = i
        while j + 1 < total and valid[j + 1] and np.sign(m[j + 1]) == np.sign(m[i]):
            j += 1
        segments.append(Segment(float(s[i]), float(s[j]), int(np.sign(m[i]))))
        i = j + 1
    return tuple(segments), crossings


def natural_mate_apparatus(p: CurvatureProfile, spec: GroupSpec) -> MateApparatus:
    """Mate curvatures from the parent profile; single validity segment
    (kappa_bar = omega > 0 wherever the parent satisfies the Frenet condition)."""
    tg = spec.tau_g
    if p.is_symbolic:
        m = ex.simplify(ex.Binary("-", p.tau_expr, ex.Num(tg)))
        kb = ex.Unary("sqrt", ex.Binary("+", ex.Binary("^", m, ex.Num(2.0)),
                                        ex.Binary("^", p.kappa_expr, ex.Num(2.0))))
        h = ex.Binary("/", m, p.kappa_expr)
        hp = ex.differentiate(h)
        one_h2 = ex.Binary("+", ex.Num(1.0), ex.Binary("^", h, ex.Num(2.0)))
        tb = ex.simplify(ex.Binary("+", ex.Num(tg), ex.Binary("/", hp, one_h2)))
        mate_profile = CurvatureProfile.from_expressions(ex.simplify(kb), tb, p.domain)
    else:
        s = p.s_grid
        k = p.kappa_samples
        m = p.tau_samples - tg
        h = harmonic_curvature(p, spec, s)
        hp = harmonic_curvature_prime(p, spec, s)
        mate_profile = CurvatureProfile.from_samples(
            s, np.sqrt(m * m + k * k), tg + hp / (1.0 + h * h))
    seg = Segment(p.s_min, p.s_max, 1)
    return MateApparatus("natural", mate_profile, tg, p, spec, (seg,))


def conjugate_mate_apparatus(p: CurvatureProfile, spec: GroupSpec,
                             n: int = 2001) -> MateApparatus:
    """kappa* = |tau - tau_G|, tau* = kappa + tau_G, segmented where
    tau - tau_G changes sign (threshold ZERO_TOL, sign constant per segment)."""
    tg = spec.tau_g
    segments, _ = _conjugate_segments(p, spec, n)
    if p.is_symbolic:
        m = ex.simplify(ex.Binary("-", p.tau_expr, ex.Num(tg)))
        kstar = ex.Unary("abs", m)
        tstar = ex.simplify(ex.Binary("+", p.kappa_expr, ex.Num(tg)))
        mate_profile = CurvatureProfile.from_expressions(kstar, tstar, p.domain)
    else:
        mate_profile = CurvatureProfile.from_samples(
            p.s_grid, np.abs(p.tau_samples - tg), p.kappa_samples + tg)
    return MateApparatus("conjugate", mate_profile, tg, p, spec, segments)


def mate_harmonic_data(m: MateApparatus, spec: GroupSpec
                       ) -> tuple[Callable, Callable]:
    """Harmonic curvature and sigma of the mate, as callables over s.

    Computed from the mate's own profile, so the identities H_bar = 1/sigma
    (natural) and H* = sign/H, sigma* = -sign*sigma (conjugate) hold by
    construction wherever the quantities are defined.
    """
    def h_at(s):
        return harmonic_curvature(m.profile, spec, s)

    def sigma_at(s):
        return sigma(m.profile, spec, s)

    return h_at, sigma_at


def constant_curvature_inverse(tau_bar, c: float, spec: GroupSpec, domain=None,
                               n: int = 2001, phi0: float = 0.0) -> CurvatureProfile:
    """Parent profile of a natural mate with constant curvature c.

    Given the mate torsion law tau_bar(s), the parent is

        kappa       = c cos(phi(s))
        tau - tau_G = c sin(phi(s)),   phi(s) = phi0 + integral of (tau_bar - tau_G)

    with the integral taken by the same cumulative quadrature as the left
    shift.  Returns a sampled profile on an n-point grid.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if domain is None:
        raise ValueError("domain required")
    tb = ex.ensure_expr(tau_bar) if isinstance(tau_bar, (str, float, int)) else tau_bar
    s = np.linspace(float(domain[0]), float(domain[1]), n)
    h = s[1] - s[0]
    if _is_expr(tb):
        values = np.atleast_1d(np.asarray(ex.evaluate(tb, s), dtype=float))
    elif callable(tb):
        values = np.asarray(tb(s), dtype=float)
    else:
        raise TypeError("tau_bar must be an expression or a callable")
    phi = phi0 + cumulative_quadrature(values - spec.tau_g, h)
    kappa = c * np.cos(phi)
    tau = spec.tau_g + c * np.sin(phi)
    if np.any(kappa <= 0):
        good = kappa > 0
        runs = _longest_run(good)
        sub = (float(s[runs[0]]), float(s[runs[1]])) if runs else None
        err = FrenetViolation(
            "recovered kappa <= 0 on the requested domain"
            + (f"; usable subdomain [{sub[0]:.6g}, {sub[1]:.6g}]" if sub else ""))
        err.usable_subdomain = sub
        raise err
    return CurvatureProfile.from_samples(s, kappa, tau)


def _is_expr(x) -> bool:
    return isinstance(x, (ex.Num, ex.Pi, ex.Var, ex.Unary, ex.Binary))


def _longest_run(mask: np.ndarray) -> Optional[tuple[int, int]]:
    best = None
    i = 0
    n = len(mask)
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and mask[j + 1]:
            j += 1
        if best is None or j - i > best[1] - best[0]:
            best = (i, j)
        i = j + 1
    return best
