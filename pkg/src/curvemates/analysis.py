"""Independent apparatus estimation, classification, and verification harness.

The estimator reconstructs (kappa, tau, tau_G) from sampled group-valued
positions alone, so it can cross-check everything the synthesis pipeline
produces.  Differentiation uses least-squares quartic filters on a sliding
window (window 5 is the classical 5-point stencil); wider windows keep the
O(h^4) truncation order while cutting the float64 round-off amplification
of the nested third-derivative pipeline roughly 30x, which the refinement
tolerances require.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .integrate import (FrameTrajectory, PositionCurve, integrate_direction_curve,
                        integrate_frame, reconstruct_position)
from .liegroup import GroupSpec
from .mates import (MateApparatus, Segment, ZERO_TOL, conjugate_mate_apparatus,
                    natural_mate_apparatus)
from .profiles import (SINGULAR_SIGMA_TOL, CurvatureProfile,
                       harmonic_curvature, harmonic_curvature_prime)

DEFAULT_WINDOW = 11


class EstimationError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


# ---------------------------------------------------------------------------
# tolerances

@dataclass(frozen=True)
class ToleranceSet:
    """Every tolerance used by classification and verification.

    Two presets reflect two noise floors: exactly evaluated profiles versus
    apparatus estimated from integrated positions.
    """

    constancy: float = 1e-6          # relative spread counting as constant
    residual: float = 1e-8           # identity / radius residuals
    spherical_spread: float = 1e-6   # relative spread of the sphere function R
    spherical_residual: float = 1e-6 # closure residual of the sphere criterion
    zero: float = ZERO_TOL           # |tau - tau_G| treated as zero
    spherical_zero_rel: float = 0.0  # sphere-ratio mask floor, relative to max|tau - tau_G|
    rectifying_slope_min: float = 1e-6
    tangent: float = 1e-5            # mate tangent agreement
    bertrand: float = 1e-4           # principal-normal collinearity
    orthogonality: float = 1e-5

    @classmethod
    def analytic(cls) -> "ToleranceSet":
        return cls()

    @classmethod
    def estimated(cls) -> "ToleranceSet":
        return cls(constancy=1e-3, residual=1e-3,
                   spherical_spread=1e-3, spherical_residual=1e-3,
                   spherical_zero_rel=1e-3)

    def as_dict(self) -> dict:
        return {
            "constancy": self.constancy,
            "residual": self.residual,
            "spherical_spread": self.spherical_spread,
            "spherical_residual": self.spherical_residual,
            "zero": self.zero,
            "spherical_zero_rel": self.spherical_zero_rel,
            "rectifying_slope_min": self.rectifying_slope_min,
            "tangent": self.tangent,
            "bertrand": self.bertrand,
            "orthogonality": self.orthogonality,
        }


def rel_spread(x) -> float:
    """(max - min) over max(1, |mean|)."""
    x = np.asarray(x, dtype=float)
    return float((np.max(x) - np.min(x)) / max(1.0, abs(float(np.mean(x)))))


# ---------------------------------------------------------------------------
# sliding-window differentiation

@lru_cache(maxsize=None)
def _sg_coeffs(window: int, offset: int, deriv: int, degree: int = 4) -> tuple:
    x = np.arange(window, dtype=float) - float(offset)
    a = np.vander(x, degree + 1, increasing=True)
    return tuple((np.linalg.pinv(a)[deriv] * math.factorial(deriv)).tolist())


def sg_derivative(values: np.ndarray, h: float, window: int = DEFAULT_WINDOW,
                  deriv: int = 1) -> np.ndarray:
    """Derivative along axis 0 by least-squares quartic fit over ``window``
    points (odd, >= 5); exact for quartics, one-sided windows at the ends."""
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if window % 2 == 0:
        raise ValueError("window must be odd")
    if n < window:
        raise ValueError(f"need at least {window} samples")
    half = window // 2
    flat = f.reshape(n, -1)
    out = np.empty_like(flat)
    w = np.asarray(_sg_coeffs(window, half, deriv))
    sw = np.lib.stride_tricks.sliding_window_view(flat, window, axis=0)
    out[half:n - half] = np.einsum("ncw,w->nc", sw, w)
    for p in range(half):
        wp = np.asarray(_sg_coeffs(window, p, deriv))
        out[p] = flat[:window].T @ wp
        wq = np.asarray(_sg_coeffs(window, window - 1 - p, deriv))
        out[n - 1 - p] = flat[n - window:].T @ wq
    return (out / h ** deriv).reshape(f.shape)


def _quat_mul_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    pw, pv = p[:, :1], p[:, 1:]
    qw, qv = q[:, :1], q[:, 1:]
    w = pw * qw - np.sum(pv * qv, axis=1, keepdims=True)
    v = pw * qv + qw * pv + np.cross(pv, qv)
    return np.concatenate([w, v], axis=1)


def _pull_back_rows(positions: np.ndarray, dpos: np.ndarray, spec: GroupSpec) -> np.ndarray:
    if spec.family == "r3":
        return dpos
    if spec.family == "s3":
        conj = positions * np.array([1.0, -1.0, -1.0, -1.0])
        return _quat_mul_rows(conj, dpos)[:, 1:]
    a = np.einsum("nja,njb->nab", positions, dpos)
    skew = 0.5 * (a - np.transpose(a, (0, 2, 1)))
    return np.stack([skew[:, 2, 1], skew[:, 0, 2], skew[:, 1, 0]], axis=1)


# ---------------------------------------------------------------------------
# apparatus estimation

@dataclass
class EstimatedApparatus:
    """Frenet data recovered from positions only."""

    s: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    tau_g: np.ndarray
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    valid: np.ndarray      # interior mask clear of one-sided stencil margins
    spec: GroupSpec
    window: int


def estimate_apparatus(curve, spec: GroupSpec,
                       window: int = DEFAULT_WINDOW) -> EstimatedApparatus:
    """Estimate (kappa, tau, tau_G) and frames from sampled positions.

    The tangent comes from differentiating positions and pulling back by
    left translation; kappa = |t'| (the bracket term vanishes along t),
    N = t'/kappa, B = T x N, tau = <N' + (1/2)[T, N], B>.
    """
    s = np.asarray(curve.s, dtype=float)
    positions = np.asarray(curve.positions, dtype=float)
    n = s.shape[0]
    if n < 9:
        raise EstimationError("need at least 9 samples")
    window = min(window, n if n % 2 else n - 1)
    window = max(window, 5)
    h = float(s[1] - s[0])

    dpos = sg_derivative(positions, h, window)
    t = _pull_back_rows(positions, dpos, spec)
    tp = sg_derivative(t, h, window)
    kappa = np.linalg.norm(tp, axis=1)

    half = window // 2
    margin = 3 * half
    valid = np.zeros(n, dtype=bool)
    if n > 2 * margin:
        valid[margin:n - margin] = True
    if np.any(kappa[valid] < 1e-9):
        raise EstimationError("kappa below 1e-9 on an interior window; "
                              "not a Frenet curve there")
    kappa_safe = np.where(kappa < 1e-300, 1.0, kappa)
    that = t / np.linalg.norm(t, axis=1, keepdims=True)
    nhat = tp / kappa_safe[:, None]
    bhat = np.cross(that, nhat)
    bhat = bhat / np.linalg.norm(bhat, axis=1, keepdims=True)
    nprime = sg_derivative(nhat, h, window)
    tn_bracket = spec.lam * np.cross(that, nhat)
    tau_g = 0.5 * np.sum(tn_bracket * bhat, axis=1)
    tau = np.sum((nprime + 0.5 * tn_bracket) * bhat, axis=1)
    return EstimatedApparatus(s=s, kappa=kappa, tau=tau, tau_g=tau_g,
                              t=that, n=nhat, b=bhat, valid=valid,
                              spec=spec, window=window)


def synthesize_estimated_profile(p: CurvatureProfile, spec: GroupSpec, h: float,
                                 mate: Optional[str] = None,
                                 window: int = DEFAULT_WINDOW
                                 ) -> tuple[CurvatureProfile, EstimatedApparatus]:
    """Integrate the profile, reconstruct positions (optionally of a mate
    direction curve), estimate the apparatus, and package the valid interior
    as a sampled profile."""
    traj = integrate_frame(p, spec, p.s_min, p.s_max, h)
    traj = reconstruct_position(traj, spec)
    if mate is None:
        curve = traj
    elif mate == "natural":
        curve = integrate_direction_curve(traj, "principal_normal", spec)
    elif mate == "conjugate":
        curve = integrate_direction_curve(traj, "binormal", spec)
    else:
        raise ValueError("mate must be None, 'natural' or 'conjugate'")
    est = estimate_apparatus(curve, spec, window)
    idx = np.nonzero(est.valid)[0]
    prof = CurvatureProfile.from_samples(est.s[idx], est.kappa[idx], est.tau[idx])
    return prof, est


# ---------------------------------------------------------------------------
# spherical criterion

@dataclass
class SphericalSegment:
    s_min: float
    s_max: float
    case: str                 # "constant_kappa" | "general"
    is_spherical: bool
    radius: Optional[float]
    spread: float
    eq_residual: Optional[float]             # derivative form of the closure
    eq_residual_integrated: Optional[float] = None


@dataclass
class SphericalReport:
    is_spherical: bool
    radius: Optional[float]
    segments: list[SphericalSegment]
    spread_tol: float
    residual_tol: float
    trace: Optional[tuple[np.ndarray, np.ndarray]] = None  # (s, closure residual)

    @property
    def max_eq_residual(self) -> Optional[float]:
        """Worst decisive closure residual (the smaller of the two forms)."""
        vals = []
        for seg in self.segments:
            forms = [v for v in (seg.eq_residual, seg.eq_residual_integrated)
                     if v is not None]
            if forms:
                vals.append(min(forms))
        return max(vals) if vals else None


def spherical_check(p: CurvatureProfile, spec: GroupSpec,
                    tol: Optional[ToleranceSet] = None,
                    n: int = 2001) -> SphericalReport:
    """Left-shift-on-a-sphere criterion from the curvature data.

    Where tau - tau_G vanishes identically the curve is spherical iff kappa
    is constant (r = 1/kappa).  Elsewhere the sphere function

        R = ((1/kappa)' / (tau - tau_G))^2 + (1/kappa)^2

    must be constant (r = sqrt(R)) AND the closure residual

        ((1/kappa)' / (tau - tau_G))' + H

    must vanish; R-constancy alone is not decisive when kappa is constant,
    so both are enforced.  The closure is accepted in derivative form or in
    integrated form (u(s) - u(s0) + integral of H, per unit length); the
    latter tolerates the noise amplification that differentiating sampled
    estimates incurs.  Mixed domains are segmented and reported per segment.
    """
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    h = float(s[1] - s[0])
    kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    m = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float)) - spec.tau_g
    kp = np.atleast_1d(np.asarray(p.kappa_prime_at(s), dtype=float))
    zero = np.abs(m) <= tol.zero
    stat_floor = max(tol.zero, tol.spherical_zero_rel * float(np.max(np.abs(m))))

    segments: list[SphericalSegment] = []
    trace = np.full(n, np.nan)

    # split into maximal runs; zero-runs shorter than 3 samples are treated
    # as masked points inside a surrounding general run
    runs = _runs(zero)
    merged: list[tuple[int, int, str]] = []
    for i0, i1, flag in runs:
        kind = "zero" if flag else "general"
        if flag and (i1 - i0 + 1) < 3:
            kind = "general"
        if merged and kind == "general" and merged[-1][2] == "general":
            merged[-1] = (merged[-1][0], i1, "general")
        else:
            merged.append((i0, i1, kind))

    hvals = np.atleast_1d(harmonic_curvature(p, spec, s))
    for i0, i1, kind in merged:
        sl = slice(i0, i1 + 1)
        if kind == "zero":
            spread = rel_spread(kappa[sl])
            ok = spread <= tol.constancy
            radius = 1.0 / float(np.mean(kappa[sl])) if ok else None
            segments.append(SphericalSegment(float(s[i0]), float(s[i1]),
                                             "constant_kappa", ok, radius,
                                             spread, None))
            continue
        mask = np.abs(m[sl]) > stat_floor
        if not np.any(mask):
            segments.append(SphericalSegment(float(s[i0]), float(s[i1]),
                                             "general", False, None,
                                             float("inf"), None))
            continue
        inv_k = 1.0 / kappa[sl]
        dinv_k = -kp[sl] / kappa[sl] ** 2
        u = np.where(mask, dinv_k / np.where(mask, m[sl], 1.0), np.nan)
        r_fun = u * u + inv_k * inv_k
        r_vals = r_fun[mask]
        r_mean = float(np.mean(r_vals))
        spread = float(np.max(np.abs(r_vals - r_mean)) / r_mean)
        resid = _masked_derivative(u, h)
        resid = resid + hvals[sl]
        trace[sl] = resid
        eq_res = float(np.nanmax(np.abs(resid))) if np.any(~np.isnan(resid)) else None
        eq_int = _integrated_closure(u, hvals[sl], h)
        closure_ok = ((eq_res is not None and eq_res <= tol.spherical_residual)
                      or (eq_int is not None and eq_int <= tol.spherical_residual))
        ok = spread <= tol.spherical_spread and closure_ok
        segments.append(SphericalSegment(float(s[i0]), float(s[i1]), "general",
                                         ok, math.sqrt(r_mean) if ok else None,
                                         spread, eq_res, eq_int))

    radii = [seg.radius for seg in segments if seg.radius is not None]
    all_ok = all(seg.is_spherical for seg in segments) and bool(segments)
    consistent = True
    if len(radii) > 1:
        consistent = (max(radii) - min(radii)) <= tol.spherical_spread * max(radii)
    is_spherical = all_ok and consistent and bool(radii)
    radius = float(np.mean(radii)) if is_spherical else (radii[0] if radii else None)
    return SphericalReport(is_spherical, radius, segments, tol.spherical_spread,
                           tol.spherical_residual, trace=(s, trace))


def _runs(mask: np.ndarray) -> list[tuple[int, int, bool]]:
    out = []
    i, n = 0, len(mask)
    while i < n:
        j = i
        while j + 1 < n and mask[j + 1] == mask[i]:
            j += 1
        out.append((i, j, bool(mask[i])))
        i = j + 1
    return out


def _masked_derivative(u: np.ndarray, h: float) -> np.ndarray:
    """5-point central derivative, NaN wherever the window touches a NaN."""
    n = len(u)
    out = np.full(n, np.nan)
    if n >= 5:
        core = (u[:-4] - 8.0 * u[1:-3] + 8.0 * u[3:-1] - u[4:]) / (12.0 * h)
        out[2:-2] = core
    return out


def _integrated_closure(u: np.ndarray, hvals: np.ndarray, h: float) -> Optional[float]:
    """Closure residual in integrated form, per unit length, worst over the
    contiguous unmasked runs of u."""
    from .liegroup import cumulative_quadrature
    ok = ~np.isnan(u)
    worst = None
    for i0, i1, flag in _runs(ok):
        if not flag or i1 - i0 + 1 < 3:
            continue
        seg_u = u[i0:i1 + 1]
        seg_h = cumulative_quadrature(hvals[i0:i1 + 1], h)
        drift = seg_u - seg_u[0] + seg_h
        length = max(1.0, (i1 - i0) * h)
        val = float(np.max(np.abs(drift)) / length)
        worst = val if worst is None else max(worst, val)
    return worst


# ---------------------------------------------------------------------------
# sphere fit of a sampled algebra curve

@dataclass
class SphereFit:
    center: np.ndarray
    radius: float
    rms: float


def left_shift_sphere_fit(alpha: np.ndarray) -> SphereFit:
    """Algebraic least-squares sphere through sampled algebra points.

    Solves 2 p.c + (r^2 - |c|^2) = |p|^2 linearly; the fitted center is
    reported rather than assumed central."""
    pts = np.asarray(alpha, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 4:
        raise DegenerateFitError("need at least 4 three-dimensional samples")
    a = np.concatenate([2.0 * pts, np.ones((pts.shape[0], 1))], axis=1)
    b = np.sum(pts * pts, axis=1)
    sol, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 4:
        raise DegenerateFitError("degenerate sample geometry (rank < 4)")
    center = sol[:3]
    r2 = sol[3] + center @ center
    if r2 <= 0:
        raise DegenerateFitError("negative squared radius")
    radius = math.sqrt(r2)
    rms = float(np.sqrt(np.mean((np.linalg.norm(pts - center, axis=1) - radius) ** 2)))
    return SphereFit(center, radius, rms)


# ---------------------------------------------------------------------------
# classification

@dataclass
class Verdict:
    passed: bool
    residual: Optional[float]
    tolerance: float
    note: str = ""


@dataclass
class ClassificationReport:
    verdicts: dict[str, Verdict]
    spherical: SphericalReport
    segments: tuple[Segment, ...]
    tolerances: ToleranceSet


def classify(p: CurvatureProfile, spec: GroupSpec,
             tol: Optional[ToleranceSet] = None, n: int = 2001) -> ClassificationReport:
    """Verdicts with residuals for every special-curve class."""
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    tau = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float))
    hvals = harmonic_curvature(p, spec, s)
    hp = harmonic_curvature_prime(p, spec, s)

    verdicts: dict[str, Verdict] = {}

    h_spread = rel_spread(hvals)
    verdicts["general_helix"] = Verdict(h_spread <= tol.constancy, h_spread, tol.constancy)

    if np.min(np.abs(hp)) <= SINGULAR_SIGMA_TOL:
        verdicts["slant_helix"] = Verdict(False, None, tol.constancy,
                                          "H' vanishes; sigma undefined")
    else:
        sig = kappa * (hvals * hvals + 1.0) ** 1.5 / hp
        sig_spread = rel_spread(sig)
        verdicts["slant_helix"] = Verdict(sig_spread <= tol.constancy,
                                          sig_spread, tol.constancy)

    design = np.vstack([s, np.ones_like(s)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, hvals, rcond=None)
    fit_rms = float(np.sqrt(np.mean((hvals - design @ [slope, intercept]) ** 2)))
    h_range = float(np.max(hvals) - np.min(hvals))
    rect_ok = (fit_rms <= tol.constancy * max(h_range, 1e-300)
               and abs(slope) >= tol.rectifying_slope_min)
    verdicts["rectifying"] = Verdict(
        rect_ok, fit_rms / max(h_range, 1e-300), tol.constancy,
        f"H fit slope {slope:.6g}")

    sph = spherical_check(p, spec, tol, n)
    worst = max((seg.spread for seg in sph.segments), default=float("inf"))
    verdicts["spherical"] = Verdict(sph.is_spherical, worst, tol.spherical_spread,
                                    f"radius {sph.radius}" if sph.radius else "")

    k_spread = rel_spread(kappa)
    t_spread = rel_spread(tau)
    verdicts["salkowski"] = Verdict(
        k_spread <= tol.constancy < t_spread, k_spread, tol.constancy)
    verdicts["anti_salkowski"] = Verdict(
        t_spread <= tol.constancy < k_spread, t_spread, tol.constancy)
    verdicts["circular_helix"] = Verdict(
        k_spread <= tol.constancy and t_spread <= tol.constancy,
        max(k_spread, t_spread), tol.constancy)

    m = tau - spec.tau_g
    segments = _sign_segments(s, m, tol.zero)
    return ClassificationReport(verdicts, sph, segments, tol)


def _sign_segments(s: np.ndarray, m: np.ndarray, zero_tol: float) -> tuple[Segment, ...]:
    valid = np.abs(m) > zero_tol
    out = []
    i, n = 0, len(s)
    while i < n:
        if not valid[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and valid[j + 1] and np.sign(m[j + 1]) == np.sign(m[i]):
            j += 1
        out.append(Segment(float(s[i]), float(s[j]), int(np.sign(m[i]))))
        i = j + 1
    return tuple(out)


# ---------------------------------------------------------------------------
# verification reports

@dataclass
class VerificationReport:
    theorem: str
    applicable: bool
    passed: bool
    max_residual: Optional[float]
    tolerance: float
    details: dict = field(default_factory=dict)
    hypothesis_note: str = ""
    trace: Optional[tuple[np.ndarray, np.ndarray]] = None

    @property
    def ok(self) -> bool:
        """True when passed, or correctly flagged not-applicable."""
        return self.passed or not self.applicable


def _not_applicable(theorem: str, tolerance: float, note: str) -> VerificationReport:
    return VerificationReport(theorem, False, False, None, tolerance,
                              hypothesis_note=note)


def verify_thm_4_1(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """Constant parent curvature c => natural mate spherical with radius 1/c.

    The converse is checked on the same data wherever the mate torsion
    differs from the group torsion."""
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    spread = rel_spread(kappa)
    if spread > tol.constancy:
        return _not_applicable("thm4_1", tol.residual,
                               f"kappa not constant (spread {spread:.3g})")
    c = float(np.mean(kappa))
    mate = natural_mate_apparatus(p, spec)
    sph = spherical_check(mate.profile, spec, tol, n)
    if not sph.is_spherical or sph.radius is None:
        return VerificationReport("thm4_1", True, False, None, tol.residual,
                                  {"c": c, "spherical": False},
                                  hypothesis_note="mate not spherical")
    radius_residual = abs(sph.radius - 1.0 / c)
    eq_res = sph.max_eq_residual or 0.0
    residual = max(radius_residual, eq_res)
    details = {"c": c, "radius": sph.radius, "expected_radius": 1.0 / c,
               "radius_residual": radius_residual, "closure_residual": eq_res}
    # converse: on samples with mate torsion away from tau_G, spherical radius
    # 1/c must force kappa = c (tested as consistency of the same numbers)
    mate_m = np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float)) - spec.tau_g
    conv_mask = np.abs(mate_m) > tol.zero
    if np.any(conv_mask):
        details["converse_kappa_residual"] = float(
            np.max(np.abs(kappa[conv_mask] - 1.0 / sph.radius)))
        residual = max(residual, details["converse_kappa_residual"])
    return VerificationReport("thm4_1", True, residual <= tol.residual,
                              residual, tol.residual, details, trace=sph.trace)


def verify_thm_5_1(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 8001) -> VerificationReport:
    """Constant mate curvature c => parent recovered by the sine/cosine
    quadrature inverse (round trip against the original profile)."""
    tol = tol or ToleranceSet.analytic()
    mate = natural_mate_apparatus(p, spec)
    s = p.grid(n)
    kb = np.atleast_1d(np.asarray(mate.profile.kappa_at(s), dtype=float))
    spread = rel_spread(kb)
    if spread > tol.constancy:
        return _not_applicable("thm5_1", tol.residual,
                               f"mate curvature not constant (spread {spread:.3g})")
    c = float(np.mean(kb))
    phi0 = math.atan2(float(p.tau_at(p.s_min)) - spec.tau_g, float(p.kappa_at(p.s_min)))
    rec = constant_curvature_inverse_profile(mate, c, spec, n=n, phi0=phi0)
    sg = rec.s_grid[4:-4]
    res_k = np.max(np.abs(rec.kappa_samples[4:-4] - np.asarray(p.kappa_at(sg))))
    res_t = np.max(np.abs(rec.tau_samples[4:-4] - np.asarray(p.tau_at(sg))))
    residual = float(max(res_k, res_t))
    return VerificationReport("thm5_1", True, residual <= tol.residual, residual,
                              tol.residual, {"c": c, "phi0": phi0,
                                             "kappa_residual": float(res_k),
                                             "tau_residual": float(res_t)})


def constant_curvature_inverse_profile(mate: MateApparatus, c: float,
                                       spec: GroupSpec, n: int = 8001,
                                       phi0: float = 0.0) -> CurvatureProfile:
    from .mates import constant_curvature_inverse
    return constant_curvature_inverse(lambda s: np.asarray(mate.profile.tau_at(s)),
                                      c, spec, domain=mate.profile.domain,
                                      n=n, phi0=phi0)


def _golden_section(fun: Callable[[float], float], lo: float, hi: float,
                    iters: int = 60) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - inv_phi * (b - a)
    c2 = a + inv_phi * (b - a)
    f1, f2 = fun(c1), fun(c2)
    for _ in range(iters):
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - inv_phi * (b - a)
            f1 = fun(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + inv_phi * (b - a)
            f2 = fun(c2)
    x = 0.5 * (a + b)
    return x, fun(x)


def verify_thm_5_2(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """Spherical parent with constant-curvature mate: |mate torsion - tau_G|
    matches the closed trigonometric law with a = c^2 r, up to one fitted
    s-translation."""
    tol = tol or ToleranceSet.analytic()
    sph = spherical_check(p, spec, tol, n)
    if not sph.is_spherical or sph.radius is None:
        return _not_applicable("thm5_2", tol.residual, "parent not spherical")
    mate = natural_mate_apparatus(p, spec)
    s = p.grid(n)
    kb = np.atleast_1d(np.asarray(mate.profile.kappa_at(s), dtype=float))
    spread = rel_spread(kb)
    if spread > tol.constancy:
        return _not_applicable("thm5_2", tol.residual,
                               f"mate curvature not constant (spread {spread:.3g})")
    c = float(np.mean(kb))
    r = float(sph.radius)
    a = c * c * r
    if a < c - 1e-12:
        return VerificationReport("thm5_2", True, False, None, tol.residual,
                                  {"a": a, "c": c},
                                  hypothesis_note="a < c is impossible")
    lhs = np.abs(np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float))
                 - spec.tau_g)
    gap = a * a - c * c

    def sup_residual(delta: float) -> float:
        arg = c * (s + delta)
        target = np.abs(c * c * math.sqrt(max(gap, 0.0)) * np.cos(arg)
                        / (c * c + gap * np.sin(arg) ** 2))
        return float(np.max(np.abs(lhs - target)))

    period = math.pi / c
    coarse = np.linspace(0.0, period, 65)
    best = min(coarse, key=sup_residual)
    lo, hi = best - period / 64, best + period / 64
    delta, residual = _golden_section(sup_residual, lo, hi)
    passed = residual <= tol.residual
    return VerificationReport("thm5_2", True, passed, residual, tol.residual,
                              {"a": a, "c": c, "r": r, "phase": delta})


def verify_thm_6_2(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """tau - tau_G constant nonzero => natural mate spherical with radius 1/|c|."""
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    m = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float)) - spec.tau_g
    spread = float(np.max(m) - np.min(m)) / max(1.0, abs(float(np.mean(m))))
    if spread > tol.constancy:
        return _not_applicable("thm6_2", tol.residual,
                               f"tau - tau_G not constant (spread {spread:.3g})")
    c = float(np.mean(m))
    if abs(c) <= tol.zero:
        return _not_applicable("thm6_2", tol.residual, "tau - tau_G vanishes")
    mate = natural_mate_apparatus(p, spec)
    sph = spherical_check(mate.profile, spec, tol, n)
    if not sph.is_spherical or sph.radius is None:
        return VerificationReport("thm6_2", True, False, None, tol.residual,
                                  {"c": c}, hypothesis_note="mate not spherical")
    radius_residual = abs(sph.radius - 1.0 / abs(c))
    eq_res = sph.max_eq_residual or 0.0
    residual = max(radius_residual, eq_res)
    return VerificationReport("thm6_2", True, residual <= tol.residual, residual,
                              tol.residual,
                              {"c": c, "radius": sph.radius,
                               "expected_radius": 1.0 / abs(c),
                               "closure_residual": eq_res}, trace=sph.trace)


# ---------------------------------------------------------------------------
# corollary biconditionals

def _mate_flatness(p: CurvatureProfile, spec: GroupSpec, n: int) -> float:
    mate = natural_mate_apparatus(p, spec)
    s = p.grid(n)
    return float(np.max(np.abs(
        np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float)) - spec.tau_g)))


def verify_cor_3_1(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """General helix <=> mate torsion equals the group torsion."""
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    h_spread = rel_spread(harmonic_curvature(p, spec, s))
    is_gh = h_spread <= tol.constancy
    mate_dev = _mate_flatness(p, spec, n)
    mate_flat = mate_dev <= tol.zero
    passed = is_gh == mate_flat
    return VerificationReport("cor3_1", True, passed,
                              mate_dev if is_gh else h_spread, tol.zero,
                              {"general_helix": is_gh, "H_spread": h_spread,
                               "mate_torsion_deviation": mate_dev})


def _slant_verdict(p: CurvatureProfile, spec: GroupSpec, tol: ToleranceSet,
                   n: int) -> tuple[bool, Optional[float]]:
    s = p.grid(n)
    hp = np.atleast_1d(harmonic_curvature_prime(p, spec, s))
    if np.min(np.abs(hp)) <= SINGULAR_SIGMA_TOL:
        return False, None
    h = harmonic_curvature(p, spec, s)
    kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    sig = kappa * (h * h + 1.0) ** 1.5 / hp
    spread = rel_spread(sig)
    return spread <= tol.constancy, spread


def verify_cor_3_2(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """Slant helix <=> natural mate is a general helix."""
    tol = tol or ToleranceSet.analytic()
    slant, sig_spread = _slant_verdict(p, spec, tol, n)
    mate = natural_mate_apparatus(p, spec)
    s = p.grid(n)
    mate_h_spread = rel_spread(harmonic_curvature(mate.profile, spec, s))
    mate_gh = mate_h_spread <= tol.constancy
    return VerificationReport("cor3_2", True, slant == mate_gh,
                              mate_h_spread, tol.constancy,
                              {"slant": slant, "sigma_spread": sig_spread,
                               "mate_H_spread": mate_h_spread,
                               "mate_general_helix": mate_gh})


def verify_cor_3_3(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """Rectifying (H linear, slope a != 0) <=> a kappa^2 = (mate tau - tau_G)
    * mate kappa^2."""
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    h = np.atleast_1d(harmonic_curvature(p, spec, s))
    design = np.vstack([s, np.ones_like(s)]).T
    (a, b), *_ = np.linalg.lstsq(design, h, rcond=None)
    fit_rms = float(np.sqrt(np.mean((h - design @ [a, b]) ** 2)))
    h_range = float(np.max(h) - np.min(h))
    rectifying = (fit_rms <= tol.constancy * max(h_range, 1e-300)
                  and abs(a) >= tol.rectifying_slope_min)
    mate = natural_mate_apparatus(p, spec)
    kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    kb = np.atleast_1d(np.asarray(mate.profile.kappa_at(s), dtype=float))
    tb = np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float))
    residual = float(np.max(np.abs(a * kappa ** 2 - (tb - spec.tau_g) * kb ** 2)))
    # the identity side carries the same nonzero-slope hypothesis: a = 0
    # satisfies it only trivially
    identity_ok = residual <= tol.residual and abs(a) >= tol.rectifying_slope_min
    return VerificationReport("cor3_3", True, rectifying == identity_ok, residual,
                              tol.residual,
                              {"rectifying": rectifying, "slope": float(a),
                               "identity_ok": identity_ok})


DISCRIMINANT_FLOOR = 1e-10


def _signed_sqrt_residual(lhs: np.ndarray, base: np.ndarray, disc: np.ndarray,
                          mask: np.ndarray) -> float:
    """max over contiguous masked runs of the best consistent-sign residual
    of |lhs - (base +/- sqrt(disc))|."""
    worst = 0.0
    root = np.sqrt(np.clip(disc, 0.0, None))
    for i0, i1, flag in _runs(mask):
        if not flag:
            continue
        sl = slice(i0, i1 + 1)
        plus = float(np.max(np.abs(lhs[sl] - (base[sl] + root[sl]))))
        minus = float(np.max(np.abs(lhs[sl] - (base[sl] - root[sl]))))
        worst = max(worst, min(plus, minus))
    return worst


def verify_cor_3_4(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """Spherical parents satisfy kappa_bar'/kappa_bar = (tau_bar - tau_G) H
    +/- (tau - tau_G) sqrt(r^2 kappa^2 - 1), one sign per segment.

    Samples where the discriminant or tau - tau_G sits below the noise floor
    are excluded (the identity degenerates there)."""
    tol = tol or ToleranceSet.analytic()
    sph = spherical_check(p, spec, tol, n)
    if not sph.is_spherical or sph.radius is None:
        return _not_applicable("cor3_4", tol.residual, "parent not spherical")
    r = float(sph.radius)
    s = p.grid(n)
    kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    m = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float)) - spec.tau_g
    h = m / kappa
    mate = natural_mate_apparatus(p, spec)
    kb = np.atleast_1d(np.asarray(mate.profile.kappa_at(s), dtype=float))
    kbp = np.atleast_1d(np.asarray(mate.profile.kappa_prime_at(s), dtype=float))
    tb = np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float))
    disc = r * r * kappa * kappa - 1.0
    mask = (np.abs(m) > tol.zero) & (disc > DISCRIMINANT_FLOOR)
    if not np.any(mask):
        return _not_applicable("cor3_4", tol.residual,
                               "identity degenerate everywhere")
    lhs = kbp / kb
    base = (tb - spec.tau_g) * h
    residual = _signed_sqrt_residual(lhs, base, (m * m) * disc, mask)
    return VerificationReport("cor3_4", True, residual <= tol.residual, residual,
                              tol.residual, {"r": r,
                                             "samples_checked": int(mask.sum())})


def verify_cor_5_2(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """For spherical parents with constant-curvature mates: pointwise either
    tau = tau_G or mate torsion - tau_G = -/+ kappa sqrt(r^2 kappa^2 - 1)."""
    tol = tol or ToleranceSet.analytic()
    sph = spherical_check(p, spec, tol, n)
    if not sph.is_spherical or sph.radius is None:
        return _not_applicable("cor5_2", tol.residual, "parent not spherical")
    mate = natural_mate_apparatus(p, spec)
    s = p.grid(n)
    kb = np.atleast_1d(np.asarray(mate.profile.kappa_at(s), dtype=float))
    spread = rel_spread(kb)
    if spread > tol.constancy:
        return _not_applicable("cor5_2", tol.residual, "mate curvature not constant")
    r = float(sph.radius)
    kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
    m = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float)) - spec.tau_g
    tb = np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float))
    disc = r * r * kappa * kappa - 1.0
    mask = (np.abs(m) > tol.zero) & (disc > DISCRIMINANT_FLOOR)
    if not np.any(mask):
        # dichotomy satisfied by the tau = tau_G branch everywhere
        return VerificationReport("cor5_2", True, True, 0.0, tol.residual,
                                  {"branch": "tau==tau_G"})
    lhs = tb - spec.tau_g
    residual = _signed_sqrt_residual(lhs, np.zeros_like(lhs),
                                     kappa * kappa * disc, mask)
    return VerificationReport("cor5_2", True, residual <= tol.residual, residual,
                              tol.residual, {"r": r,
                                             "samples_checked": int(mask.sum())})


def verify_cor_6_1(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """General helix <=> conjugate mate is a general helix (needs tau != tau_G)."""
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    m = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float)) - spec.tau_g
    if np.min(np.abs(m)) <= tol.zero:
        return _not_applicable("cor6_1", tol.constancy,
                               "tau - tau_G vanishes somewhere")
    h_spread = rel_spread(harmonic_curvature(p, spec, s))
    conj = conjugate_mate_apparatus(p, spec, n)
    conj_spread = rel_spread(harmonic_curvature(conj.profile, spec, s))
    is_gh = h_spread <= tol.constancy
    conj_gh = conj_spread <= tol.constancy
    hstar = harmonic_curvature(conj.profile, spec, s)
    hvals = harmonic_curvature(p, spec, s)
    identity = float(np.max(np.abs(hstar * hvals - np.sign(m))))
    return VerificationReport("cor6_1", True, is_gh == conj_gh,
                              max(h_spread, conj_spread), tol.constancy,
                              {"general_helix": is_gh,
                               "conjugate_general_helix": conj_gh,
                               "H_product_identity_residual": identity})


def verify_cor_6_2(p: CurvatureProfile, spec: GroupSpec,
                   tol: Optional[ToleranceSet] = None,
                   n: int = 2001) -> VerificationReport:
    """Slant helix <=> conjugate mate is a slant helix; the sigma values are
    opposite up to the sign of tau - tau_G."""
    tol = tol or ToleranceSet.analytic()
    s = p.grid(n)
    m = np.atleast_1d(np.asarray(p.tau_at(s), dtype=float)) - spec.tau_g
    if np.min(np.abs(m)) <= tol.zero:
        return _not_applicable("cor6_2", tol.constancy,
                               "tau - tau_G vanishes somewhere")
    slant, sig_spread = _slant_verdict(p, spec, tol, n)
    conj = conjugate_mate_apparatus(p, spec, n)
    conj_slant, conj_spread = _slant_verdict(conj.profile, spec, tol, n)
    details: dict = {"slant": slant, "conjugate_slant": conj_slant,
                     "sigma_spread": sig_spread,
                     "conjugate_sigma_spread": conj_spread}
    if sig_spread is not None and conj_spread is not None:
        hp = np.atleast_1d(harmonic_curvature_prime(p, spec, s))
        h = harmonic_curvature(p, spec, s)
        kappa = np.atleast_1d(np.asarray(p.kappa_at(s), dtype=float))
        sig = kappa * (h * h + 1.0) ** 1.5 / hp
        hps = np.atleast_1d(harmonic_curvature_prime(conj.profile, spec, s))
        hs = harmonic_curvature(conj.profile, spec, s)
        ks = np.atleast_1d(np.asarray(conj.profile.kappa_at(s), dtype=float))
        sig_star = ks * (hs * hs + 1.0) ** 1.5 / hps
        details["sigma_sum_residual"] = float(
            np.max(np.abs(sig_star + np.sign(m) * sig)))
    return VerificationReport("cor6_2", True, slant == conj_slant,
                              conj_spread if conj_spread is not None else sig_spread,
                              tol.constancy, details)


# ---------------------------------------------------------------------------
# geometric mate checks (Bertrand / mutual orthogonality)

def verify_mate_geometry(traj: FrameTrajectory, mate_curve: PositionCurve,
                         kind: str, spec: GroupSpec,
                         tol: Optional[ToleranceSet] = None,
                         other_mate: Optional[PositionCurve] = None,
                         window: int = DEFAULT_WINDOW) -> VerificationReport:
    """End-to-end geometric checks against estimated apparatus:

    (i)   the mate's estimated tangent equals the parent's N (natural) or
          B (conjugate);
    (ii)  Bertrand property for the conjugate mate: estimated N* is +/-N;
    (iii) mutual orthogonality of the estimated tangents, including the
          cross pair when ``other_mate`` is supplied.
    """
    tol = tol or ToleranceSet.analytic()
    if traj.positions is None:
        raise ValueError("parent trajectory needs positions")
    est_p = estimate_apparatus(traj, spec, window)
    est_m = estimate_apparatus(mate_curve, spec, window)
    mask = est_p.valid & est_m.valid
    target = traj.n if kind == "natural" else traj.b
    tangent_res = float(np.max(np.linalg.norm(est_m.t[mask] - target[mask], axis=1)))
    ortho_vals = [float(np.max(np.abs(np.sum(est_p.t[mask] * est_m.t[mask], axis=1))))]
    details = {"tangent_residual": tangent_res}
    passed = tangent_res <= tol.tangent

    if kind == "conjugate":
        # exclude samples too close to inflections of the mate for a stable N*
        stable = mask & (est_m.kappa >= 1e-3)
        diff_minus = np.linalg.norm(est_m.n[stable] - est_p.n[stable], axis=1)
        diff_plus = np.linalg.norm(est_m.n[stable] + est_p.n[stable], axis=1)
        bertrand = float(np.max(np.minimum(diff_minus, diff_plus))) if np.any(stable) else None
        details["bertrand_residual"] = bertrand
        if bertrand is None or bertrand > tol.bertrand:
            passed = False

    if other_mate is not None:
        est_o = estimate_apparatus(other_mate, spec, window)
        m2 = mask & est_o.valid
        ortho_vals.append(float(np.max(np.abs(np.sum(est_m.t[m2] * est_o.t[m2], axis=1)))))
        ortho_vals.append(float(np.max(np.abs(np.sum(est_p.t[m2] * est_o.t[m2], axis=1)))))
    ortho = max(ortho_vals)
    details["orthogonality_residual"] = ortho
    if ortho > tol.orthogonality:
        passed = False
    residual = max(v for v in [tangent_res, details.get("bertrand_residual"), ortho]
                   if v is not None)
    name = "cor6_4" if kind == "conjugate" else "cor6_3"
    return VerificationReport(name, True, passed, residual, tol.tangent, details)
