"""Three-dimensional Lie algebra and group primitives.

All three supported groups (the commutative R^3, SO(3), the unit quaternions
S^3) share one bracket model on a fixed orthonormal left-invariant basis:
[u, v] = lam * cross(u, v) with structure scalar lam in {0, 1, 2}.  The
group torsion is lam/2: 0 for R^3, 1/2 for SO(3), 1 for S^3.

Group elements are plain numpy arrays whose shape depends on the family:
(3,) translation vectors, (3,3) rotation matrices, (4,) scalar-first unit
quaternions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# renormalization thresholds applied after every update
QUATERNION_DRIFT_TOL = 1e-12
MATRIX_DRIFT_TOL = 1e-9

_FAMILIES = {"r3": 0.0, "so3": 1.0, "s3": 2.0}


@dataclass(frozen=True)
class GroupSpec:
    """Group family plus the structure scalar of its bracket."""

    family: str
    lam: float

    @property
    def tau_g(self) -> float:
        return self.lam / 2.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown group family {self.family!r}")
        if _FAMILIES[self.family] != self.lam:
            raise ValueError(f"family {self.family!r} requires lam={_FAMILIES[self.family]}")


def group_spec(name: str) -> GroupSpec:
    name = name.lower()
    if name not in _FAMILIES:
        raise ValueError(f"unknown group family {name!r} (expected r3, so3 or s3)")
    return GroupSpec(name, _FAMILIES[name])


R3 = group_spec("r3")
SO3 = group_spec("so3")
S3 = group_spec("s3")


@dataclass(frozen=True)
class Frame:
    """Left-invariant components of a right-handed orthonormal frame (T, N, B)."""

    t: np.ndarray
    n: np.ndarray
    b: np.ndarray

    @classmethod
    def identity(cls) -> "Frame":
        return cls(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))

    def as_matrix(self) -> np.ndarray:
        return np.vstack([self.t, self.n, self.b])


def frame_defect(frame: Frame) -> float:
    """Max deviation from orthonormality and right-handedness."""
    m = frame.as_matrix()
    gram = m @ m.T
    d = float(np.max(np.abs(gram - np.eye(3))))
    d = max(d, float(np.max(np.abs(np.cross(frame.t, frame.n) - frame.b))))
    return d


# ---------------------------------------------------------------------------
# algebra operations

def bracket(u: np.ndarray, v: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Lie bracket [u, v] = lam * cross(u, v)."""
    return spec.lam * np.cross(u, v)


def covariant_derivative(u: np.ndarray, u_prime: np.ndarray, t: np.ndarray,
                         spec: GroupSpec) -> np.ndarray:
    """Covariant derivative along a curve with tangent t: u' + (1/2)[t, u]."""
    return np.asarray(u_prime) + 0.5 * bracket(t, u, spec)


def lie_group_torsion(frame: Frame, spec: GroupSpec) -> float:
    """(1/2)<[t, n], b>; equals lam/2 for any right-handed orthonormal frame."""
    return 0.5 * float(np.dot(bracket(frame.t, frame.n, spec), frame.b))


# ---------------------------------------------------------------------------
# group elements

def identity_element(spec: GroupSpec) -> np.ndarray:
    if spec.family == "r3":
        return np.zeros(3)
    if spec.family == "so3":
        return np.eye(3)
    return np.array([1.0, 0.0, 0.0, 0.0])


def hat(v: np.ndarray) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(m: np.ndarray) -> np.ndarray:
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product, scalar-first."""
    pw, pv = p[0], p[1:]
    qw, qv = q[0], q[1:]
    return np.concatenate(([pw * qw - pv @ qv], pw * qv + qw * pv + np.cross(pv, qv)))


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.concatenate(([q[0]], -q[1:]))


def renormalize_element(spec: GroupSpec, g: np.ndarray) -> np.ndarray:
    """Project back onto the group manifold (no-op for r3)."""
    if spec.family == "r3":
        return g
    if spec.family == "s3":
        return g / np.linalg.norm(g)
    u, _, vt = np.linalg.svd(g)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


def element_defect(spec: GroupSpec, g: np.ndarray) -> float:
    """Distance from the group manifold (0 for r3)."""
    if spec.family == "r3":
        return 0.0
    if spec.family == "s3":
        return abs(float(np.linalg.norm(g)) - 1.0)
    return float(np.max(np.abs(g.T @ g - np.eye(3))))


def left_translate_tangent(g: np.ndarray, v: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Push algebra components v to the ambient tangent space at g."""
    if spec.family == "r3":
        return np.asarray(v, dtype=float)
    if spec.family == "s3":
        return quat_mul(g, np.concatenate(([0.0], v)))
    return g @ hat(v)


def pull_back_tangent(g: np.ndarray, dg: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Invert left translation: ambient derivative dg at g -> algebra components."""
    if spec.family == "r3":
        return np.asarray(dg, dtype=float)
    if spec.family == "s3":
        return quat_mul(quat_conj(g), dg)[1:]
    a = g.T @ dg
    return vee(0.5 * (a - a.T))


# ---------------------------------------------------------------------------
# left shift

def cumulative_quadrature(values: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral on a uniform grid, O(h^4) at every grid point.

    Even-index prefixes use the composite Simpson recurrence.  Odd-index
    prefixes add the integral of the cubic through the four samples around
    the trailing interval (one-sided cubics at the two ends).
    """
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if n < 3:
        raise ValueError("cumulative quadrature needs at least 3 samples")
    out = np.zeros_like(f)
    pairs = (h / 3.0) * (f[0:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
    out[2::2] = np.cumsum(pairs, axis=0)
    if n == 3:
        out[1] = (h / 12.0) * (5.0 * f[0] + 8.0 * f[1] - f[2])
        return out
    out[1] = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
    # interior odd indices: integral over [m-1, m] of the cubic through m-2..m+1
    last_centered = n - 2 if n % 2 else n - 3
    if last_centered >= 3:
        m = np.arange(3, last_centered + 1, 2)
        mids = (h / 24.0) * (-f[m - 2] + 13.0 * f[m - 1] + 13.0 * f[m] - f[m + 1])
        out[m] = out[m - 1] + mids
    if n % 2 == 0:
        out[n - 1] = out[n - 2] + (h / 24.0) * (
            f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1])
    return out


def left_shift(s: np.ndarray, tangents: np.ndarray, alpha0: np.ndarray) -> np.ndarray:
    """Sampled algebra-valued curve alpha(s) = alpha0 + integral of the
    left-invariant tangent components.

    ``s`` must be a uniform grid; ``tangents`` holds t(s) rows.  By
    construction alpha'(s) equals the left-translated tangent of the curve
    the components came from.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(tangents, dtype=float)
    if s.shape[0] < 3:
        raise ValueError("left shift needs at least 3 samples")
    steps = np.diff(s)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=0, atol=1e-12 * max(1.0, abs(h))):
        raise ValueError("left shift requires a uniform s-grid")
    return np.asarray(alpha0, dtype=float) + cumulative_quadrature(t, h)
