import numpy as np
import pytest
from scipy.linalg import expm

from curvemates.analysis import estimate_apparatus
from curvemates.integrate import (FrameTrajectory, integrate_direction_curve,
                                  integrate_frame, reconstruct_position)
from curvemates.liegroup import R3, S3, SO3, element_defect
from curvemates.profiles import CurvatureProfile, FrenetViolation


def constant_coefficient_frame(kappa, m, s):
    """Matrix-exponential oracle for the constant-coefficient frame system."""
    k = np.array([[0.0, kappa, 0.0], [-kappa, 0.0, m], [0.0, -m, 0.0]])
    return expm(s * k)


def test_plane_rotation_closed_form():
    # kappa = 1, tau = tau_G: B is constant and T rotates in a plane
    for spec, tau in ((R3, "0"), (S3, "1")):
        p = CurvatureProfile.from_expressions("1", tau, (0, 2 * np.pi))
        traj = integrate_frame(p, spec, 0, 2 * np.pi, 1e-3)
        s = traj.s
        np.testing.assert_allclose(
            traj.t, np.stack([np.cos(s), np.sin(s), 0 * s], axis=1), atol=1e-9)
        np.testing.assert_allclose(
            traj.n, np.stack([-np.sin(s), np.cos(s), 0 * s], axis=1), atol=1e-9)
        np.testing.assert_allclose(traj.b, np.tile([0, 0, 1.0], (len(s), 1)),
                                   atol=1e-9)


def test_skew_axis_rotation_returns_to_start():
    # kappa = 1, tau - tau_G = 1: rotation about (1,0,1)/sqrt(2) at rate sqrt(2)
    period = 2 * np.pi / np.sqrt(2)
    p = CurvatureProfile.from_expressions("1", "2", (0, period))
    traj = integrate_frame(p, S3, 0, period, 1e-3)
    end = traj.frame_at(len(traj.s) - 1).as_matrix()
    np.testing.assert_allclose(end, np.eye(3), atol=1e-8)
    oracle = constant_coefficient_frame(1.0, 1.0, traj.s[-1])
    np.testing.assert_allclose(end, oracle @ np.eye(3), atol=1e-8)


def test_orthonormality_defect(profiles):
    traj = integrate_frame(profiles["slant_helix"], R3, -1.5, 1.5, 1e-3)
    assert traj.max_frame_defect <= 1e-10


def test_rk4_order_against_expm_oracle():
    p = CurvatureProfile.from_expressions("1", "2", (0, 2.0))
    errs = []
    for h in (0.05, 0.025):
        traj = integrate_frame(p, S3, 0, 2.0, h)
        oracle = constant_coefficient_frame(1.0, 1.0, 2.0)
        errs.append(np.max(np.abs(traj.frame_at(len(traj.s) - 1).as_matrix()
                                  - oracle)))
    ratio = errs[0] / errs[1]
    assert 14 <= ratio <= 18


def test_pre_renormalization_drift_bounded_by_h5():
    # fit C at the coarsest step; finer steps must stay under C*h^5 (the
    # measured order is >= 5, so the bound has slack there)
    p = CurvatureProfile.from_expressions("3*cos(s)", "3*sin(s)", (0, 1))
    steps = (0.064, 0.032, 0.016, 0.008)
    defects = []
    for h in steps:
        traj = integrate_frame(p, R3, 0, 1, h)
        defects.append(traj.max_step_defect)
    c = defects[0] / steps[0] ** 5
    print(f"per-step orthonormality drift: C = {c:.3g} "
          f"(defects {[f'{d:.2e}' for d in defects]})")
    floor = 1e-15  # double rounding on a 3x3 product
    for h, d in zip(steps[1:], defects[1:]):
        assert d <= c * h ** 5 + floor


def test_frenet_violation_detected():
    p = CurvatureProfile.from_expressions("-1", "0", (0, 1))
    with pytest.raises(FrenetViolation):
        integrate_frame(p, R3, 0, 1, 1e-2)


def test_reconstruct_circle():
    p = CurvatureProfile.from_expressions("1", "0", (0, 2 * np.pi))
    traj = integrate_frame(p, R3, 0, 2 * np.pi, 1e-3)
    traj = reconstruct_position(traj, R3, np.array([0.0, -1.0, 0.0]))
    s = traj.s
    exact = np.stack([np.sin(s), -np.cos(s), 0 * s], axis=1)
    np.testing.assert_allclose(traj.positions, exact, atol=1e-9)


def test_one_parameter_subgroup_on_s3():
    # constant tangent e1: gamma(s) = (cos s, sin s, 0, 0), period 2*pi
    n = 2001
    s = np.linspace(0, 2 * np.pi, n)
    dummy = CurvatureProfile.from_expressions("1", "0", (0, 2 * np.pi))
    traj = FrameTrajectory(
        s=s, t=np.tile([1.0, 0, 0], (n, 1)), n=np.tile([0, 1.0, 0], (n, 1)),
        b=np.tile([0, 0, 1.0], (n, 1)), kappa=np.zeros(n), tau=np.ones(n),
        spec=S3, profile=dummy)
    traj = reconstruct_position(traj, S3)
    exact = np.stack([np.cos(s), np.sin(s), 0 * s, 0 * s], axis=1)
    np.testing.assert_allclose(traj.positions, exact, atol=1e-9)
    np.testing.assert_allclose(traj.positions[-1], traj.positions[0], atol=1e-9)
    norms = np.linalg.norm(traj.positions, axis=1)
    assert np.max(np.abs(norms - 1)) <= 1e-12


def test_group_manifold_drift(profiles):
    p = CurvatureProfile.from_expressions("1", "2", (0, 3))
    for spec, tol in ((S3, 1e-12), (SO3, 1e-9)):
        traj = reconstruct_position(integrate_frame(p, spec, 0, 3, 1e-3), spec)
        assert traj.max_element_defect <= tol
        worst = max(element_defect(spec, g) for g in traj.positions[::100])
        assert worst <= tol


def test_natural_mate_of_circle_is_circle():
    p = CurvatureProfile.from_expressions("1", "0", (0, 2 * np.pi))
    traj = integrate_frame(p, R3, 0, 2 * np.pi, 1e-3)
    mate = integrate_direction_curve(traj, "principal_normal", R3,
                                     np.array([1.0, 0.0, 0.0]))
    exact = np.stack([np.cos(mate.s), np.sin(mate.s), 0 * mate.s], axis=1)
    np.testing.assert_allclose(mate.positions, exact, atol=1e-9)


def test_binormal_curve_of_planar_curve_is_straight():
    p = CurvatureProfile.from_expressions("2+sin(s)", "0", (0, 3))
    traj = integrate_frame(p, R3, 0, 3, 1e-3)
    mate = integrate_direction_curve(traj, "binormal", R3)
    steps = np.diff(mate.positions, axis=0)
    assert np.max(np.abs(steps - steps[0])) <= 1e-12


def test_round_trip_estimation_all_profiles(profiles):
    # synthesize -> reconstruct -> estimate closes to 1e-4 (scale-protected
    # relative error) at h = 1e-3
    for name, p in profiles.items():
        traj = integrate_frame(p, R3, p.s_min, p.s_max, 1e-3)
        traj = reconstruct_position(traj, R3)
        est = estimate_apparatus(traj, R3)
        v = est.valid
        k_true = np.asarray(p.kappa_at(est.s[v]))
        t_true = np.asarray(p.tau_at(est.s[v]))
        k_err = np.max(np.abs(est.kappa[v] - k_true) / (1 + np.abs(k_true)))
        t_err = np.max(np.abs(est.tau[v] - t_true) / (1 + np.abs(t_true)))
        assert k_err <= 1e-4, name
        assert t_err <= 1e-4, name


def test_grid_step_matches_request():
    p = CurvatureProfile.from_expressions("1", "0", (0, 1))
    traj = integrate_frame(p, R3, 0, 1, 1e-3)
    steps = np.diff(traj.s)
    assert np.max(np.abs(steps - 1e-3)) <= 1e-15
    assert len(traj.s) == 1001
