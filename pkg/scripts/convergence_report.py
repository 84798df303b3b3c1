#!/usr/bin/env python3
"""Measure and print the convergence orders of the pipeline.

Reports the frame integrator's endpoint error against a matrix-exponential
closed form (expected order 4) and the end-to-end estimator errors on the
slant-helix demo profile over a range of steps.
"""

import numpy as np

from curvemates.analysis import synthesize_estimated_profile
from curvemates.catalog import PROFILES
from curvemates.integrate import integrate_frame
from curvemates.liegroup import S3, R3
from curvemates.profiles import CurvatureProfile


def rodrigues(axis, angle):
    k = axis / np.linalg.norm(axis)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * kx + (1 - np.cos(angle)) * kx @ kx


def frame_order():
    # constant coefficients: kappa = 1, tau - tau_G = 1 rotates the frame
    # about (-1, 0, -1)/sqrt(2) at rate sqrt(2)
    p = CurvatureProfile.from_expressions("1", "2", (0, 2.0))
    oracle = rodrigues(np.array([-1.0, 0.0, -1.0]), np.sqrt(2) * 2.0)
    print("frame integrator endpoint error vs closed form:")
    prev = None
    for h in (0.08, 0.04, 0.02, 0.01):
        traj = integrate_frame(p, S3, 0, 2.0, h)
        err = np.max(np.abs(traj.frame_at(len(traj.s) - 1).as_matrix() - oracle))
        note = "" if prev is None else f"  ratio {prev / err:6.2f}"
        print(f"  h={h:<6g} err={err:.3e}{note}")
        prev = err


def estimator_orders():
    p = PROFILES["slant_helix"].profile()
    print("end-to-end estimator error (slant helix demo profile):")
    prev = None
    for h in (0.04, 0.02, 0.01, 0.005, 0.0025):
        prof_est, _ = synthesize_estimated_profile(p, R3, h)
        sg = prof_est.s_grid
        ke = np.max(np.abs(prof_est.kappa_samples - np.asarray(p.kappa_at(sg))))
        te = np.max(np.abs(prof_est.tau_samples - np.asarray(p.tau_at(sg))))
        note = ""
        if prev is not None:
            note = f"  ratios {prev[0] / ke:6.2f} {prev[1] / te:6.2f}"
        print(f"  h={h:<7g} kappa_err={ke:.3e} tau_err={te:.3e}{note}")
        prev = (ke, te)
    print("(kappa refines at order ~4; tau carries an O(h^3) component from"
          " per-step local-error granularity under triple differentiation)")


if __name__ == "__main__":
    frame_order()
    estimator_orders()
