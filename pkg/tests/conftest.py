"""Shared test data: golden demo profiles and their reference closed forms."""

from __future__ import annotations

import numpy as np
import pytest

from curvemates.catalog import PROFILES

# reference closed forms for the demo profiles' mate apparatus, used as
# golden vectors (kappa_bar, tau_bar, kappa_star, tau_star as callables)
MATE_REFERENCE = {
    "rectifying": {
        "kappa_bar": lambda s: np.sqrt((s - 1) ** 2 * (s ** 2 + 4 * s + 5)),
        "tau_bar": lambda s: 1.0 / (s ** 2 + 4 * s + 5),
        "kappa_star": lambda s: np.abs(s ** 2 + s - 2),
        "tau_star": lambda s: s - 1.0,
    },
    "slant_helix": {
        "kappa_bar": lambda s: np.full_like(s, 3.0),
        "tau_bar": lambda s: np.full_like(s, 1.0),
        "kappa_star": lambda s: np.abs(3 * np.sin(s)),
        "tau_star": lambda s: 3 * np.cos(s),
    },
    "spherical": {
        "kappa_bar": lambda s: np.full_like(s, 2.0),
        "tau_bar": lambda s: 4 * np.sqrt(7) * np.cos(2 * s) / (9 - 7 * np.cos(4 * s)),
        "kappa_star": lambda s: np.abs(
            2 * np.sqrt(7) * np.sin(2 * s) / np.sqrt(1 + 7 * np.sin(2 * s) ** 2)),
        "tau_star": lambda s: 2.0 / np.sqrt(1 + 7 * np.sin(2 * s) ** 2),
    },
    "salkowski": {
        "kappa_bar": lambda s: np.sqrt(9 + 4 * s ** 2),
        "tau_bar": lambda s: 6.0 / (9 + 4 * s ** 2),
        "kappa_star": lambda s: np.abs(2 * s),
        "tau_star": lambda s: np.full_like(s, 3.0),
    },
    "anti_salkowski": {
        "kappa_bar": lambda s: np.sqrt(2 + 9 * np.cos(s) ** 2),
        "tau_bar": lambda s: 3 * np.sqrt(2) * np.sin(s) / (2 + 9 * np.cos(s) ** 2),
        "kappa_star": lambda s: np.full_like(s, np.sqrt(2)),
        "tau_star": lambda s: 3 * np.cos(s),
    },
}


@pytest.fixture(scope="session")
def profiles():
    return {name: entry.profile() for name, entry in PROFILES.items()}


# batteries for the biconditional checks: (kappa, tau) expression pairs on a
# domain where kappa > 0 and tau - tau_G never vanishes

GENERAL_HELIX_BATTERY = []
_gh_kappas = ["1", "2", "0.5+0.1*sin(s)", "exp(0.2*sin(s))", "2+cos(s)",
              "3", "1+0.1*s^2", "2+0.5*sin(2*s)", "1.5+0.2*cos(3*s)", "0.8"]
_gh_ratios = [1.0, -0.5, 2.0, 0.3, 1.2, -2.0, 0.7, 1.5, -1.1, 3.0]
for _k, _c in zip(_gh_kappas, _gh_ratios):
    GENERAL_HELIX_BATTERY.append((_k, f"({_c})*({_k})", (0.0, 1.5)))

NON_GENERAL_HELIX_BATTERY = [
    ("1", "0.5+s", (0.0, 1.0)),
    ("2", "0.5+0.3*sin(s)", (0.0, 1.0)),
    ("s+2", "1", (0.0, 1.0)),
    ("3", "2*s+1", (0.0, 1.0)),
    ("2+cos(s)", "1+0.5*s", (0.0, 1.0)),
    ("1", "exp(0.3*s)", (0.0, 1.0)),
    ("2", "2+s^2", (0.0, 1.0)),
    ("1.5", "cos(s)+2", (0.0, 1.0)),
    ("1+0.1*s", "1", (0.0, 1.0)),
    ("2", "3+sin(2*s)", (0.0, 1.0)),
]

# slant helices: kappa = A cos(m s), tau = A sin(m s) has sigma = A/m; the
# domain keeps both kappa and tau strictly positive
SLANT_BATTERY = []
for _a, _m in [(3.0, 1.0), (2.0, 0.5), (1.5, 2.0), (2.5, 1.5), (1.0, 0.8),
               (4.0, 1.2), (3.5, 0.7), (0.8, 2.5), (1.2, 1.8), (2.2, 0.9)]:
    dom = (0.2 / _m, 1.2 / _m)
    SLANT_BATTERY.append((f"{_a}*cos({_m}*s)", f"{_a}*sin({_m}*s)", dom))

# non-slant profiles with H' bounded away from zero and tau - tau_G > 0
NON_SLANT_BATTERY = [
    ("2", "2*(0.5*s+1)", (0.0, 1.0)),
    ("1+0.1*s", "(1+0.1*s)*(s+1)", (0.0, 1.0)),
    ("3", "3*(2*s+0.5)", (0.0, 1.0)),
    ("s+2", "(s+2)*(0.3*s+1)", (0.0, 1.0)),
    ("3", "2*s+3", (0.0, 1.0)),
    ("s-1", "s^2+s-2", (1.2, 2.8)),
    ("2+cos(s)", "(2+cos(s))*(0.4*s+0.5)", (0.0, 1.0)),
    ("1", "0.7*s+0.2", (0.0, 1.0)),
    ("2.5", "2.5*(s^2+s+1)", (0.0, 1.0)),
    ("0.5+0.1*s", "(0.5+0.1*s)*(2*s+1)", (0.0, 1.0)),
]
