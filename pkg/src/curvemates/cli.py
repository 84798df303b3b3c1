"""Command-line front end: synthesize trajectories, build mates, classify,
and verify, emitting plot-ready CSV and machine-readable JSON.

Exit codes: 0 success, 1 verification failure, 2 parse/config error,
3 domain error during evaluation (no partial output is left behind),
4 degenerate conjugate mate (tau identically equal to the group torsion).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import analysis
from .analysis import ToleranceSet
from .expressions import DomainError, ExpressionSyntaxError
from .integrate import (integrate_direction_curve, integrate_frame,
                        reconstruct_position)
from .liegroup import GroupSpec, group_spec
from .mates import (NotAFrenetMate, conjugate_mate_apparatus,
                    natural_mate_apparatus)
from .profiles import (CurvatureProfile, FrenetViolation,
                       harmonic_curvature, harmonic_curvature_prime, omega)

SCHEMA_VERSION = "1"

THEOREMS = ("thm4_1", "thm5_1", "thm5_2", "thm6_2", "cor3_1", "cor3_2",
            "cor3_3", "cor3_4", "cor5_2", "cor6_1", "cor6_2", "cor6_3",
            "cor6_4")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    group: str
    kappa: str
    tau: str
    domain: tuple[float, float]
    step: float
    out: Optional[str] = None
    mode: str = "analytic"
    kind: str = "natural"
    theorems: list[str] = field(default_factory=list)
    tolerances: ToleranceSet = field(default_factory=ToleranceSet.analytic)
    init_frame: Optional[list] = None
    init_position: Optional[list] = None

    def spec(self) -> GroupSpec:
        return group_spec(self.group)

    def profile(self) -> CurvatureProfile:
        try:
            return CurvatureProfile.from_expressions(self.kappa, self.tau, self.domain)
        except ExpressionSyntaxError as e:
            raise ConfigError(str(e)) from e


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_domain(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"domain must be 'a:b', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        raise ConfigError(f"bad domain {text!r}: {e}") from e


_TOL_FIELDS = [f.name for f in dataclasses.fields(ToleranceSet)]


def build_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e

    def pick(flag, key, default=None):
        v = getattr(args, flag, None)
        if v is not None:
            return v
        return data.get(key, default)

    group = pick("group", "group")
    kappa = pick("kappa", "kappa")
    tau = pick("tau", "tau")
    domain = getattr(args, "domain", None)
    domain = _parse_domain(domain) if domain is not None else data.get("domain")
    step = pick("step", "step")
    if None in (group, kappa, tau, domain, step):
        raise ConfigError("group, kappa, tau, domain and step are all required")
    try:
        group_spec(group)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    domain = (float(domain[0]), float(domain[1]))
    step = float(step)
    if not domain[0] < domain[1]:
        raise ConfigError("domain must satisfy s_min < s_max")
    if step <= 0:
        raise ConfigError("step must be positive")
    if step > (domain[1] - domain[0]) / 8.0:
        raise ConfigError("step too large: need h <= (s_max - s_min)/8")

    tol_kwargs = dict(data.get("tolerances", {}))
    for name in _TOL_FIELDS:
        v = getattr(args, f"tol_{name}", None)
        if v is not None:
            tol_kwargs[name] = v
    unknown = set(tol_kwargs) - set(_TOL_FIELDS)
    if unknown:
        raise ConfigError(f"unknown tolerance names: {sorted(unknown)}")
    tolerances = ToleranceSet(**tol_kwargs)

    theorems = getattr(args, "theorems", None)
    if theorems is not None:
        theorems = [t.strip() for t in theorems.split(",") if t.strip()]
    else:
        theorems = list(data.get("theorems", []))

    return RunConfig(group=group, kappa=kappa, tau=tau, domain=domain, step=step,
                     out=pick("out", "out"),
                     mode=pick("mode", "mode", "analytic"),
                     kind=pick("kind", "kind", "natural"),
                     theorems=theorems, tolerances=tolerances,
                     init_frame=data.get("init_frame"),
                     init_position=data.get("init_position"))


# ---------------------------------------------------------------------------
# output helpers

_POSITION_COLUMNS = {
    "r3": ["x", "y", "z"],
    "s3": ["qw", "qx", "qy", "qz"],
    "so3": ["m11", "m12", "m13", "m21", "m22", "m23", "m31", "m32", "m33"],
}


def _write_csv(path: Optional[str], header: list[str], rows) -> None:
    """CSV with LF endings and 17-significant-digit numerics; an empty
    string cell stands for an undefined value (never NaN)."""
    def render():
        yield ",".join(header) + "\n"
        for row in rows:
            yield ",".join(c if isinstance(c, str) else _fmt(c) for c in row) + "\n"

    if path is None:
        for line in render():
            sys.stdout.write(line)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in render():
            fh.write(line)


def _remove_partial(path: Optional[str]) -> None:
    if path and os.path.exists(path):
        os.remove(path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _emit_json(payload: dict, path: Optional[str] = None) -> None:
    text = json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _flatten_position(spec: GroupSpec, g: np.ndarray) -> list[float]:
    return [float(v) for v in np.ravel(g)]


# ---------------------------------------------------------------------------
# commands

def cmd_synthesize(config: RunConfig) -> int:
    spec = config.spec()
    p = config.profile()
    init = None
    if config.init_frame is not None:
        from .liegroup import Frame
        m = np.asarray(config.init_frame, dtype=float).reshape(3, 3)
        init = Frame(m[0], m[1], m[2])
    g0 = None
    if config.init_position is not None:
        g0 = np.asarray(config.init_position, dtype=float)
        if spec.family == "so3":
            g0 = g0.reshape(3, 3)
    traj = integrate_frame(p, spec, config.domain[0], config.domain[1],
                           config.step, init)
    traj = reconstruct_position(traj, spec, g0)
    s = traj.s
    hvals = np.atleast_1d(harmonic_curvature(p, spec, s))
    hp = np.atleast_1d(harmonic_curvature_prime(p, spec, s))
    om = np.atleast_1d(np.asarray(omega(p, spec, s), dtype=float))
    sigma_cells: list = []
    for i in range(len(s)):
        if abs(hp[i]) <= 1e-12:
            sigma_cells.append("")
        else:
            sigma_cells.append(traj.kappa[i] * (hvals[i] ** 2 + 1.0) ** 1.5 / hp[i])
    header = (["s"] + _POSITION_COLUMNS[spec.family]
              + ["t1", "t2", "t3", "n1", "n2", "n3", "b1", "b2", "b3",
                 "kappa", "tau", "H", "sigma", "omega"])

    def rows():
        for i in range(len(s)):
            yield ([float(s[i])] + _flatten_position(spec, traj.positions[i])
                   + [*traj.t[i], *traj.n[i], *traj.b[i],
                      float(traj.kappa[i]), float(traj.tau[i]),
                      float(hvals[i]), sigma_cells[i], float(om[i])])

    _write_csv(config.out, header, rows())
    return 0


def cmd_mate(config: RunConfig) -> int:
    spec = config.spec()
    p = config.profile()
    kind = config.kind
    if kind not in ("natural", "conjugate"):
        raise ConfigError(f"kind must be natural or conjugate, got {kind!r}")
    mode = config.mode
    if mode not in ("analytic", "geometric", "both"):
        raise ConfigError(f"mode must be analytic, geometric or both, got {mode!r}")

    mate = (natural_mate_apparatus(p, spec) if kind == "natural"
            else conjugate_mate_apparatus(p, spec))

    if mode == "analytic":
        s = np.linspace(config.domain[0], config.domain[1],
                        int(round((config.domain[1] - config.domain[0]) / config.step)) + 1)
        kap = np.atleast_1d(np.asarray(mate.profile.kappa_at(s), dtype=float))
        tau = np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float))
        _write_csv(config.out, ["s", "kappa", "tau"],
                   ([float(a), float(b), float(c)] for a, b, c in zip(s, kap, tau)))
        return 0

    traj = integrate_frame(p, spec, config.domain[0], config.domain[1], config.step)
    traj = reconstruct_position(traj, spec)
    which = "principal_normal" if kind == "natural" else "binormal"
    curve = integrate_direction_curve(traj, which, spec)
    est = analysis.estimate_apparatus(curve, spec)
    s = curve.s
    pos_cols = _POSITION_COLUMNS[spec.family]

    if mode == "geometric":
        header = ["s"] + pos_cols + ["kappa_est", "tau_est"]

        def rows():
            for i in range(len(s)):
                yield ([float(s[i])] + _flatten_position(spec, curve.positions[i])
                       + [float(est.kappa[i]), float(est.tau[i])])

        _write_csv(config.out, header, rows())
        return 0

    kap = np.atleast_1d(np.asarray(mate.profile.kappa_at(s), dtype=float))
    tau = np.atleast_1d(np.asarray(mate.profile.tau_at(s), dtype=float))
    header = ["s", "kappa_analytic", "tau_analytic"] + pos_cols + ["kappa_est", "tau_est"]

    def rows():
        for i in range(len(s)):
            yield ([float(s[i]), float(kap[i]), float(tau[i])]
                   + _flatten_position(spec, curve.positions[i])
                   + [float(est.kappa[i]), float(est.tau[i])])

    _write_csv(config.out, header, rows())
    v = est.valid
    summary = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "mode": mode,
        "samples_compared": int(v.sum()),
        "max_abs_kappa_diff": float(np.max(np.abs(est.kappa[v] - kap[v]))),
        "max_abs_tau_diff": float(np.max(np.abs(est.tau[v] - tau[v]))),
    }
    _emit_json(summary)
    return 0


def cmd_classify(config: RunConfig) -> int:
    spec = config.spec()
    p = config.profile()
    report = analysis.classify(p, spec, config.tolerances)
    verdicts = {}
    for name, v in report.verdicts.items():
        verdicts[name] = {"pass": v.passed, "residual": v.residual,
                          "tolerance": v.tolerance}
        if v.note:
            verdicts[name]["note"] = v.note
    payload = {
        "schema_version": SCHEMA_VERSION,
        "group": config.group,
        "kappa": config.kappa,
        "tau": config.tau,
        "domain": list(config.domain),
        "verdicts": verdicts,
        "spherical": {
            "pass": report.spherical.is_spherical,
            "radius": report.spherical.radius,
            "closure_residual": report.spherical.max_eq_residual,
        },
        "segments": [{"s_min": seg.s_min, "s_max": seg.s_max, "sign": seg.sign}
                     for seg in report.segments],
        "tolerances": config.tolerances.as_dict(),
    }
    _emit_json(payload, config.out)
    return 0


def _run_theorem(theorem: str, config: RunConfig):
    spec = config.spec()
    p = config.profile()
    tol = config.tolerances
    dispatch = {
        "thm4_1": analysis.verify_thm_4_1,
        "thm5_1": analysis.verify_thm_5_1,
        "thm5_2": analysis.verify_thm_5_2,
        "thm6_2": analysis.verify_thm_6_2,
        "cor3_1": analysis.verify_cor_3_1,
        "cor3_2": analysis.verify_cor_3_2,
        "cor3_3": analysis.verify_cor_3_3,
        "cor3_4": analysis.verify_cor_3_4,
        "cor5_2": analysis.verify_cor_5_2,
        "cor6_1": analysis.verify_cor_6_1,
        "cor6_2": analysis.verify_cor_6_2,
    }
    if theorem in dispatch:
        return dispatch[theorem](p, spec, tol)
    # cor6_3 / cor6_4 need integrated curves
    traj = integrate_frame(p, spec, config.domain[0], config.domain[1], config.step)
    traj = reconstruct_position(traj, spec)
    natural = integrate_direction_curve(traj, "principal_normal", spec)
    try:
        conjugate_mate_apparatus(p, spec)
        conjugate = integrate_direction_curve(traj, "binormal", spec)
    except NotAFrenetMate:
        conjugate = None
    if theorem == "cor6_3":
        if conjugate is None:
            return analysis.VerificationReport(
                "cor6_3", False, False, None, tol.orthogonality,
                hypothesis_note="tau - tau_G vanishes identically")
        return analysis.verify_mate_geometry(traj, natural, "natural", spec, tol,
                                             other_mate=conjugate)
    if conjugate is None:
        return analysis.VerificationReport(
            "cor6_4", False, False, None, tol.bertrand,
            hypothesis_note="tau - tau_G vanishes identically")
    return analysis.verify_mate_geometry(traj, conjugate, "conjugate", spec, tol,
                                         other_mate=natural)


def cmd_verify(config: RunConfig) -> int:
    if not config.theorems:
        raise ConfigError("verify requires --theorems")
    unknown = [t for t in config.theorems if t not in THEOREMS]
    if unknown:
        raise ConfigError(f"unknown theorem ids: {unknown}; "
                          f"expected among {list(THEOREMS)}")
    results = []
    traces = []
    for theorem in config.theorems:
        report = _run_theorem(theorem, config)
        entry = {
            "theorem": theorem,
            "applicable": report.applicable,
            "pass": report.passed,
            "max_residual": report.max_residual,
            "tolerance": report.tolerance,
            "details": _jsonable(report.details),
        }
        if report.hypothesis_note:
            entry["note"] = report.hypothesis_note
        results.append(entry)
        if report.trace is not None:
            traces.append((theorem, report.trace))
    all_ok = all(r["pass"] or not r["applicable"] for r in results)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "group": config.group,
        "kappa": config.kappa,
        "tau": config.tau,
        "domain": list(config.domain),
        "results": results,
        "all_ok": all_ok,
    }
    _emit_json(payload)
    if config.out and traces:
        def rows():
            for theorem, (s, resid) in traces:
                for i in range(len(s)):
                    cell = "" if not np.isfinite(resid[i]) else float(resid[i])
                    yield [theorem, float(s[i]), cell]
        _write_csv(config.out, ["theorem", "s", "residual"], rows())
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--group", choices=["r3", "so3", "s3"])
    sub.add_argument("--kappa", help="curvature expression in s")
    sub.add_argument("--tau", help="torsion expression in s")
    sub.add_argument("--domain", help="arc-length range a:b")
    sub.add_argument("--step", type=float, help="grid step h")
    sub.add_argument("--out", help="output file path")
    sub.add_argument("--config", help="JSON config file (flags override)")
    for name in _TOL_FIELDS:
        sub.add_argument(f"--tol-{name.replace('_', '-')}", type=float,
                         dest=f"tol_{name}",
                         help=f"override the {name} tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curve-mates",
        description="Curves from curvature/torsion laws in R^3, SO(3), S^3: "
                    "synthesis, natural/conjugate mates, classification, "
                    "verification.")
    parser.add_argument("--show-tolerances", action="store_true",
                        help="print the default tolerance table and exit")
    sub = parser.add_subparsers(dest="command")

    p_syn = sub.add_parser("synthesize", help="integrate a trajectory to CSV")
    _add_common(p_syn)

    p_mate = sub.add_parser("mate", help="natural/conjugate mate to CSV")
    _add_common(p_mate)
    p_mate.add_argument("--kind", choices=["natural", "conjugate"])
    p_mate.add_argument("--mode", choices=["analytic", "geometric", "both"])

    p_cls = sub.add_parser("classify", help="special-curve classification JSON")
    _add_common(p_cls)

    p_ver = sub.add_parser("verify", help="verify theorem identities")
    _add_common(p_ver)
    p_ver.add_argument("--theorems", help="comma-separated ids, e.g. thm4_1,cor3_2")
    return parser


def _show_tolerances() -> None:
    print("default tolerances (analytic preset):")
    for name, value in ToleranceSet.analytic().as_dict().items():
        print(f"  {name:22s} {value:g}")
    print("estimated preset overrides:")
    analytic = ToleranceSet.analytic().as_dict()
    for name, value in ToleranceSet.estimated().as_dict().items():
        if analytic[name] != value:
            print(f"  {name:22s} {value:g}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.show_tolerances:
        _show_tolerances()
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    out = getattr(args, "out", None)
    try:
        config = build_config(args)
        out = config.out
        handler = {"synthesize": cmd_synthesize, "mate": cmd_mate,
                   "classify": cmd_classify, "verify": cmd_verify}[args.command]
        return handler(config)
    except (ConfigError, ExpressionSyntaxError, FrenetViolation) as e:
        _remove_partial(out)
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        _remove_partial(out)
        print(f"domain error: {e}", file=sys.stderr)
        return 3
    except NotAFrenetMate as e:
        _remove_partial(out)
        crossings = ", ".join(f"{c:.6g}" for c in e.crossings) or "none (identically zero)"
        print(f"error: {e}; zero crossings of tau - tau_G: {crossings}",
              file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
