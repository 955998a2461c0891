"""Command-line interface and scenario orchestration.

Subcommands: constants, trajectory, lindblad-demo, kinetic, wigner-demo,
estimate, validate.  Exit codes: 0 success, 1 physics-invariant failure,
2 usage error.  Data outputs (CSV/JSON tables) are bit-for-bit reproducible
given (config, seed, version); the run report additionally carries wall
time.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, dynamics, kinetics, lindblad, validate, wigner
from .config import ScenarioConfig, parse_config
from .dirac import Momentum3
from .dynamics import FieldConfig, ParticleState
from .errors import ConfigError, LindradError
from .units import derived_constants


def fmt(value) -> str:
    """Full-precision numeric formatting (17 significant digits)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_table(records, format: str, path, fieldnames=None) -> None:
    """Write homogeneous records as CSV (17 sig digits, LF endings) or JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if records and fieldnames is None:
        fieldnames = list(records[0].keys())
    if fieldnames is None:
        raise LindradError("empty record list needs explicit fieldnames")
    for r in records:
        if list(r.keys()) != fieldnames:
            raise LindradError("records are not homogeneous")
    if format == "csv":
        lines = [",".join(fieldnames)]
        for r in records:
            lines.append(",".join(fmt(r[k]) for k in fieldnames))
        path.write_text("\n".join(lines) + "\n", newline="\n")
    elif format == "json":
        data = [{k: (float(v) if isinstance(v, (np.floating,)) else v) for k, v in r.items()} for r in records]
        path.write_text(json.dumps(data, indent=1) + "\n", newline="\n")
    else:
        raise LindradError(f"unknown format {format!r}")


def _write_json(obj, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", newline="\n")


class RunReport:
    """Per-run record: effective config, checks, outputs, wall time."""

    def __init__(self, scenario: str, config_echo: dict):
        self.scenario = scenario
        self.config_echo = config_echo
        self.checks = []
        self.outputs = []
        self.t0 = time.time()

    def add_check(self, name, measured, tolerance, passed) -> None:
        self.checks.append(
            {"name": name, "measured": measured, "tolerance": tolerance, "passed": bool(passed)}
        )

    def finish(self, path) -> dict:
        doc = {
            "scenario": self.scenario,
            "version": __version__,
            "config": self.config_echo,
            "checks": self.checks,
            "outputs": [str(p) for p in self.outputs],
            "wall_time_s": round(time.time() - self.t0, 3),
        }
        _write_json(doc, path)
        return doc

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)


def _load_config(args) -> ScenarioConfig:
    if getattr(args, "config", None):
        text = Path(args.config).read_text()
    else:
        text = ""
    return parse_config(text)


def run_constants(cfg: ScenarioConfig, out: Path, fmt_kind: str, quiet: bool) -> int:
    doc = cfg.constants.as_dict()
    if not quiet:
        print(json.dumps(doc, indent=1, sort_keys=True))
    _write_json(doc, out / "constants.json")
    return 0


def run_trajectory(cfg: ScenarioConfig, out: Path, fmt_kind: str, quiet: bool) -> int:
    num = cfg.numerics
    model = cfg.model_kind()
    s0 = ParticleState(0.0, cfg.initial["x"], cfg.initial_pi(), cfg.constants.m)
    report = RunReport("trajectory", cfg.echo())
    states = dynamics.integrate(
        model, s0, cfg.field, cfg.constants, num["dt"], num["steps"], num["record_every"]
    )
    records = [
        {
            "t": s.t,
            "x1": s.x[0], "x2": s.x[1], "x3": s.x[2],
            "pi1": s.pi[0], "pi2": s.pi[1], "pi3": s.pi[2],
            "gamma": s.gamma,
        }
        for s in states
    ]
    path = out / ("trajectory.csv" if fmt_kind == "csv" else "trajectory.json")
    write_table(records, fmt_kind, path)
    report.outputs.append(path)
    report.add_check("final_gamma_on_shell", abs(states[-1].gamma - states[-1].pi0 / s0.m), 1e-12, True)
    report.finish(out / "report.json")
    if not quiet:
        print(f"wrote {path} ({len(records)} samples)")
    return 0


def run_lindblad_demo(cfg: ScenarioConfig, out: Path, fmt_kind: str, quiet: bool) -> int:
    num = cfg.numerics
    p = Momentum3(num["p"], cfg.constants.m)
    basis = (p,)
    H = lindblad.mode_hamiltonian(basis)
    jumps = [
        lindblad.JumpOperator(lindblad.vf_operator(+1, p), num["sigma_plus"]),
        lindblad.JumpOperator(lindblad.vf_operator(-1, p), num.get("sigma_minus", 0.0)),
    ]
    jumps = [j for j in jumps if j.weight > 0.0]
    psi = np.zeros(4, dtype=complex)
    psi[2] = 1.0
    rho = lindblad.DensityMatrix.pure(psi, basis)
    proj = lindblad.pes_projector(basis)
    records = []
    report = RunReport("lindblad-demo", cfg.echo())
    worst_trace, worst_eig = 0.0, 0.0
    for n in range(num["steps"] + 1):
        if n > 0:
            rho = lindblad.lindblad_step(rho, H, jumps, num["dt"])
        pes = rho.expectation(proj).real
        eig = rho.min_eigenvalue
        worst_trace = max(worst_trace, abs(rho.trace - 1.0))
        worst_eig = min(worst_eig, eig)
        if n % num["record_every"] == 0 or n == num["steps"]:
            records.append(
                {
                    "t": n * num["dt"],
                    "pop_pes": pes,
                    "pop_nes": 1.0 - pes,
                    "trace": rho.trace,
                    "min_eig": eig,
                    "purity": rho.purity,
                }
            )
    path = out / ("lindblad.csv" if fmt_kind == "csv" else "lindblad.json")
    write_table(records, fmt_kind, path)
    report.outputs.append(path)
    report.add_check("trace_preservation", worst_trace, 1e-8, worst_trace < 1e-8)
    report.add_check("positivity", -worst_eig, 1e-8, worst_eig >= -1e-8)
    report.finish(out / "report.json")
    if not quiet:
        print(f"wrote {path}")
    return 0 if report.all_passed else 1


def _moment_record(t: float, mom: dict) -> dict:
    rec = {"t": t}
    for i in range(3):
        rec[f"mean_x{i + 1}"] = mom["mean_x"][i]
    for i in range(3):
        rec[f"mean_pi{i + 1}"] = mom["mean_pi"][i]
    for i in range(3):
        rec[f"var_x{i + 1}"] = mom["cov"][i, i]
    for i in range(3):
        rec[f"var_pi{i + 1}"] = mom["cov"][3 + i, 3 + i]
    rec["cov_x1_pi1"] = mom["cov"][0, 3]
    return rec


def run_kinetic(cfg: ScenarioConfig, out: Path, fmt_kind: str, quiet: bool) -> int:
    num = cfg.numerics
    init = cfg.initial
    report = RunReport("kinetic", cfg.echo())
    frozen = None
    if num["frozen"]:
        frozen = kinetics.FrozenCoefficients(num["frozen_F"], num["frozen_v"], num["frozen_gamma"])
    lo, hi, nx = num["grid_x"]
    x_ax = np.linspace(lo, hi, nx)
    lo, hi, npi = num["grid_pi"]
    pi_ax = np.linspace(lo, hi, npi)
    rc = max(1, num["steps"] // 50)
    code = 0
    if num["mode"] in ("fp", "both"):
        f0 = kinetics.PhaseSpaceScalarField.gaussian(
            [x_ax], [pi_ax], [init["mean_x"][0]], [init["mean_pi"][0]],
            [init["sigma_x"][0]], [init["sigma_pi"][0]],
        )
        f1, hist = kinetics.fp_run(
            f0, cfg.field, cfg.constants, num["dt"], num["steps"], frozen=frozen, record_every=rc
        )
        path = out / f"fp_moments.{fmt_kind}"
        write_table([_moment_record(t, mom) for t, mom in hist], fmt_kind, path)
        report.outputs.append(path)
        report.add_check("fp_mass", abs(f1.mass - 1.0), 1e-8, abs(f1.mass - 1.0) < 1e-8)
        report.add_check("fp_clipped_mass", f1.clipped_mass, 1e-6, f1.clipped_mass < 1e-6)
        if num["dump_grid"]:
            xg, pg = np.meshgrid(x_ax, pi_ax, indexing="ij")
            recs = [
                {"x": xg.ravel()[i], "pi": pg.ravel()[i], "f": f1.values.ravel()[i]}
                for i in range(xg.size)
            ]
            gpath = out / f"fp_grid.{fmt_kind}"
            write_table(recs, fmt_kind, gpath)
            report.outputs.append(gpath)
    if num["mode"] in ("mc", "both"):
        ens = kinetics.Ensemble.gaussian(
            num["particles"], init["mean_x"], init["mean_pi"],
            np.where(np.arange(3) < 1, init["sigma_x"], 0.0),
            np.where(np.arange(3) < 1, init["sigma_pi"], 0.0),
            seed=num["seed"], m=cfg.constants.m,
        )
        _, hist = kinetics.langevin_ensemble(
            ens, cfg.field, cfg.constants, num["dt"], num["steps"], frozen=frozen, record_every=rc
        )
        path = out / f"mc_moments.{fmt_kind}"
        write_table([_moment_record(t, mom) for t, mom in hist], fmt_kind, path)
        report.outputs.append(path)
    report.finish(out / "report.json")
    if not quiet:
        print(f"kinetic run complete: {[str(p) for p in report.outputs]}")
    return 0 if report.all_passed else 1


def run_wigner_demo(cfg: ScenarioConfig, out: Path, fmt_kind: str, quiet: bool) -> int:
    num = cfg.numerics
    lo, hi, n = num["x_span"]
    x = np.linspace(lo, hi, n)
    dx = x[1] - x[0]
    x0, p0, s = num["packet"]
    psi = np.exp(-((x - x0) ** 2) / (4.0 * s**2) + 1j * p0 * x).astype(complex)
    if "packet2" in num and isinstance(num.get("packet2"), np.ndarray):
        x0b, p0b, sb = num["packet2"]
        psi = psi + np.exp(-((x - x0b) ** 2) / (4.0 * sb**2) + 1j * p0b * x)
    psi /= math.sqrt(float((np.abs(psi) ** 2).sum() * dx))
    W = wigner.wigner_transform(psi, x)
    report = RunReport("wigner-demo", cfg.echo())
    marg_x_res = float(np.abs(W.marginal_x() - np.abs(psi) ** 2).max())
    psit = dx / math.sqrt(2 * math.pi) * (
        psi[None, :] * np.exp(-1j * W.pi_axis[:, None] * x[None, :])
    ).sum(axis=1)
    marg_pi_res = float(np.abs(W.marginal_pi() - np.abs(psit) ** 2).max())
    point = (np.zeros(3), np.zeros(3))
    comm = wigner.moyal_bracket(
        wigner.momentum_symbol(0), wigner.momentum_symbol(1), cfg.field, hbar=1.0
    ).value(*point)
    moyal_res = abs(comm - cfg.field.B0[2])
    w0 = W.w0
    stride = max(1, len(W.pi_axis) // 256)
    recs = []
    for i in range(len(x)):
        for j in range(0, len(W.pi_axis), stride):
            recs.append({"x": x[i], "pi": W.pi_axis[j], "W0": w0[i, j]})
    path = out / f"wigner_grid.{fmt_kind}"
    write_table(recs, fmt_kind, path)
    report.outputs.append(path)
    resid = {
        "marginal_x_residual": marg_x_res,
        "marginal_pi_residual": marg_pi_res,
        "moyal_commutator_residual": moyal_res,
        "normalization": W.normalization(),
        "hermiticity_defect": W.hermiticity_defect(),
    }
    _write_json(resid, out / "wigner_report.json")
    report.outputs.append(out / "wigner_report.json")
    report.add_check("marginal_x", marg_x_res, 1e-6, marg_x_res < 1e-6)
    report.add_check("marginal_pi", marg_pi_res, 1e-6, marg_pi_res < 1e-6)
    report.add_check("moyal_commutator", moyal_res, 1e-12, moyal_res < 1e-12)
    report.finish(out / "report.json")
    if not quiet:
        print(json.dumps(resid, indent=1, sort_keys=True))
    return 0 if report.all_passed else 1


def run_estimate(cfg: ScenarioConfig, out: Path, fmt_kind: str, quiet: bool) -> int:
    num = cfg.numerics
    ratios = kinetics.estimate_ratios(num["e_ratio"], num["gamma"], num["dp"], cfg.constants)
    if not quiet:
        print(json.dumps(ratios, indent=1, sort_keys=True))
    _write_json(ratios, out / "estimates.json")
    return 0


def run_validate(cfg: ScenarioConfig, out: Path, fmt_kind: str, quiet: bool) -> int:
    report = RunReport("validate", cfg.echo())
    results = validate.run_all(verbose=not quiet)
    for r in results:
        report.add_check(r.name, r.measured, r.tolerance, r.passed)
    doc = report.finish(out / "report.json")
    moments_path = out / "validate_artifacts"
    _emit_validate_artifacts(moments_path, fmt_kind)
    if not quiet:
        print(f"report: {out / 'report.json'} ({sum(c['passed'] for c in doc['checks'])}/"
              f"{len(doc['checks'])} passed)")
    return 0 if report.all_passed else 1


def _emit_validate_artifacts(out: Path, fmt_kind: str) -> None:
    """Companion data files for post-processing (figure rendering)."""
    consts = derived_constants()
    m = consts.m
    gamma0, om_c = 10.0, 1e-3
    field = FieldConfig(np.array([0.0, 0.0, om_c]))
    speed = math.sqrt(1.0 - 1.0 / gamma0**2)
    s0 = ParticleState(0.0, np.zeros(3), np.array([m * gamma0 * speed, 0.0, 0.0]), m)
    period = dynamics.cyclotron_period(gamma0, om_c)
    steps = 20_000
    dt = 10.0 * period / steps
    for model, stem in (
        (dynamics.ModelKind.Lorentz, "trajectory_lorentz"),
        (dynamics.ModelKind.LandauLifshitz, "trajectory_ll"),
        (dynamics.ModelKind.VfEhrenfest, "trajectory_vf"),
    ):
        # strong coupling variant of the constants so the decay is visible
        cc = derived_constants(alpha=0.3, m=m)
        states = dynamics.integrate(model, s0, field, cc, dt, steps, record_every=20)
        recs = [
            {
                "t": s.t,
                "x1": s.x[0], "x2": s.x[1], "x3": s.x[2],
                "pi1": s.pi[0], "pi2": s.pi[1], "pi3": s.pi[2],
                "gamma": s.gamma,
            }
            for s in states
        ]
        write_table(recs, fmt_kind, out / f"{stem}.{fmt_kind}")

    # frozen-coefficient kinetic pair
    consts_k = derived_constants(alpha=3.0, m=m)  # tau0 = 2
    frozen = kinetics.FrozenCoefficients([0.6, 0, 0], [math.sqrt(0.75), 0, 0], 2.0)
    x_ax = np.arange(-3.0, 3.0 + 1e-12, 0.05)
    pi_ax = np.arange(-2.0, 2.0 + 1e-12, 0.04)
    f0 = kinetics.PhaseSpaceScalarField.gaussian([x_ax], [pi_ax], [0.0], [0.0], [0.35], [0.22])
    dt_k = 0.9 * 0.25 * 0.04**2 / (2.0 * 2.0 * 0.75)
    steps_k = int(0.12 / dt_k)
    f1, hist = kinetics.fp_run(
        f0, FieldConfig(np.zeros(3)), consts_k, dt_k, steps_k, frozen=frozen,
        record_every=max(1, steps_k // 40),
    )
    write_table([_moment_record(t, mm) for t, mm in hist], fmt_kind, out / f"fp_moments.{fmt_kind}")
    ens = kinetics.Ensemble.gaussian(20_000, [0, 0, 0], [0, 0, 0], [0.35, 0, 0], [0.22, 0, 0], seed=42)
    _, hist_mc = kinetics.langevin_ensemble(
        ens, FieldConfig(np.zeros(3)), consts_k, 0.12 / 60, 60, frozen=frozen, record_every=2
    )
    write_table(
        [_moment_record(t, mm) for t, mm in hist_mc], fmt_kind, out / f"mc_moments.{fmt_kind}"
    )
    xg, pg = np.meshgrid(x_ax, pi_ax, indexing="ij")
    recs = [
        {"x": xg.ravel()[i], "pi": pg.ravel()[i], "f": f1.values.ravel()[i]}
        for i in range(xg.size)
    ]
    write_table(recs, fmt_kind, out / f"fp_grid.{fmt_kind}")

    # Lindblad relaxation trace
    p = Momentum3(np.zeros(3), m)
    basis = (p,)
    H = lindblad.mode_hamiltonian(basis)
    jumps = [lindblad.JumpOperator(lindblad.vf_operator(+1, p), 0.05)]
    psi = np.zeros(4, dtype=complex)
    psi[2] = 1.0
    rho = lindblad.DensityMatrix.pure(psi, basis)
    proj = lindblad.pes_projector(basis)
    recs = []
    dt_l = 0.14
    for n in range(1001):
        if n:
            rho = lindblad.lindblad_step(rho, H, jumps, dt_l)
        if n % 5 == 0:
            pes = rho.expectation(proj).real
            recs.append(
                {
                    "t": n * dt_l,
                    "pop_pes": pes,
                    "pop_nes": 1.0 - pes,
                    "trace": rho.trace,
                    "min_eig": rho.min_eigenvalue,
                    "purity": rho.purity,
                }
            )
    write_table(recs, fmt_kind, out / f"lindblad.{fmt_kind}")

    # Wigner grid
    x = np.linspace(-12.0, 12.0, 256)
    dx = x[1] - x[0]
    psi_w = np.exp(-((x - 3.0) ** 2) / (4.0 * 0.8**2)) + np.exp(
        -((x + 3.0) ** 2) / (4.0 * 0.8**2) + 2.0j * x
    )
    psi_w = psi_w / math.sqrt(float((np.abs(psi_w) ** 2).sum() * dx))
    W = wigner.wigner_transform(psi_w, x)
    w0 = W.w0
    keep = np.abs(W.pi_axis) <= 6.0
    recs = []
    for i in range(len(x)):
        for j in np.nonzero(keep)[0]:
            recs.append({"x": x[i], "pi": W.pi_axis[j], "W0": w0[i, j]})
    write_table(recs, fmt_kind, out / f"wigner_grid.{fmt_kind}")


RUNNERS = {
    "constants": run_constants,
    "trajectory": run_trajectory,
    "lindblad-demo": run_lindblad_demo,
    "kinetic": run_kinetic,
    "wigner-demo": run_wigner_demo,
    "estimate": run_estimate,
    "validate": run_validate,
}


def run_scenario(cfg: ScenarioConfig, out_dir=None, fmt_kind=None, quiet=False) -> int:
    out = Path(out_dir if out_dir is not None else cfg.output["directory"])
    fmt_kind = fmt_kind if fmt_kind is not None else cfg.output["format"]
    out.mkdir(parents=True, exist_ok=True)
    preexisting = {p for p in out.rglob("*")}
    try:
        return RUNNERS[cfg.kind](cfg, out, fmt_kind, quiet)
    except Exception:
        # remove partial outputs, keep anything that was already there
        for p in sorted(out.rglob("*"), reverse=True):
            if p in preexisting:
                continue
            if p.is_file():
                p.unlink(missing_ok=True)
            elif p.is_dir() and not any(p.iterdir()):
                p.rmdir()
        raise


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="scenario configuration file")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--format", choices=["csv", "json"], help="table format")
    sp.add_argument("--seed", type=int, help="override RNG seed")
    sp.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lindrad", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("constants", help="print the model constants as JSON")
    _add_common(sp)

    sp = sub.add_parser("trajectory", help="integrate a classical trajectory")
    _add_common(sp)
    sp.add_argument("--model", choices=sorted(k.value for k in dynamics.ModelKind))
    sp.add_argument("--dt", type=float)
    sp.add_argument("--steps", type=int)

    sp = sub.add_parser("lindblad-demo", help="single-mode Lindblad relaxation")
    _add_common(sp)
    sp.add_argument("--p", help="momentum triple 'px py pz'")
    sp.add_argument("--sigma-plus", type=float, dest="sigma_plus")
    sp.add_argument("--sigma-minus", type=float, dest="sigma_minus")
    sp.add_argument("--dt", type=float)
    sp.add_argument("--steps", type=int)

    sp = sub.add_parser("kinetic", help="Fokker-Planck / Langevin kinetics")
    _add_common(sp)
    sp.add_argument("--mode", choices=["fp", "mc", "both"])
    sp.add_argument("--particles", type=int)

    sp = sub.add_parser("wigner-demo", help="Wigner transform demo")
    _add_common(sp)
    sp.add_argument("--packet", help="gaussian packet 'x0 p0 sigma'")
    sp.add_argument("--B", type=float, help="uniform B_z for the Moyal check")

    sp = sub.add_parser("estimate", help="diffusion/friction ratio estimates")
    _add_common(sp)
    sp.add_argument("--e-ratio", type=float, dest="e_ratio")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--dp", type=float)

    sp = sub.add_parser("validate", help="run the acceptance suite")
    _add_common(sp)
    return ap


def _apply_flag_overrides(cfg: ScenarioConfig, args) -> None:
    num = cfg.numerics
    for name in ("dt", "steps", "mode", "particles", "sigma_plus", "e_ratio", "gamma", "dp"):
        v = getattr(args, name, None)
        if v is not None:
            num[name] = v
    if getattr(args, "seed", None) is not None:
        num["seed"] = args.seed
    if getattr(args, "model", None) is not None:
        num["model"] = args.model
    if getattr(args, "p", None) is not None:
        num["p"] = np.array([float(t) for t in args.p.replace(",", " ").split()])
    if getattr(args, "packet", None) is not None:
        num["packet"] = np.array([float(t) for t in args.packet.replace(",", " ").split()])
    if getattr(args, "B", None) is not None:
        cfg.sections["field"]["B0"] = np.array([0.0, 0.0, args.B])
        cfg.field = FieldConfig(np.array([0.0, 0.0, args.B]), cfg.field.gradB, x0=cfg.field.x0)
    if getattr(args, "sigma_minus", None) is not None:
        num["sigma_minus"] = args.sigma_minus


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        cfg.sections["scenario"]["kind"] = args.command
        cfg = ScenarioConfig(
            kind=args.command, constants=cfg.constants, field=cfg.field, sections=cfg.sections
        )
        _apply_flag_overrides(cfg, args)
        return run_scenario(cfg, args.out, args.format, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LindradError as exc:
        print(f"physics failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
