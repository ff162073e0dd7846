"""Batch front-end: spectrum, certificate, simulate, verify.

Exit codes: 0 success, 1 configuration error, 2 coefficient assumption
violated, 3 incompatible initial data, 4 stability bound violated.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .certificate import (asymptotic_check, certificate, verify_trajectory)
from .config import ExperimentConfig, load_config
from .errors import (AssumptionViolated, CompatibilityViolated, ConfigError,
                     HorizonTooShort, KvStringError, NonPositiveCoefficient)
from .fd import simulate_fd
from .modal import save_trajectory_csv, simulate_spectral
from .scenarios import random_scenario, scenario_seed
from .spectrum import ModeIndex, mode_data

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ASSUMPTION = 2
EXIT_INCOMPATIBLE = 3
EXIT_VIOLATION = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems map to the config exit code
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kvstring",
                     description="Damped-string spectral toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="experiment YAML file")
        p.add_argument("--out", default=None, help="output directory "
                                                   "(default: outputs.directory)")
        plot = p.add_mutually_exclusive_group()
        plot.add_argument("--plots", dest="plots", action="store_true", default=None)
        plot.add_argument("--no-plots", dest="plots", action="store_false")

    p_spec = sub.add_parser("spectrum", help="eigenvalue/eigenfunction table")
    common(p_spec)
    p_spec.add_argument("--k-max", type=int, default=32)

    p_cert = sub.add_parser("certificate", help="stability certificate JSON")
    common(p_cert)
    p_cert.add_argument("--rel-tol", type=float, default=1e-6,
                        help="gain-sum tolerance")

    p_sim = sub.add_parser("simulate", help="trajectory CSVs")
    common(p_sim)
    p_sim.add_argument("--solver", choices=("spectral", "fd", "both"),
                       default="spectral")

    p_ver = sub.add_parser("verify", help="check trajectories against bounds")
    common(p_ver)
    p_ver.add_argument("--seed", type=int, default=None,
                       help="override verify.seed from the config")
    p_ver.add_argument("--debug-scale-c1", type=float, default=None,
                       help="scale the c1 gain before checking (negative control)")
    return parser


def _outdir(cfg: ExperimentConfig, args) -> str:
    out = args.out if args.out is not None else cfg.out_dir
    os.makedirs(out, exist_ok=True)
    return out


def _want_plots(cfg: ExperimentConfig, args) -> bool:
    return cfg.plots if args.plots is None else args.plots


def cmd_spectrum(cfg: ExperimentConfig, k_max: int, out: str, plots: bool) -> int:
    params = cfg.params
    rows = []
    for k in range(k_max + 1):
        for eps in (-1, +1):
            data = mode_data(params, ModeIndex(k, eps))
            rows.append({"k": k, "eps": eps,
                         "re_lambda": data.lam.real, "im_lambda": data.lam.imag,
                         "phi_norm": data.phi_norm,
                         "pairing_abs": abs(data.pairing),
                         "gamma": data.gamma,
                         "overdamped": int(k >= params.k0)})
    path = os.path.join(out, "spectrum.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "eps", "re_lambda", "im_lambda", "phi_norm",
                         "pairing_abs", "gamma", "overdamped"])
        for r in rows:
            writer.writerow([r["k"], r["eps"], f"{r['re_lambda']:.17g}",
                             f"{r['im_lambda']:.17g}", f"{r['phi_norm']:.17g}",
                             f"{r['pairing_abs']:.17g}", f"{r['gamma']:.17g}",
                             r["overdamped"]])
    print(f"spectrum: wrote {path} (k <= {k_max}, k0 = {params.k0})")
    if plots:
        from . import plots as plotmod
        plotmod.eigenvalue_map(rows, params.k0, os.path.join(out, "spectrum.png"))
    return EXIT_OK


def cmd_certificate(cfg: ExperimentConfig, rel_tol: float, out: str) -> int:
    cert = certificate(cfg.params, rel_tol)
    path = os.path.join(out, "certificate.json")
    cert.to_json(path)
    print(f"certificate: kappa0 = {cert.kappa0:.6g}, C = {cert.riesz_c:.6g}, "
          f"gamma = {cert.gamma:.6g}, gamma' = {cert.gamma_prime:.6g} -> {path}")
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig, solver: str, out: str, plots: bool) -> int:
    sim = cfg.simulation_config()
    traj_sp = traj_fd = None
    if solver in ("spectral", "both"):
        traj_sp = simulate_spectral(sim)
        path = os.path.join(out, "trajectory_spectral.csv")
        save_trajectory_csv(traj_sp, path, include_coefficients=cfg.csv_coefficients)
        print(f"simulate: wrote {path}")
    if solver in ("fd", "both"):
        traj_fd = simulate_fd(sim, cfg.fd_config())
        path = os.path.join(out, "trajectory_fd.csv")
        save_trajectory_csv(traj_fd, path)
        print(f"simulate: wrote {path}")
    if solver == "both":
        scale = max(float(np.max(traj_sp.h_norms)), 1e-300)
        rel = np.abs(traj_sp.h_norms - traj_fd.h_norms) / scale
        path = os.path.join(out, "discrepancy.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "norm_spectral", "norm_fd", "rel_diff"])
            for i, t in enumerate(traj_sp.times):
                writer.writerow([f"{t:.17g}", f"{traj_sp.h_norms[i]:.17g}",
                                 f"{traj_fd.h_norms[i]:.17g}", f"{rel[i]:.17g}"])
        print(f"simulate: wrote {path} (max rel_diff = {np.max(rel):.3g})")
    if plots:
        from . import plots as plotmod
        if traj_sp is not None:
            plotmod.trajectory_norms(traj_sp, os.path.join(out, "trajectory_spectral.png"))
        if traj_fd is not None:
            plotmod.trajectory_norms(traj_fd, os.path.join(out, "trajectory_fd.png"))
        if solver == "both":
            plotmod.solver_comparison(traj_sp.times, traj_sp.h_norms,
                                      traj_fd.h_norms, rel,
                                      os.path.join(out, "discrepancy.png"))
    return EXIT_OK


def _asymptotic_entry(traj) -> dict | None:
    try:
        peak, late, ratio = asymptotic_check(traj)
    except HorizonTooShort:
        return None
    return {"peak_norm": peak, "late_norm": late, "ratio": ratio}


def cmd_verify(cfg: ExperimentConfig, out: str, seed: int | None, plots: bool,
               scale_c1: float | None) -> int:
    cert = certificate(cfg.params)
    if scale_c1 is not None:
        cert = replace(cert, c1=cert.c1 * scale_c1)
    base_seed = cfg.verify_seed if seed is None else seed
    path = os.path.join(out, "verification.json")

    if cfg.verify_scenarios <= 0:
        traj = simulate_spectral(cfg.simulation_config())
        report = verify_trajectory(traj, cert, scenario="configured")
        doc = report.to_json_dict()
        doc["asymptotic"] = _asymptotic_entry(traj)
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"verify: {len(report.violations)} violations, "
              f"worst uniform ratio {report.worst_uniform_ratio:.4g} -> {path}")
        if plots:
            from . import plots as plotmod
            plotmod.verification_bounds(traj, report, os.path.join(out, "verification.png"))
        return EXIT_OK if report.ok else EXIT_VIOLATION

    entries = []
    total_violations = 0
    ratios_u, ratios_l = [], []
    for i in range(cfg.verify_scenarios):
        scen = random_scenario(cfg.params, scenario_seed(base_seed, i),
                               truncation=cfg.truncation)
        traj = simulate_spectral(scen)
        report = verify_trajectory(traj, cert, scenario=f"random-{i}")
        total_violations += len(report.violations)
        ratios_u.append(report.worst_uniform_ratio)
        ratios_l.append(report.worst_l2_ratio)
        entries.append({"scenario": report.scenario,
                        "worst_uniform_margin": report.worst_uniform_margin,
                        "worst_l2_margin": report.worst_l2_margin,
                        "worst_uniform_ratio": report.worst_uniform_ratio,
                        "worst_l2_ratio": report.worst_l2_ratio,
                        "violations": report.violations})
    doc = {"seed": base_seed, "scenarios": entries,
           "certificate": json.loads(cert.to_json()),
           "total_violations": total_violations,
           "worst_uniform_ratio": max(ratios_u),
           "worst_l2_ratio": max(ratios_l)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"verify: {cfg.verify_scenarios} scenarios, "
          f"{total_violations} violations -> {path}")
    if plots:
        from . import plots as plotmod
        plotmod.suite_margins(ratios_u, ratios_l, os.path.join(out, "verification.png"))
    return EXIT_OK if total_violations == 0 else EXIT_VIOLATION


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        out = _outdir(cfg, args)
        plots = _want_plots(cfg, args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.k_max, out, plots)
        if args.command == "certificate":
            return cmd_certificate(cfg, args.rel_tol, out)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.solver, out, plots)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.seed, plots, args.debug_scale_c1)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, NonPositiveCoefficient, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssumptionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except CompatibilityViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except KvStringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
