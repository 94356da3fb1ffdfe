"""Command-line entry point.

Commands:

* ``gnk verify [suite] [--seed N] [--samples N] [--json OUT]`` — run the
  property suites (all, or one of groupoid/jet/algebroid/actions/
  multiphase).
* ``gnk noether --config FILE [--csv DIR] [--json OUT]`` — solve a TOML
  scenario and check Noether-current conservation across a grid triplet
  (or the energy drift for mechanics).  ``FILE`` may also name a bundled
  scenario (see ``gnk list``).
* ``gnk list [--json]`` — built-in groupoids, actions, lagrangians,
  generators and bundled scenarios.

Exit codes: 0 all checks passed, 1 a property/conservation check
failed, 2 usage or configuration error.  ``GNK_THREADS`` caps the
number of parallel workers.  Reports embed the run manifest; identical
(command, config, seed) runs produce byte-identical JSON apart from the
``timestamp`` field.
"""

import argparse
import csv
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from gnk.errors import AdmissibilityError, ConfigError, GnkError
from gnk.scenarios_solver import (ScenarioConfig, conservation_report,
                                  scenario_hamiltonian, solve_scenario)
from gnk.noether import builtin_generator, divergence_field, noether_current
from gnk.verify import SUITES, TOLERANCES, run_suites

__all__ = ["main"]

NOETHER_GATES = {
    "convergence_ratio": [3.2, 4.8],   # factor 4 +- 20% per halving
    "charge_drift": 0.005,
    "mechanics_energy_drift": 1e-8,
}


def _max_workers():
    raw = os.environ.get("GNK_THREADS", "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError("GNK_THREADS must be an integer") from None
    if value < 1:
        raise ConfigError("GNK_THREADS must be positive")
    return value


def _manifest(command, config=None, seed=None, output_dir=None,
              tolerance_overrides=None):
    return {"command": command,
            "config": None if config is None else str(config),
            "seed": seed,
            "tolerance_overrides": tolerance_overrides or {},
            "output_dir": None if output_dir is None else str(output_dir),
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ",
                                       time.gmtime())}


def _write_json(path, report):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def _scenario_dir():
    return resources.files("gnk").joinpath("scenarios")


def _bundled_scenarios():
    return sorted(p.name for p in _scenario_dir().iterdir()
                  if p.name.endswith(".toml"))


def _resolve_config(arg):
    p = Path(arg)
    if p.exists():
        return p
    name = arg if arg.endswith(".toml") else arg + ".toml"
    bundled = _scenario_dir().joinpath(name)
    if bundled.is_file():
        return bundled
    raise ConfigError("config file %s not found" % arg)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args):
    report = run_suites(names=args.suite, seed=args.seed,
                        samples=args.samples,
                        max_workers=_max_workers())
    report["manifest"] = _manifest("verify", seed=args.seed,
                                   output_dir=args.json)
    for c in report["checks"]:
        print("%-4s %-10s %-30s max_residual=%-12.4g tol=%g%s" % (
            "ok" if c["passed"] else "FAIL", c["suite"], c["property"],
            c["max_residual"], c["tolerance"],
            " (must exceed)" if c["mode"] == "min" else ""))
    if args.json:
        _write_json(args.json, report)
    if report["passed"]:
        print("verify: %d/%d checks passed" % (report["n_checks"],
                                               report["n_checks"]))
        return 0
    worst = report["worst_failure"]
    print("verify: %d of %d checks FAILED; worst offender: %s/%s "
          "residual %.6g vs tolerance %g" % (
              report["n_failed"], report["n_checks"], worst["suite"],
              worst["property"], worst["max_residual"],
              worst["tolerance"]))
    return 1


# ---------------------------------------------------------------------------
# noether


def _csv_path(directory, scenario, generator):
    return Path(directory) / ("%s_%s.csv" % (scenario, generator))


def _write_current_csv(path, phi, J, div):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if phi.n == 1:
            writer.writerow(["t", "J0", "divergence"])
            for j in range(phi.shape[0]):
                t = phi.origin[0] + phi.spacing[0] * j
                writer.writerow(["%.17g" % t, "%.17g" % J[0, j],
                                 "%.17g" % div[j]])
            return
        writer.writerow(["x", "t", "J0", "J1", "divergence"])
        nt, nx = phi.shape
        for j in range(nt):
            t = phi.origin[0] + phi.spacing[0] * j
            for i in range(nx):
                x = phi.origin[1] + phi.spacing[1] * i
                writer.writerow(["%.17g" % x, "%.17g" % t,
                                 "%.17g" % J[0, j, i],
                                 "%.17g" % J[1, j, i],
                                 "%.17g" % div[j, i]])


def _emit_csv(cfg, phi, H, entries, directory):
    os.makedirs(directory, exist_ok=True)
    from gnk.scenarios_solver import scenario_bundle
    E = scenario_bundle(cfg)
    written = []
    for entry in entries:
        if not entry.get("admissible"):
            continue
        gen = builtin_generator(entry["generator"], E)
        J = noether_current(H, phi, gen)
        div, _ = divergence_field(phi, J, seam_safe=gen.seam_safe)
        path = _csv_path(directory, cfg.name, entry["generator"])
        _write_current_csv(path, phi, J, div)
        written.append(str(path))
    return written


def _noether_field(cfg, report):
    """Convergence triplet for a field scenario: quarter, half and full
    resolution, with per-generator ratios across consecutive grids."""
    r = int(cfg.section("manifold").get("resolution", 256))
    if r % 4:
        raise ConfigError("field resolution must be divisible by 4")
    resolutions = [r // 4, r // 2, r]
    stats = {}
    finest = None
    for res in resolutions:
        sub = cfg.with_resolution(res)
        phi = solve_scenario(sub)
        H = scenario_hamiltonian(sub)
        rep = conservation_report(sub, phi, H)
        finest = (sub, phi, H, rep)
        for entry in rep["generators"]:
            stats.setdefault(entry["generator"], []).append(entry)
    report["resolutions"] = resolutions
    lo, hi = NOETHER_GATES["convergence_ratio"]
    drift_tol = NOETHER_GATES["charge_drift"]
    gens = []
    all_ok = True
    for name, entries in stats.items():
        fin = entries[-1]
        out = {"generator": name, "admissible": fin["admissible"],
               "expected_fail": fin["expected_fail"]}
        if not fin["admissible"]:
            out["rejection"] = fin["rejection"]
            out["passed"] = fin["expected_fail"]
            all_ok = all_ok and out["passed"]
            gens.append(out)
            continue
        ratios = [entries[i]["max_abs_divergence"]
                  / entries[i + 1]["max_abs_divergence"]
                  for i in range(len(entries) - 1)]
        out["max_abs_divergence"] = [e["max_abs_divergence"]
                                     for e in entries]
        out["mean_abs_divergence"] = [e["mean_abs_divergence"]
                                      for e in entries]
        out["convergence_ratios"] = ratios
        out["charge_drift"] = fin["charge_drift"]
        out["charge_first"] = fin["charge_first"]
        out["charge_last"] = fin["charge_last"]
        out["passed"] = bool(lo <= ratios[-1] <= hi
                             and fin["charge_drift"] < drift_tol)
        all_ok = all_ok and out["passed"]
        gens.append(out)
    report["generators"] = gens
    report["gates"] = {"convergence_ratio": [lo, hi],
                       "charge_drift": drift_tol}
    report["sign_convention"] = \
        "d^n x_mu = i_(d_mu) (dx^1 ^ ... ^ dx^n)"
    report["passed"] = bool(all_ok)
    return finest


def _noether_mechanics(cfg, report):
    phi = solve_scenario(cfg)
    H = scenario_hamiltonian(cfg)
    rep = conservation_report(cfg, phi, H)
    tol = NOETHER_GATES["mechanics_energy_drift"]
    gens = []
    all_ok = True
    for entry in rep["generators"]:
        out = {"generator": entry["generator"],
               "admissible": entry["admissible"],
               "expected_fail": entry["expected_fail"]}
        if not entry["admissible"]:
            out["rejection"] = entry["rejection"]
            out["passed"] = entry["expected_fail"]
        else:
            out["max_abs_divergence"] = entry["max_abs_divergence"]
            out["charge_spread"] = entry["charge_spread"]
            out["charge_first"] = entry["charge_first"]
            out["passed"] = bool(entry["charge_spread"] < tol)
        all_ok = all_ok and out["passed"]
        gens.append(out)
    report["resolutions"] = [phi.shape[0]]
    report["generators"] = gens
    report["gates"] = {"mechanics_energy_drift": tol}
    report["passed"] = bool(all_ok)
    return cfg, phi, H, rep


def cmd_noether(args):
    path = _resolve_config(args.config)
    cfg = ScenarioConfig.from_toml(path)
    report = {"manifest": _manifest("noether", config=path, seed=cfg.seed,
                                    output_dir=args.csv or args.json),
              "scenario": cfg.name, "kind": cfg.kind}
    if cfg.kind == "mechanics":
        fin_cfg, phi, H, _ = _noether_mechanics(cfg, report)
    else:
        fin_cfg, phi, H, _ = _noether_field(cfg, report)
    for g in report["generators"]:
        if not g["admissible"]:
            print("%-4s %-18s rejected: %s%s" % (
                "ok" if g["passed"] else "FAIL", g["generator"],
                g["rejection"],
                " (expected)" if g["expected_fail"] else ""))
        elif cfg.kind == "mechanics":
            print("%-4s %-18s energy_spread=%.4g" % (
                "ok" if g["passed"] else "FAIL", g["generator"],
                g["charge_spread"]))
        else:
            print("%-4s %-18s ratios=%s drift=%.4g" % (
                "ok" if g["passed"] else "FAIL", g["generator"],
                ["%.3f" % r for r in g["convergence_ratios"]],
                g["charge_drift"]))
    if args.csv:
        report["csv_files"] = _emit_csv(fin_cfg, phi, H,
                                        [{"generator": g["generator"],
                                          "admissible": g["admissible"]}
                                         for g in report["generators"]],
                                        args.csv)
    if args.json:
        _write_json(args.json, report)
    print("noether: %s" % ("all gates passed" if report["passed"]
                           else "FAILED"))
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------------------
# list


def cmd_list(args):
    from gnk.groupoid import _BUILTIN_GROUPOIDS
    from gnk.actions import _BUILTIN_ACTIONS
    data = {
        "groupoids": sorted(_BUILTIN_GROUPOIDS),
        "actions": sorted(_BUILTIN_ACTIONS),
        "lagrangians": ["free_particle", "klein_gordon", "so2_doublet"],
        "generators": ["boost", "dilation", "so2_rotation",
                       "space_translation", "time_translation"],
        "suites": sorted(SUITES),
        "scenarios": _bundled_scenarios(),
    }
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
        return 0
    for key in ("groupoids", "actions", "lagrangians", "generators",
                "suites", "scenarios"):
        print("%s:" % key)
        for name in data[key]:
            print("  %s" % name)
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gnk",
        description="Property verification and conservation experiments "
                    "for groupoid-covariant field theory.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run property suites")
    p_verify.add_argument("suite", nargs="?", default="all",
                          choices=["all"] + sorted(SUITES))
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=200)
    p_verify.add_argument("--json", metavar="OUT",
                          help="write the JSON report here")
    p_verify.set_defaults(func=cmd_verify)

    p_noe = sub.add_parser("noether",
                           help="solve a scenario and check conservation")
    p_noe.add_argument("--config", required=True,
                       help="TOML scenario file or bundled scenario name")
    p_noe.add_argument("--csv", metavar="DIR",
                       help="write per-generator current traces here")
    p_noe.add_argument("--json", metavar="OUT",
                       help="write the JSON summary here")
    p_noe.set_defaults(func=cmd_noether)

    p_list = sub.add_parser("list", help="show built-ins")
    p_list.add_argument("--json", action="store_true")
    p_list.set_defaults(func=cmd_list)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except GnkError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
