"""End-to-end acceptance gate.

Each test prints one pass/fail line for its criterion.  Criteria 1-8
share a single run of the property suites at 200 samples; 9 and 10 run
the bundled dynamics scenarios.
"""

import time

import numpy as np
import pytest

from gnk.cli import _noether_field, _noether_mechanics, _resolve_config
from gnk.noether import (builtin_generator, claim1_check, claim2_check,
                         proof_decomposition)
from gnk.grid import GridSection
from gnk.jet_bundle import OrdinaryCojetPoint
from gnk.scenarios_solver import (ScenarioConfig, scenario_bundle,
                                  scenario_hamiltonian,
                                  solve_klein_gordon)
from gnk.verify import (suite_actions, suite_algebroid, suite_groupoid,
                        suite_jet, suite_multiphase)

SEED = 0
SAMPLES = 200


@pytest.fixture(scope="module")
def suites():
    out = {}
    for name, fn in [("groupoid", suite_groupoid), ("jet", suite_jet),
                     ("algebroid", suite_algebroid),
                     ("actions", suite_actions),
                     ("multiphase", suite_multiphase)]:
        t0 = time.perf_counter()
        out[name] = (fn(seed=SEED, samples=SAMPLES),
                     time.perf_counter() - t0)
    return out


def _by_prop(checks, prop):
    got = [c for c in checks if c["property"] == prop]
    assert got, "no checks recorded for %s" % prop
    return got


def _report(num, label, ok, detail):
    print("ACCEPTANCE %02d %-4s %-34s %s"
          % (num, "PASS" if ok else "FAIL", label, detail))
    assert ok, "%s: %s" % (label, detail)


def test_01_groupoid_axioms(suites):
    checks, elapsed = suites["groupoid"]
    axioms = _by_prop(checks, "groupoid_axioms")
    closure = _by_prop(checks, "groupoid_closure")
    worst = max(c["max_residual"] for c in axioms + closure)
    n_min = min(c["n_samples"] for c in axioms)
    ok = (all(c["passed"] for c in axioms + closure)
          and len(axioms) == 4 and n_min >= 200 and worst < 1e-9
          and elapsed < 2.0)
    _report(1, "groupoid_axioms",
            ok, "worst=%.3g tol=1e-9 builtins=%d samples>=%d time=%.2fs"
            % (worst, len(axioms), n_min, elapsed))


def test_02_jet_groupoid(suites):
    checks, _ = suites["jet"]
    ax = _by_prop(checks, "jet_axioms")
    chain = _by_prop(checks, "jet_chain_rule")[0]
    iso = _by_prop(checks, "jet_frame_morphism")[0]
    worst_ax = max(c["max_residual"] for c in ax)
    ok = (all(c["passed"] for c in ax) and worst_ax < 1e-9
          and chain["n_samples"] >= 100
          and chain["max_residual"] < 1e-8
          and iso["max_residual"] < 1e-10)
    _report(2, "jet_groupoid",
            ok, "axioms=%.3g chain=%.3g(n=%d) iso=%.3g"
            % (worst_ax, chain["max_residual"], chain["n_samples"],
               iso["max_residual"]))


def test_03_jet_algebroid(suites):
    checks, _ = suites["algebroid"]
    anti = _by_prop(checks, "algebroid_antisymmetry")
    jac = _by_prop(checks, "algebroid_jacobi")
    prol = _by_prop(checks, "algebroid_prolongation_bracket")
    worst_anti = max(c["max_residual"] for c in anti)
    worst_jac = max(c["max_residual"] for c in jac)
    worst_prol = max(c["max_residual"] for c in prol)
    ok = (worst_anti == 0.0 and worst_jac < 1e-8 and worst_prol < 1e-8
          and len(anti) >= 2)   # TM and M x so(3)
    _report(3, "jet_algebroid",
            ok, "antisym=%.3g(exact) jacobi=%.3g bracket_pres=%.3g"
            % (worst_anti, worst_jac, worst_prol))


def test_04_exponential(suites):
    checks, _ = suites["algebroid"]
    unit = _by_prop(checks, "exponential_unit")[0]
    deriv = _by_prop(checks, "exponential_derivative")[0]
    onep = _by_prop(checks, "exponential_one_parameter")[0]
    ok = (unit["max_residual"] == 0.0
          and deriv["max_residual"] < 1e-6
          and onep["max_residual"] < 1e-7)
    _report(4, "exponential",
            ok, "unit=%.3g(exact) deriv=%.3g one_param=%.3g"
            % (unit["max_residual"], deriv["max_residual"],
               onep["max_residual"]))


def test_05_tangent_action(suites):
    checks, _ = suites["actions"]
    laws = max(c["max_residual"]
               for c in _by_prop(checks, "action_laws"))
    lin = max(c["max_residual"]
              for c in _by_prop(checks, "action_linearity"))
    cov = max(c["max_residual"]
              for c in _by_prop(checks, "action_frame_covering"))
    proj = _by_prop(checks, "action_projection_compat")[0]["max_residual"]
    ok = laws < 1e-9 and lin < 1e-12 and cov < 1e-10 and proj < 1e-6
    _report(5, "tangent_action",
            ok, "laws=%.3g lin=%.3g covering=%.3g projection=%.3g"
            % (laws, lin, cov, proj))


def test_06_cojet_form_equivariance(suites):
    checks, _ = suites["multiphase"]
    eq = _by_prop(checks, "cojet_form_equivariance")[0]
    ok = eq["max_residual"] < 1e-9 and eq["n_samples"] >= 200
    _report(6, "cojet_form_equivariance",
            ok, "residual=%.3g n=%d" % (eq["max_residual"],
                                        eq["n_samples"]))


def test_07_theta_omega_invariance(suites):
    checks, _ = suites["multiphase"]
    th = _by_prop(checks, "theta_invariance")[0]
    om = _by_prop(checks, "omega_invariance")[0]
    ctrl = _by_prop(checks, "omega_nonholonomous_control")[0]
    ok = (th["max_residual"] < 1e-7 and th["n_samples"] >= 200
          and om["max_residual"] < 1e-6 and om["n_samples"] >= 100
          and ctrl["max_residual"] > 1e-3)
    _report(7, "theta_omega_invariance",
            ok, "theta=%.3g(n=%d) omega=%.3g(n=%d) control=%.3g>1e-3"
            % (th["max_residual"], th["n_samples"], om["max_residual"],
               om["n_samples"], ctrl["max_residual"]))


def test_08_lagrangian_invariance(suites):
    checks, _ = suites["multiphase"]
    inv = _by_prop(checks, "lagrangian_invariance")[0]
    leg = _by_prop(checks, "legendre_equivariance")[0]
    ctrl = _by_prop(checks, "dilation_control")[0]
    ok = (inv["max_residual"] < 1e-9 and leg["max_residual"] < 1e-9
          and ctrl["max_residual"] > 1e-2)
    _report(8, "kg_invariance_legendre",
            ok, "invariance=%.3g legendre=%.3g dilation=%.3g>1e-2"
            % (inv["max_residual"], leg["max_residual"],
               ctrl["max_residual"]))


def test_09_noether_convergence():
    t0 = time.perf_counter()
    gens = {}
    for name in ("klein_gordon", "so2_doublet"):
        cfg = ScenarioConfig.from_toml(_resolve_config(name))
        report = {}
        _noether_field(cfg, report)
        assert report["resolutions"] == [64, 128, 256]
        for g in report["generators"]:
            if g["admissible"]:
                gens.setdefault(g["generator"], []).append(g)
    elapsed = time.perf_counter() - t0
    needed = {"time_translation", "space_translation", "boost",
              "so2_rotation"}
    ok = needed <= set(gens) and elapsed < 60.0
    details = []
    for name in sorted(needed):
        for g in gens[name]:
            ratio = g["convergence_ratios"][-1]
            ok = ok and 3.2 <= ratio <= 4.8 and g["charge_drift"] < 0.005
            details.append("%s:r=%.2f,d=%.1e"
                           % (name, ratio, g["charge_drift"]))
    mech = ScenarioConfig.from_toml(_resolve_config("mechanics"))
    mech_report = {}
    _noether_mechanics(mech, mech_report)
    spread = mech_report["generators"][0]["charge_spread"]
    ok = ok and mech_report["passed"] and spread < 1e-8
    _report(9, "noether_convergence",
            ok, "%s mech_spread=%.2g time=%.1fs"
            % (" ".join(details), spread, elapsed))


def test_10_proof_decomposition(rng):
    def solved(r):
        cfg = ScenarioConfig.from_toml(
            _resolve_config("so2_doublet")).with_resolution(r)
        phi = solve_klein_gordon(cfg)
        return cfg, phi, scenario_hamiltonian(cfg)

    cfg, phi, H = solved(64)
    E = scenario_bundle(cfg)
    gen = builtin_generator("so2_rotation", E)

    samples = []
    for _ in range(10):
        z = OrdinaryCojetPoint(rng.uniform(0.1, 0.4, 2),
                               0.5 * rng.standard_normal(2),
                               0.5 * rng.standard_normal((2, 2)))
        samples.append((z, [rng.standard_normal(8) for _ in range(2)]))
    c1 = claim1_check(H, gen, samples)

    idx = (24, 30)
    c2_64 = abs(claim2_check(H, phi, gen, idx))
    _, phi32, H32 = solved(32)
    c2_32 = abs(claim2_check(H32, phi32, gen, (12, 15)))
    ratio = c2_32 / max(c2_64, 1e-300)

    broken = GridSection(phi.origin, phi.spacing, phi.shape,
                         phi.y + 0.3 * np.sin(5.0 * np.arange(
                             phi.shape[1]))[None, None, :],
                         P=phi.P, periodic=phi.periodic)
    c2_bad = abs(claim2_check(H, broken, gen, idx))

    # the decomposition identity holds to combined grid truncation:
    # the divergence/sum gap is itself O(grid^2) and stays below the
    # claim-2 truncation scale
    div64, tot64 = proof_decomposition(H, phi, gen, idx)
    div32, tot32 = proof_decomposition(H32, phi32, gen, (12, 15))
    gap64, gap32 = abs(div64 - tot64), abs(div32 - tot32)
    gap_ratio = gap32 / max(gap64, 1e-300)

    ok = (c1 < 1e-5 and 2.5 < ratio < 6.0 and c2_bad > 50.0 * c2_64
          and gap64 < c2_64 and 2.5 < gap_ratio < 6.0)
    _report(10, "proof_decomposition",
            ok, "claim1=%.3g claim2_ratio=%.2f off_shell=%.3g "
            "gap=%.3g(ratio=%.2f)" % (c1, ratio, c2_bad, gap64,
                                      gap_ratio))
