"""Desk-scale dynamics feeding the conservation machinery.

Two solvers produce :class:`~gnk.grid.GridSection` solutions:

* 1+1-dimensional Klein--Gordon, phi_tt = phi_xx - m^2 phi (any number
  of field components), leapfrog in time, periodic in space, CFL-gated;
  momenta are the Legendre momenta of the grid jets, P = (phi_t, -phi_x).
* 1-dimensional point mechanics, RK4, with the RK4 velocity stored as
  the momentum.

``conservation_report`` runs the admissibility gate and the Noether
current/divergence/charge statistics for a list of generators.  Charge
drifts are normalized by the largest charge magnitude among the
scenario's admissible generators, so near-zero charges (e.g. total
momentum of a standing wave) do not produce 0/0 noise.
"""

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from gnk.errors import (AdmissibilityError, ConfigError, GridError,
                        StabilityError)
from gnk.grid import GridSection
from gnk.manifold_bundle import ChartManifold, trivial_bundle
from gnk.multiphase import builtin_lagrangian, dedonder_hamiltonian
from gnk.noether import (builtin_generator, check_admissible,
                         divergence_field, noether_current)

__all__ = [
    "ScenarioConfig", "scenario_bundle", "scenario_lagrangian",
    "scenario_hamiltonian", "solve_scenario", "solve_klein_gordon",
    "solve_mechanics", "conservation_report",
]

_SCHEMA = {
    "scenario": {"name", "kind", "seed"},
    "manifold": {"t_extent", "x_extent", "resolution", "nt", "fields"},
    "lagrangian": {"name", "mass", "metric_signature", "omega"},
    "initial": {"profile", "amplitude", "mode", "width", "center",
                "position", "velocity"},
    "generators": {"names", "expected_fail"},
}


class ScenarioConfig:
    """Validated scenario description loaded from TOML."""

    def __init__(self, data):
        for section, entries in data.items():
            if section not in _SCHEMA:
                raise ConfigError("unknown config section %r" % section)
            if not isinstance(entries, dict):
                raise ConfigError("section %r must be a table" % section)
            for key in entries:
                if key not in _SCHEMA[section]:
                    raise ConfigError(
                        "unknown key %r in section %r" % (key, section))
        self.data = data
        try:
            self.kind = data["scenario"]["kind"]
            self.name = data["scenario"].get("name", self.kind)
        except KeyError:
            raise ConfigError("config needs [scenario] kind") from None
        if self.kind not in ("klein_gordon", "mechanics"):
            raise ConfigError("unknown scenario kind %r" % self.kind)
        self.seed = int(data["scenario"].get("seed", 0))

    @classmethod
    def from_toml(cls, path):
        try:
            with open(path, "rb") as fh:
                return cls(tomllib.load(fh))
        except FileNotFoundError:
            raise ConfigError("config file %s not found" % path) from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("invalid TOML: %s" % exc) from None

    def section(self, name):
        return dict(self.data.get(name, {}))

    def with_resolution(self, r):
        data = {k: dict(v) for k, v in self.data.items()}
        data.setdefault("manifold", {})["resolution"] = int(r)
        return ScenarioConfig(data)


def scenario_bundle(cfg):
    man = cfg.section("manifold")
    k = int(man.get("fields", 1))
    t0, t1 = man.get("t_extent", [0.0, 0.5])
    if cfg.kind == "mechanics":
        base = ChartManifold(1, [(t0, t1)], name="time")
    else:
        x0, x1 = man.get("x_extent", [0.0, 1.0])
        base = ChartManifold(2, [(t0, t1), (x0, x1)], name="spacetime")
    return trivial_bundle(base, k, half_width=10.0)


def scenario_lagrangian(cfg, E=None):
    E = scenario_bundle(cfg) if E is None else E
    lag = cfg.section("lagrangian")
    name = lag.pop("name", "klein_gordon"
                   if cfg.kind == "klein_gordon" else "free_particle")
    params = {}
    if "mass" in lag:
        params["mass"] = float(lag["mass"])
    if "omega" in lag:
        params["omega"] = float(lag["omega"])
    if "metric_signature" in lag:
        params["metric"] = np.diag([float(s)
                                    for s in lag["metric_signature"]])
    return builtin_lagrangian(name, E, **params)


def scenario_hamiltonian(cfg, L=None):
    """De Donder--Weyl Hamiltonian of the scenario Lagrangian, with a
    vectorized ``grid_value(X, Y, P)`` attached for the built-in
    quadratic densities."""
    L = scenario_lagrangian(cfg) if L is None else L
    H = dedonder_hamiltonian(L)
    lag = cfg.section("lagrangian")
    n = L.E.base.dim
    if cfg.kind == "mechanics":
        om2 = float(lag.get("omega", 0.0)) ** 2

        def grid_value(X, Y, P):
            return 0.5 * np.sum(P[:, 0] ** 2, axis=0) \
                + 0.5 * om2 * np.sum(Y ** 2, axis=0)
    else:
        sig = np.asarray(lag.get("metric_signature",
                                 [1.0] + [-1.0] * (n - 1)), dtype=float)
        m2 = float(lag.get("mass", 0.0)) ** 2

        def grid_value(X, Y, P):
            h = 0.5 * m2 * np.sum(Y ** 2, axis=0)
            for mu in range(n):
                h = h + 0.5 * sig[mu] * np.sum(P[:, mu] ** 2, axis=0)
            return h

    H.grid_value = grid_value
    return H


# ---------------------------------------------------------------------------
# initial data


def _initial_kg(cfg, x, k, mass):
    ini = cfg.section("initial")
    profile = ini.get("profile", "sine")
    amp = float(ini.get("amplitude", 1.0))
    mode = int(ini.get("mode", 1))
    span = x[-1] - x[0] + (x[1] - x[0])
    kap = 2.0 * np.pi * mode / span
    y0 = np.zeros((k, len(x)))
    v0 = np.zeros((k, len(x)))
    if profile == "sine":
        for a in range(k):
            y0[a] = amp * np.sin(kap * x)
    elif profile == "gaussian":
        w = float(ini.get("width", 0.1))
        c = float(ini.get("center", 0.5 * (x[0] + x[-1])))
        for a in range(k):
            y0[a] = amp * np.exp(-((x - c) / w) ** 2)
    elif profile == "plane_wave":
        om = np.sqrt(kap ** 2 + mass ** 2)
        for a in range(k):
            y0[a] = amp * np.cos(kap * x)
            v0[a] = amp * om * np.sin(kap * x)
    elif profile == "doublet_wave":
        if k != 2:
            raise ConfigError("doublet_wave needs two field components")
        om = np.sqrt(kap ** 2 + mass ** 2)
        y0[0] = amp * np.cos(kap * x)
        y0[1] = amp * np.sin(kap * x)
        v0[0] = amp * om * np.sin(kap * x)
        v0[1] = -amp * om * np.cos(kap * x)
    elif profile == "standing_doublet":
        # zero net momentum (boost-charge friendly) but a nonzero
        # internal rotation charge: phi = A sin(kx) (cos wt, sin wt)
        if k != 2:
            raise ConfigError("standing_doublet needs two components")
        om = np.sqrt(kap ** 2 + mass ** 2)
        y0[0] = amp * np.sin(kap * x)
        v0[1] = amp * om * np.sin(kap * x)
    elif profile == "gaussian_doublet":
        # generic (many-mode) doublet pulse: nonzero internal rotation
        # charge, zero net momentum.  Single-mode doublet data makes
        # the leapfrog currents exactly or super-convergently conserved,
        # hiding the generic second-order truncation error.
        if k != 2:
            raise ConfigError("gaussian_doublet needs two components")
        w = float(ini.get("width", 0.1))
        c = float(ini.get("center", 0.5 * (x[0] + x[-1])))
        bump = amp * np.exp(-((x - c) / w) ** 2)
        y0[0] = bump
        v0[1] = bump
    elif profile == "zero":
        pass
    else:
        raise ConfigError("unknown initial profile %r" % profile)
    return y0, v0


# ---------------------------------------------------------------------------
# solvers


def solve_klein_gordon(cfg):
    """Leapfrog for phi_tt = phi_xx - m^2 phi on a periodic spatial
    grid; momenta P = (phi_t, -phi_x) by second-order differences
    (one-sided at the first/last time level)."""
    man = cfg.section("manifold")
    r = int(man.get("resolution", 64))
    nt = int(man.get("nt", r))
    nx = r
    k = int(man.get("fields", 1))
    t0, t1 = man.get("t_extent", [0.0, 0.5])
    x0, x1 = man.get("x_extent", [0.0, 1.0])
    mass = float(cfg.section("lagrangian").get("mass", 0.0))
    dt = (t1 - t0) / (nt - 1)
    dx = (x1 - x0) / nx
    if dt > 0.9 * dx:
        raise StabilityError(
            "CFL violation: dt = %g > 0.9 dx = %g" % (dt, 0.9 * dx))
    x = x0 + dx * np.arange(nx)
    y = np.zeros((k, nt, nx))
    y0, v0 = _initial_kg(cfg, x, k, mass)

    def lap(f):
        return (np.roll(f, -1, axis=-1) - 2.0 * f
                + np.roll(f, 1, axis=-1)) / dx ** 2

    y[:, 0] = y0
    y[:, 1] = y0 + dt * v0 + 0.5 * dt ** 2 * (lap(y0) - mass ** 2 * y0)
    for j in range(1, nt - 1):
        y[:, j + 1] = (2.0 * y[:, j] - y[:, j - 1]
                       + dt ** 2 * (lap(y[:, j]) - mass ** 2 * y[:, j]))
    if not np.all(np.isfinite(y)):
        raise StabilityError("field blew up (non-finite values)")

    # Momenta are the Legendre momenta of the centered grid jets; the
    # first/last time slabs have no centered jet and stay NaN, which the
    # interior masks downstream exclude automatically.
    P = np.full((k, 2, nt, nx), np.nan)
    P[:, 0, 1:-1] = (y[:, 2:] - y[:, :-2]) / (2.0 * dt)
    P[:, 1] = -(np.roll(y, -1, axis=-1) - np.roll(y, 1, axis=-1)) \
        / (2.0 * dx)
    meta = {"scenario": cfg.name, "kind": cfg.kind, "seed": cfg.seed,
            "resolution": r, "mass": mass}
    return GridSection([t0, x0], [dt, dx], (nt, nx), y, P=P,
                       periodic=(False, True), meta=meta)


def solve_mechanics(cfg):
    """RK4 trajectory of q-ddot = -dV/dq; the stored momentum is the
    RK4 velocity (the Legendre momentum of the exact trajectory)."""
    man = cfg.section("manifold")
    nt = int(man.get("resolution", 2001))
    k = int(man.get("fields", 1))
    t0, t1 = man.get("t_extent", [0.0, 1.0])
    om2 = float(cfg.section("lagrangian").get("omega", 0.0)) ** 2
    ini = cfg.section("initial")
    q = np.asarray(ini.get("position", [1.0] * k), dtype=float)
    v = np.asarray(ini.get("velocity", [0.0] * k), dtype=float)
    if q.shape != (k,) or v.shape != (k,):
        raise ConfigError("initial position/velocity need %d entries" % k)
    dt = (t1 - t0) / (nt - 1)
    y = np.zeros((k, nt))
    P = np.zeros((k, 1, nt))

    def acc(qv):
        return -om2 * qv

    y[:, 0], P[:, 0, 0] = q, v
    for j in range(nt - 1):
        k1q, k1v = v, acc(q)
        k2q, k2v = v + 0.5 * dt * k1v, acc(q + 0.5 * dt * k1q)
        k3q, k3v = v + 0.5 * dt * k2v, acc(q + 0.5 * dt * k2q)
        k4q, k4v = v + dt * k3v, acc(q + dt * k3q)
        q = q + (dt / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
        v = v + (dt / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        y[:, j + 1], P[:, 0, j + 1] = q, v
    if not np.all(np.isfinite(y)):
        raise StabilityError("trajectory blew up (non-finite values)")
    meta = {"scenario": cfg.name, "kind": cfg.kind, "seed": cfg.seed,
            "resolution": nt}
    return GridSection([t0], [dt], (nt,), y, P=P, periodic=(False,),
                       meta=meta)


def solve_scenario(cfg):
    if cfg.kind == "mechanics":
        return solve_mechanics(cfg)
    return solve_klein_gordon(cfg)


# ---------------------------------------------------------------------------
# conservation report


def _metric_of(cfg, n):
    sig = cfg.section("lagrangian").get(
        "metric_signature", [1.0] + [-1.0] * (n - 1))
    return np.diag([float(s) for s in sig])


def _charges(phi, J):
    """Integrated charge of J^0 over each interior constant-time slice."""
    if phi.n == 1:
        sl = J[0, 1:-1]
        times = phi.origin[0] + phi.spacing[0] * np.arange(1,
                                                           phi.shape[0] - 1)
        return times, sl
    q = np.sum(J[0, 1:-1], axis=-1) * phi.spacing[1]
    times = phi.origin[0] + phi.spacing[0] * np.arange(1, phi.shape[0] - 1)
    return times, q


def conservation_report(cfg, phi, H, generator_names=None,
                        expected_fail=None):
    """Per-generator divergence and charge statistics on a solution."""
    gen_cfg = cfg.section("generators")
    if generator_names is None:
        generator_names = gen_cfg.get("names", ["time_translation"])
    if expected_fail is None:
        expected_fail = gen_cfg.get("expected_fail", [])
    E = scenario_bundle(cfg)
    metric = _metric_of(cfg, E.base.dim)
    probe = [E.base.box[:, 0] + f * (E.base.box[:, 1] - E.base.box[:, 0])
             for f in (0.25, 0.5, 0.75)]
    entries = []
    charge_scale = 0.0
    for name in list(generator_names) + list(expected_fail):
        gen = builtin_generator(name, E)
        entry = {"generator": name,
                 "expected_fail": name in expected_fail}
        try:
            check_admissible(gen, metric, probe)
            entry["admissible"] = True
        except AdmissibilityError as exc:
            entry["admissible"] = False
            entry["rejection"] = str(exc)
            entries.append(entry)
            continue
        J = noether_current(H, phi, gen)
        div, mask = divergence_field(phi, J, seam_safe=gen.seam_safe)
        vals = np.abs(div[mask])
        entry["max_abs_divergence"] = float(np.max(vals))
        entry["mean_abs_divergence"] = float(np.mean(vals))
        times, q = _charges(phi, J)
        entry["charge_first"] = float(q[0])
        entry["charge_last"] = float(q[-1])
        entry["charge_spread"] = float(np.max(q) - np.min(q))
        entry["_charges"] = (times, q)
        charge_scale = max(charge_scale, float(np.max(np.abs(q))))
        entries.append(entry)
    for entry in entries:
        if "_charges" not in entry:
            continue
        times, q = entry.pop("_charges")
        entry["charge_drift"] = entry["charge_spread"] \
            / max(charge_scale, 1e-30)
        entry["charges"] = [[float(t), float(c)]
                            for t, c in zip(times, q)]
    ok = all(e["admissible"] or e["expected_fail"] for e in entries)
    return {"scenario": cfg.name, "kind": cfg.kind,
            "grid": {"shape": list(phi.shape),
                     "spacing": phi.spacing.tolist()},
            "sign_convention":
                "d^n x_mu = i_(d_mu) (dx^1 ^ ... ^ dx^n)",
            "generators": entries, "gate_ok": bool(ok)}
