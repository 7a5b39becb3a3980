"""Command-line front end: figure data, potentials, charges, statistics.

Every command writes either CSV (header row, comma separators, %.12e
floats, LF endings) or JSON (UTF-8, sorted keys) and is deterministic for
a fixed configuration.  Exit codes: 0 success, 2 configuration error,
3 numeric failure; errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import fields, statistics as stats
from .errors import (
    ConfigError,
    DivergentIntegral,
    EmptySupport,
    MilneQEDError,
    NonFinite,
    ToleranceNotMet,
)
from .numerics import CutoffProfile, QuadratureSpec, RDistribution

SCHEMA_VERSION = 1

_DEFAULTS = {
    "fig1": {"k1": 0.0, "k2": 1e4, "eps": 0.0, "q": None,
             "r_min": None, "r_max": None, "points": 500},
    "fig2": {"k1": 0.0, "k2": 1e3, "eps": 0.0, "q": None,
             "r_min": None, "r_max": None, "points": 400},
    "potential": {"k1": 0.0, "k2": 100.0, "eps": 0.0, "q": None,
                  "tau": "0,0.01,0.1,1", "r_min": 1e-3, "r_max": 1.0,
                  "points": 120},
    "charge": {"k1": 150.0, "k2": 1e3, "eps": 50.0, "q": None,
               "r_max": None, "points": 24},
    "stats": {"k1": 0.0, "k2": 1.0, "eps": 0.0, "q": None, "tau": 10.0,
              "N": "1,10,100,inf", "u_rapidity": 0.0, "r_rapidity": 1.0,
              "n_max": None},
    "brems": {"k1": 0.1, "k2": 1.0, "eps": 0.0, "q": None, "tau1": 0.0,
              "dtau": 300.0, "u_rapidity": 0.0, "v_rapidity": 1.0,
              "r_rapidity": 0.5},
}

# renormalized charge used when no bare charge is given
_DEFAULT_QREN = {"fig1": 1.0, "fig2": 1.0, "potential": 1.0, "charge": 1.0,
                 "stats": 0.5, "brems": 0.5}


def _fmt(x):
    return "%.12e" % float(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        if math.isinf(obj):
            return "inf"
        return float(_fmt(obj))
    if isinstance(obj, (int, np.integer, str, bool)) or obj is None:
        return obj
    raise TypeError(f"cannot serialize {type(obj)}")


def _write_text(out, text):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _write_csv(out, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _write_text(out, "\n".join(lines) + "\n")


def _write_json(out, payload):
    payload = dict(payload)
    payload["schema"] = SCHEMA_VERSION
    _write_text(out, json.dumps(_jsonable(payload), sort_keys=True,
                                indent=2, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------

def _merge_config(command, args):
    cfg = dict(_DEFAULTS[command])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        unknown = set(file_cfg) - set(cfg) - {"schema", "tol", "out"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k: v for k, v in file_cfg.items() if k != "schema"})
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["tol"] = args.tol if args.tol is not None else cfg.get("tol")
    cfg["out"] = args.out if args.out is not None else cfg.get("out")
    return cfg


def _spec(cfg, angular_order=48):
    tol = cfg.get("tol")
    if tol is None:
        return QuadratureSpec(angular_order=angular_order)
    if tol <= 0:
        raise ConfigError("tolerance must be positive")
    return QuadratureSpec(rel_tol=tol, abs_tol=tol * 1e-3,
                          angular_order=angular_order)


def _profile(cfg):
    k1, k2, eps = float(cfg["k1"]), float(cfg["k2"]), float(cfg.get("eps") or 0.0)
    if k2 <= k1 or k1 < 0.0:
        raise ConfigError(f"need 0 <= k1 < k2, got ({k1}, {k2})")
    try:
        if eps > 0.0:
            return CutoffProfile.smoothed(k1, k2, eps)
        return CutoffProfile.step(k1, k2)
    except (EmptySupport, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _charge_params(cfg, command):
    profile = _profile(cfg)
    if cfg.get("q") is not None:
        return fields.StaticChargeParams(q=float(cfg["q"]), profile=profile)
    qren = _DEFAULT_QREN[command]
    return fields.StaticChargeParams(q=qren / profile.q_ren(1.0), profile=profile)


def _log_grid(r_min, r_max, points):
    if points < 1 or r_max <= r_min or r_min <= 0.0:
        raise ConfigError("grid needs r_max > r_min > 0 and points >= 1")
    decades = math.log10(r_max / r_min)
    points = min(int(points), max(1, int(200 * decades)))
    return np.logspace(math.log10(r_min), math.log10(r_max), points)


def _parse_n_list(text):
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        if item in ("inf", "infinity", "oo"):
            out.append(math.inf)
        else:
            try:
                out.append(int(item))
            except ValueError as exc:
                raise ConfigError(f"bad N value {item!r}") from exc
    if not out:
        raise ConfigError("empty N list")
    return out


def _parse_float_list(text):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}") from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_fig1(cfg):
    params = _charge_params(cfg, "fig1")
    k1, k2 = params.profile.k1, params.profile.k2
    qr = params.q_ren
    r_min = cfg["r_min"] if cfg["r_min"] is not None else 1e-2 / k2
    r_max = cfg["r_max"] if cfg["r_max"] is not None else 1e4 / k2
    rs = _log_grid(float(r_min), float(r_max), int(cfg["points"]))
    from .numerics import sine_integral
    coulomb = qr / (4.0 * math.pi * rs)
    asympt = fields.potential_asymptotic(rs, params)
    si_k1 = -qr * sine_integral(k1 * rs) / (2.0 * math.pi ** 2 * rs)
    _write_csv(cfg["out"], ["r", "coulomb", "a_asympt", "si_k1_part"],
               zip(rs, coulomb, asympt, si_k1))
    return 0


def cmd_fig2(cfg):
    params = _charge_params(cfg, "fig2")
    k2 = params.profile.k2
    r_min = cfg["r_min"] if cfg["r_min"] is not None else 1e-2 / k2
    r_max = cfg["r_max"] if cfg["r_max"] is not None else 50.0 / k2
    rs = _log_grid(float(r_min), float(r_max), int(cfg["points"]))
    upper, lower = fields.rho_eff_parts(rs, params)
    _write_csv(cfg["out"], ["r", "rho_total", "rho_k2_part", "rho_k1_part"],
               zip(rs, upper - lower, upper, -lower))
    return 0


def cmd_potential(cfg):
    params = _charge_params(cfg, "potential")
    taus = _parse_float_list(cfg["tau"])
    if not taus or any(t < 0 for t in taus):
        raise ConfigError("tau list must be nonnegative")
    rs = _log_grid(float(cfg["r_min"]), float(cfg["r_max"]), int(cfg["points"]))
    rows = []
    for tau in taus:
        for r in rs:
            rows.append((tau, r,
                         fields.potential_A0(tau, r, params),
                         fields.potential_irreducible(tau, r, params.q_ren)))
    _write_csv(cfg["out"], ["tau", "r", "a0", "irreducible"], rows)
    return 0


def cmd_charge(cfg):
    params = _charge_params(cfg, "charge")
    spec = _spec(cfg)
    k2 = params.profile.k2
    r_top = float(cfg["r_max"]) if cfg["r_max"] is not None else 1e5 / k2
    sweep = _log_grid(10.0 / k2, r_top, int(cfg["points"]))
    results = [fields.total_charge(params, r, spec) for r in sweep]
    final = results[-1]
    payload = {
        "params": {"k1": params.profile.k1, "k2": params.profile.k2,
                   "eps": params.profile.eps, "kind": params.profile.kind,
                   "q": params.q, "q_ren": params.q_ren,
                   "chi_at_zero": params.profile.chi_at_zero()},
        "r_max": list(sweep),
        "Q": [r.q_enclosed for r in results],
        "converged": final.converged,
        "spread": final.spread,
        "verdict": final.verdict,
    }
    _write_json(cfg["out"], payload)
    return 0


def cmd_stats(cfg):
    params = _charge_params(cfg, "stats")
    spec = _spec(cfg, angular_order=40)
    tau = float(cfg["tau"])
    if tau < 0:
        raise ConfigError("tau must be nonnegative")
    n_list = _parse_n_list(cfg["N"])
    u = stats.four_velocity(float(cfg["u_rapidity"]))
    dist = RDistribution.point_mass(stats.four_velocity(float(cfg["r_rapidity"])))
    traj = stats.Trajectory.uniform(u)
    qr = params.q_ren
    mean = stats.mean_mode_exponent(traj, tau, params.profile, dist, spec, qr)
    n_max = cfg["n_max"]
    if n_max is None:
        n_max = int(mean + 10.0 * math.sqrt(mean)) + 5 if mean > 0 else 5
    n_max = int(n_max)
    poisson = stats.poisson_probabilities(mean, n_max)
    dists = {}
    tv = {}
    for n_osc in n_list:
        pd = stats.photon_probabilities(tau, n_osc, n_max, traj, params.profile,
                                        dist, spec, qr)
        key = "inf" if n_osc == math.inf else str(int(n_osc))
        dists[key] = list(pd.probs)
        tv[key] = stats.tv_distance(pd.probs, poisson)
    payload = {
        "params": {"k1": params.profile.k1, "k2": params.profile.k2,
                   "eps": params.profile.eps, "q": params.q, "q_ren": qr,
                   "tau": tau, "u_rapidity": float(cfg["u_rapidity"]),
                   "r_rapidity": float(cfg["r_rapidity"]), "n_max": n_max},
        "mean": mean,
        "poisson_reference": list(poisson),
        "distributions": dists,
        "tv_to_poisson": tv,
    }
    _write_json(cfg["out"], payload)
    return 0


def cmd_brems(cfg):
    params = _charge_params(cfg, "brems")
    spec = _spec(cfg, angular_order=40)
    u = stats.four_velocity(float(cfg["u_rapidity"]))
    v = stats.four_velocity(float(cfg["v_rapidity"]))
    dist = RDistribution.point_mass(stats.four_velocity(float(cfg["r_rapidity"])))
    qr = params.q_ren
    mp = stats.mean_photons(u, v, params.profile, dist, spec, qr)
    dtau = float(cfg["dtau"])
    payload = {
        "params": {"k1": params.profile.k1, "k2": params.profile.k2,
                   "eps": params.profile.eps, "q": params.q, "q_ren": qr,
                   "u_rapidity": float(cfg["u_rapidity"]),
                   "v_rapidity": float(cfg["v_rapidity"]),
                   "r_rapidity": float(cfg["r_rapidity"]),
                   "tau1": float(cfg["tau1"]), "dtau": dtau},
        "mean_photons": {"total": mp.total, "inertial": mp.inertial,
                         "brems": mp.brems},
        "s_matrix_probability": stats.brems_generating(
            0.0, 0.0, u, v, params.profile, dist, spec, qr, mode="s_matrix"),
        "tau1_limit_probability": stats.brems_generating(
            0.0, dtau, u, v, params.profile, dist, spec, qr, mode="tau1_limit"),
    }
    if float(cfg["tau1"]) > 0.0:
        payload["finite_times_probability"] = stats.brems_generating(
            float(cfg["tau1"]), dtau, u, v, params.profile, dist, spec, qr,
            mode="finite_times")
    _write_json(cfg["out"], payload)
    return 0


_COMMANDS = {
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "potential": cmd_potential,
    "charge": cmd_charge,
    "stats": cmd_stats,
    "brems": cmd_brems,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="milneqed",
        description="Regularized potentials and photon statistics of "
                    "classical pointlike sources on the Milne universe.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--k1", type=float)
        p.add_argument("--k2", type=float)
        p.add_argument("--eps", type=float)
        p.add_argument("--q", type=float, help="bare charge (default: unit q_ren)")
        p.add_argument("--N", dest="N", help="comma list, e.g. 1,10,100,inf")
        p.add_argument("--tau", help="proper time (comma list for potential)")
        p.add_argument("--tau1", type=float)
        p.add_argument("--dtau", type=float)
        p.add_argument("--u-rapidity", dest="u_rapidity", type=float)
        p.add_argument("--v-rapidity", dest="v_rapidity", type=float)
        p.add_argument("--r-rapidity", dest="r_rapidity", type=float,
                       help="rapidity of the vacuum frame label R")
        p.add_argument("--r-min", dest="r_min", type=float)
        p.add_argument("--r-max", dest="r_max", type=float)
        p.add_argument("--points", type=int)
        p.add_argument("--n-max", dest="n_max", type=int)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--tol", type=float, help="relative tolerance override")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args.command, args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except (ToleranceNotMet, DivergentIntegral, NonFinite) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 3
    except MilneQEDError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
