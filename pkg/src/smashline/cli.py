"""Command-line front end.

Configuration comes from built-in defaults, then an optional JSON file
(--config), then explicit flags. Output is JSON (schema "smashline/1") or CSV
with header k,l,n,re,im; floats are written at full precision.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import verify as verify_mod
from .algebra import BraidParams, SmashElement
from .diffusion import (
    DiffusionParams,
    GaussianAnyonicDensity,
    band_xi_moments,
    build_band_operator,
    evolve_band,
    evolve_N2,
    DensityVector,
    pde_residual,
    phi_infinity_table,
    rho_infinity_x,
    rho_infinity_xi,
    roxi_bound_verdict,
    scaled_density,
    xi_moments_infinity,
)
from .errors import SmashlineError
from .moments import MomentTable, evolve_moments, moment_table
from .nonstationary import HamiltonianDrift, diffusion_nonstat_residual, nonstat_density
from .qcalc import d_xi_matrix, d_xi_star_matrix, q_binomial, q_factorial, q_integer
from .transition import T_infinity, apply_T, transition_op
from .walk import BernoulliDensity, Convex, Mixed, Product, convolve_table

SCHEMA = "smashline/1"
COMMANDS = ("walk", "diffuse", "moments", "transition", "qcalc", "verify")

DEFAULTS = {
    "N": 2, "Q": 1.0, "trunc": 4,
    "p1": 0.5, "p2": 0.5, "a": 1.0, "theta": 1.0,
    "c1": 0.5, "c2": 0.3, "alpha1": 0.7, "alpha2": 0.2, "t": 1.0,
    "n": None, "steps": 1000, "lambda": 0.0, "lambda_tilde": 0.0,
    "mix": None, "tol": 1e-8, "format": "json", "seed": 0, "workers": 1,
    "k": 1, "l": 1,
}


class ConfigError(SmashlineError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smashline", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON file with default values")
        cmd.add_argument("--out", help="write output here instead of stdout")
        cmd.add_argument("--format", choices=("json", "csv"), default=None)
        cmd.add_argument("--N", type=int, default=None)
        cmd.add_argument("--Q", type=float, default=None)
        cmd.add_argument("--trunc", type=int, default=None, help="x-degree truncation K")
        cmd.add_argument("--p1", type=float, default=None)
        cmd.add_argument("--p2", type=float, default=None)
        cmd.add_argument("--a", type=float, default=None)
        cmd.add_argument("--theta", type=float, default=None)
        cmd.add_argument("--c1", type=float, default=None)
        cmd.add_argument("--c2", type=float, default=None)
        cmd.add_argument("--alpha1", type=float, default=None)
        cmd.add_argument("--alpha2", type=float, default=None)
        cmd.add_argument("--t", type=float, default=None)
        cmd.add_argument("--n", default=None, help="step count, or comma list for a sweep")
        cmd.add_argument("--steps", type=int, default=None)
        cmd.add_argument("--lambda", dest="lambda", type=float, default=None)
        cmd.add_argument("--lambda-tilde", dest="lambda_tilde", type=float, default=None)
        cmd.add_argument("--mix", default=None,
                         help="weight LAM for a mixed density, or 'lam:p1:a:p2:theta;...' for a convex one")
        cmd.add_argument("--tol", type=float, default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--workers", type=int, default=None)
        cmd.add_argument("--k", type=int, default=None)
        cmd.add_argument("--l", type=int, default=None)
        if name == "verify":
            cmd.add_argument("--json", action="store_true", help="machine-readable report")
            cmd.add_argument("--inject-sign-flip", action="store_true",
                             help="debug: flip the continuum drift sign in the duality suite")
    return parser


def merge_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _parse_ns(value) -> list[int]:
    if value is None:
        return []
    if isinstance(value, int):
        return [value]
    if isinstance(value, list):
        return [int(v) for v in value]
    try:
        return [int(part) for part in str(value).split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"field 'n': cannot parse {value!r} as integers") from exc


def validate(cfg: dict) -> None:
    if not isinstance(cfg["N"], int) or cfg["N"] < 2:
        raise ConfigError(f"field 'N': must be an integer >= 2, got {cfg['N']!r}")
    if cfg["trunc"] < 0:
        raise ConfigError(f"field 'trunc': must be >= 0, got {cfg['trunc']}")
    for key in ("p1", "p2"):
        if not 0.0 <= cfg[key] <= 1.0:
            raise ConfigError(f"field '{key}': probability {cfg[key]} outside [0, 1]")
    if cfg["t"] < 0:
        raise ConfigError(f"field 't': must be >= 0, got {cfg['t']}")
    if cfg["steps"] < 0:
        raise ConfigError(f"field 'steps': must be >= 0, got {cfg['steps']}")
    if not 0 <= cfg["l"] < cfg["N"]:
        raise ConfigError(f"field 'l': xi-degree {cfg['l']} outside 0..{cfg['N'] - 1}")
    if not 0 <= cfg["k"] <= cfg["trunc"]:
        raise ConfigError(f"field 'k': x-degree {cfg['k']} outside 0..{cfg['trunc']}")
    if any(n < 1 for n in _parse_ns(cfg["n"])):
        raise ConfigError("field 'n': step counts must be >= 1")


def density_from(cfg: dict):
    dx = BernoulliDensity(cfg["p1"], cfg["a"])
    dxi = BernoulliDensity(cfg["p2"], cfg["theta"])
    mix = cfg["mix"]
    if mix is None:
        return Product(dx, dxi)
    text = str(mix)
    if ":" not in text:
        try:
            return Mixed(float(text), dx, dxi)
        except ValueError as exc:
            raise ConfigError(f"field 'mix': {exc}") from exc
    comps = []
    for chunk in text.split(";"):
        parts = chunk.split(":")
        if len(parts) != 5:
            raise ConfigError(f"field 'mix': component {chunk!r} needs lam:p1:a:p2:theta")
        lam, p1, a, p2, theta = (float(v) for v in parts)
        comps.append((lam, BernoulliDensity(p1, a), BernoulliDensity(p2, theta)))
    try:
        return Convex(tuple(comps))
    except ValueError as exc:
        raise ConfigError(f"field 'mix': {exc}") from exc


def diffusion_from(cfg: dict) -> DiffusionParams:
    return DiffusionParams(cfg["c1"], cfg["c2"], cfg["alpha1"], cfg["alpha2"], cfg["t"])


def _cnum(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _rows(table: np.ndarray, n) -> list[dict]:
    return [
        {"k": k, "l": l, "n": n, **_cnum(table[k, l])}
        for k in range(table.shape[0]) for l in range(table.shape[1])
    ]


# --- commands -----------------------------------------------------------------------------


def _walk_table(job):
    cfg, n = job
    params = BraidParams(cfg["N"], cfg["Q"])
    d = density_from(cfg)
    return convolve_table(d.leg_table(cfg["trunc"], params.N), n, params)


def cmd_walk(cfg: dict) -> tuple[dict, int]:
    ns = _parse_ns(cfg["n"])
    jobs = [(cfg, n) for n in ns]
    if cfg["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            tables = list(pool.map(_walk_table, jobs))
    else:
        tables = [_walk_table(job) for job in jobs]
    rows = [row for n, table in zip(ns, tables) for row in _rows(table, n)]
    return {"results": rows, "residuals": {}}, 0


def cmd_diffuse(cfg: dict) -> tuple[dict, int]:
    params = BraidParams(cfg["N"], cfg["Q"])
    p = diffusion_from(cfg)
    drift = HamiltonianDrift(cfg["lambda"], cfg["lambda_tilde"])
    results: dict = {"anyonic_coefficients": [_cnum(c) for c in rho_infinity_xi(p, params)]}
    residuals: dict = {}
    if p.t == 0:
        message = "t=0: the x-density is the delta limit; profile and residuals skipped"
        print(f"smashline: warning: {message}", file=sys.stderr)
        results["warnings"] = [message]
    else:
        grid = np.linspace(p.c1 * p.t - 5, p.c1 * p.t + 5, 21)
        results["gaussian_profile"] = [{"a": float(a), "rho": float(r)} for a, r in zip(grid, rho_infinity_x(grid, p))]
        residuals["pde"] = pde_residual(GaussianAnyonicDensity(p, params), p, params)
        if drift.lam or drift.lam_tilde:
            residuals["pde_drift"] = diffusion_nonstat_residual(nonstat_density(p, drift, params), p, drift, params)
    results["roxi_bound"] = roxi_bound_verdict(p, params)["matches"] if p.c2 else []
    band = build_band_operator(p, params)
    results["band_lambdas"] = [_cnum(v) for v in band.lambdas]
    results["band_lambdas_printed"] = [_cnum(v) for v in band.printed_lambdas]
    residuals["band_vs_functional"] = float(np.max(np.abs(
        band_xi_moments(p, params, cfg["steps"]) - xi_moments_infinity(p, params)
    )))
    if params.N == 2:
        rng = np.random.default_rng(cfg["seed"])
        rho0 = DensityVector(rng.normal(size=(2, cfg["trunc"] + 1)))
        closed = evolve_N2(rho0, p).components
        rk = evolve_band(rho0, p, cfg["steps"], params).components
        residuals["n2_closed_vs_rk4"] = float(np.max(np.abs(closed - rk)))
    code = 0 if all(v < cfg["tol"] for v in residuals.values()) else 1
    return {"results": results, "residuals": residuals}, code


def cmd_moments(cfg: dict) -> tuple[dict, int]:
    params = BraidParams(cfg["N"], cfg["Q"])
    p = diffusion_from(cfg)
    K = cfg["trunc"]
    mu = evolve_moments(MomentTable.point_mass(K, params.N), p, p.t, params).mu
    rows = _rows(mu, 0)
    residuals = {"vs_phi_infinity": float(np.max(np.abs(mu - phi_infinity_table(p, params, K))))}
    for n in _parse_ns(cfg["n"]):
        walk = convolve_table(scaled_density(p, n, params).leg_table(K, params.N), n, params)
        rows.extend(_rows(walk, n))
    if cfg["mix"] is not None:
        rows.extend({**row, "n": "density"} for row in _rows(moment_table(density_from(cfg), params, K).mu, 1))
    code = 0 if all(v < cfg["tol"] for v in residuals.values()) else 1
    return {"results": rows, "residuals": residuals}, code


def cmd_transition(cfg: dict) -> tuple[dict, int]:
    params = BraidParams(cfg["N"], cfg["Q"])
    K = cfg["trunc"]
    f = SmashElement.monomial(cfg["k"], cfg["l"], params.N, K)
    d = density_from(cfg)
    one = apply_T(transition_op(d, params), f, params).coeffs
    right = apply_T(transition_op(d, params, "right"), f, params).coeffs
    p = diffusion_from(cfg)
    cont = apply_T(T_infinity(p, params), f, params).coeffs
    rows = [{**row, "n": "T"} for row in _rows(one, 1)]
    rows += [{**row, "n": "T_right"} for row in _rows(right, 1)]
    rows += [{**row, "n": "T_infinity"} for row in _rows(cont, 0)]
    phi = d.leg_table(K, params.N)[cfg["k"], cfg["l"]]
    residuals = {
        "counit_law": abs(one[0, 0] - phi),
        "continuum_duality": abs(cont[0, 0] - phi_infinity_table(p, params, K)[cfg["k"], cfg["l"]]),
    }
    code = 0 if all(v < cfg["tol"] for v in residuals.values()) else 1
    return {"results": rows, "residuals": residuals}, code


def cmd_qcalc(cfg: dict) -> tuple[dict, int]:
    params = BraidParams(cfg["N"], cfg["Q"])
    q = params.q
    N = params.N
    results = {
        "q": _cnum(q),
        "q_integer": [_cnum(q_integer(l, q)) for l in range(N + 1)],
        "q_factorial": [_cnum(q_factorial(l, q)) for l in range(N + 1)],
        "q_binomial": [[_cnum(q_binomial(m, r, q)) for r in range(m + 1)] for m in range(N + 1)],
        "d_xi": [[_cnum(v) for v in row] for row in d_xi_matrix(params)],
        "d_xi_star": [[_cnum(v) for v in row] for row in d_xi_star_matrix(params)],
    }
    return {"results": results, "residuals": {"q_integer_N": abs(q_integer(N, q))}}, 0


def cmd_verify(cfg: dict, inject_sign_flip: bool = False) -> tuple[dict, int]:
    results = [r.as_dict() for r in verify_mod.run_all(inject_sign_flip, seed=cfg["seed"])]
    code = 0 if all(r["passed"] for r in results) else 1
    return {"results": results, "residuals": {r["name"]: r["max_deviation"] for r in results}}, code


# --- output ------------------------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (complex, np.complexfloating)):
        return _cnum(obj)
    return obj


def render(command: str, cfg: dict, payload: dict, fmt: str) -> str:
    if fmt == "csv":
        rows = payload["results"]
        if not isinstance(rows, list) or (rows and not {"k", "l", "n", "re", "im"} <= set(rows[0])):
            raise ConfigError(f"field 'format': csv output is not available for '{command}'")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "l", "n", "re", "im"])
        for row in rows:
            writer.writerow([row["k"], row["l"], row["n"], repr(float(row["re"])), repr(float(row["im"]))])
        return buf.getvalue()
    doc = {"schema": SCHEMA, "command": command, "config": cfg, **payload}
    return json.dumps(_plain(doc), sort_keys=True, indent=2) + "\n"


def render_verify_text(payload: dict) -> str:
    lines = []
    for r in payload["results"]:
        status = "PASS" if r["passed"] else "FAIL"
        lines.append(f"{status} {r['name']}: max deviation {r['max_deviation']!r} (tol {r['tol']!r}, {r['cases']} cases)")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = merge_config(args)
        if args.command == "walk" and not _parse_ns(cfg["n"]):
            parser.error("walk needs --n (or 'n' in the config file)")
        validate(cfg)
        fmt = cfg["format"]
        if args.command == "verify":
            payload, code = cmd_verify(cfg, args.inject_sign_flip)
            text = render("verify", cfg, payload, "json") if args.json else render_verify_text(payload)
        else:
            handler = {"walk": cmd_walk, "diffuse": cmd_diffuse, "moments": cmd_moments,
                       "transition": cmd_transition, "qcalc": cmd_qcalc}[args.command]
            payload, code = handler(cfg)
            text = render(args.command, cfg, payload, fmt)
    except (SmashlineError, ValueError, OSError) as exc:
        print(f"smashline: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
