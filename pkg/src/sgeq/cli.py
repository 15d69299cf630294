"""Command-line interface for the equilibrium-measure construction.

Subcommands cover the pipeline stages (pseudo-energy solve, endpoint
solve, density evaluation, moments, brute-force oracle) plus a
``verify`` command that runs the full construction, cross-checks it,
and writes a deterministic ``report.json``.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical
failure, 3 verification check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import equilibrium as eqm
from . import oracle as orc
from .model import ModelParams, derive_scales, potential
from .tba import TBASolution, solve_tba
from .wiener_hopf import make_factors

# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_TBA_DEFAULTS = {"n_points": 2048, "tol": 1e-10, "max_iter": 200}
_QUAD_DEFAULTS = {"n_xi": 401, "lambda_max": 40.0}
_ORACLE_DEFAULTS = {"grid_m": 400, "n_small": 2, "n_nodes": 64,
                    "threshold": 1e-3}


@dataclass
class RunConfig:
    """Validated run configuration assembled from a JSON file."""

    model: dict
    tba: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    output_dir: str = "out"

    @classmethod
    def from_json(cls, path: str) -> "RunConfig":
        raw = json.loads(Path(path).read_text())
        if "model" not in raw:
            raise ValueError(f"config {path} is missing the 'model' block")
        cfg = cls(
            model=dict(raw["model"]),
            tba={**_TBA_DEFAULTS, **raw.get("tba", {})},
            quadrature={**_QUAD_DEFAULTS, **raw.get("quadrature", {})},
            oracle={**_ORACLE_DEFAULTS, **raw.get("oracle", {})},
            output_dir=raw.get("output_dir", "out"),
        )
        return cfg

    def params(self) -> ModelParams:
        m = self.model
        return derive_scales(
            r=float(m["r"]), b=float(m["b"]), alpha=float(m.get("alpha", 0.0)),
            n=int(m["n"]), eta=float(m.get("eta", 0.1)),
            sign_convention=int(m.get("sign_convention", -1)))


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config)
    if getattr(args, "output", None):
        cfg.output_dir = args.output
    Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
    return cfg


# ---------------------------------------------------------------------------
# shared pipeline pieces
# ---------------------------------------------------------------------------


def _tba_cache_path(cfg: RunConfig) -> Path:
    return Path(cfg.output_dir) / "tba.json"


def _get_tba(cfg: RunConfig, params: ModelParams) -> TBASolution:
    """Solve the pseudo-energy equation, reusing a cached solution."""
    cache = _tba_cache_path(cfg)
    if cache.exists():
        try:
            sol = TBASolution.from_json(cache)
        except (ValueError, KeyError, json.JSONDecodeError):
            sol = None
        if (sol is not None and sol.r == params.r and sol.b == params.b
                and sol.grid.size == int(cfg.tba["n_points"])):
            print(f"pseudo-energy solve: cached ({cache})")
            return sol
    sol = solve_tba(params.r, params.b, n_points=int(cfg.tba["n_points"]),
                    tol=float(cfg.tba["tol"]),
                    max_iter=int(cfg.tba["max_iter"]))
    sol.to_json(cache)
    print(f"pseudo-energy solve: residual {sol.residual_sup:.3e} "
          f"-> {cache}")
    return sol


def _support_dict(sup: eqm.Support) -> dict:
    return {"a": sup.a_n, "b": sup.b_n, "method": sup.method,
            "budget": sup.budget}


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: str, columns) -> None:
    rows = np.column_stack(columns)
    with path.open("w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_solve_tba(args) -> int:
    cfg = _load_config(args)
    params = cfg.params()
    sol = _get_tba(cfg, params)
    out = Path(cfg.output_dir) / "tba.csv"
    _write_csv(out, "lambda,eps,g", (sol.grid, sol.eps_values, sol.g_values))
    print(f"wrote {out}  (eps(0) = {sol.eps_of(0.0):.10f})")
    return 0


def _cmd_endpoints(args) -> int:
    cfg = _load_config(args)
    params = cfg.params()
    wh = make_factors(params)
    cst = wh.constants(params.r)
    if args.variant == "newton":
        tba = _get_tba(cfg, params)
        sup = eqm.solve_endpoints(params, tba, wh)
    else:
        tba = _get_tba(cfg, params)
        sup = eqm.endpoints_asymptotic(params, eqm._fgi_of(tba), args.variant)
    payload = {
        "support": _support_dict(sup),
        "bars": {"bar_a": sup.bar_a, "bar_b": sup.bar_b, "bar_x": sup.bar_x},
        "uv": {"u_n": sup.u_n, "v_n": sup.v_n},
        "constants": {"c0": cst.c0, "d0": cst.d0, "d1": cst.d1,
                      "ratio": cst.ratio_c0_d0},
    }
    out = Path(cfg.output_dir) / "endpoints.json"
    _write_json(out, payload)
    print(f"support [{sup.a_n:.10f}, {sup.b_n:.10f}]  method={sup.method}")
    print(f"wrote {out}")
    return 0


def _run_density(cfg: RunConfig, params: ModelParams):
    tba = _get_tba(cfg, params)
    wh = make_factors(params)
    sup = eqm.solve_endpoints(params, tba, wh)
    dens = eqm.density(params, tba, wh, sup,
                       n_xi=int(cfg.quadrature["n_xi"]),
                       lambda_max=float(cfg.quadrature["lambda_max"]))
    return tba, wh, sup, dens


def _cmd_density(args) -> int:
    cfg = _load_config(args)
    params = cfg.params()
    tba, wh, sup, dens = _run_density(cfg, params)
    out_dir = Path(cfg.output_dir)
    _write_csv(out_dir / "density.csv", "xi,rho,varpi1,varpi2,varpi3",
               (dens.xi_grid, dens.rho_values, dens.varpi1, dens.varpi2,
                dens.varpi3))
    _write_csv(out_dir / "measure.csv", "node,weight",
               (dens.xi_grid, dens.quad_weights * dens.rho_values))
    m = eqm.mass(dens)
    print(f"mass = {m:.12f}  support [{sup.a_n:.8f}, {sup.b_n:.8f}]")
    print(f"wrote {out_dir / 'density.csv'} and {out_dir / 'measure.csv'}")
    return 0


def _cmd_moment(args) -> int:
    cfg = _load_config(args)
    params = cfg.params()
    tba, wh, sup, dens = _run_density(cfg, params)
    mom = eqm.first_moment(dens)
    asym = eqm.first_moment_asymptotic(params, wh)
    payload = {"mass": eqm.mass(dens), "moment": mom,
               "moment_asymptotic": {"full": asym.full,
                                     "simplified": asym.simplified}}
    out = Path(cfg.output_dir) / "moment.json"
    _write_json(out, payload)
    print(f"moment = {mom:.12e}  asymptotic(full) = {asym.full:.12e}")
    print(f"wrote {out}")
    return 0


def _oracle_block(cfg: RunConfig, params: ModelParams, tba) -> dict:
    """Run the energy-minimization oracle and summarize its verdict."""
    meas = orc.minimize_energy(params, tba,
                               grid_m=int(cfg.oracle["grid_m"]))
    ends = orc.oracle_endpoints(meas,
                                threshold=float(cfg.oracle["threshold"]))
    wh = make_factors(params)
    cst = wh.constants(params.r)
    b_lead = math.log(0.5 * cst.c0 * params.n) / params.tau
    b_alt = math.log(0.5 * cst.d0 * params.n) / params.tau
    bias_lead = abs(ends["b"] - b_lead)
    bias_alt = abs(ends["b"] - b_alt)
    winner = "c0" if bias_lead < bias_alt else "d0"
    return {
        "a": ends["a"], "b": ends["b"], "mean": meas.mean,
        "discriminator": {
            "winner": winner,
            "gap": abs(b_lead - b_alt),
            "bias": min(bias_lead, bias_alt),
        },
        "_measure": meas,
    }


def _cmd_oracle(args) -> int:
    cfg = _load_config(args)
    params = cfg.params()
    tba = _get_tba(cfg, params)
    block = _oracle_block(cfg, params, tba)
    meas = block.pop("_measure")
    out_dir = Path(cfg.output_dir)
    _write_csv(out_dir / "oracle_measure.csv", "node,weight",
               (meas.nodes, meas.weights))
    _write_json(out_dir / "oracle.json", block)
    print(f"oracle support [{block['a']:.6f}, {block['b']:.6f}]  "
          f"winner={block['discriminator']['winner']}")
    print(f"wrote {out_dir / 'oracle.json'}")
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_config(args)
    params = cfg.params()
    checks: list[dict] = []

    def check(name: str, value: float, tol: float) -> None:
        ok = bool(abs(value) < tol)
        checks.append({"name": name, "value": float(value), "tol": float(tol),
                       "pass": ok})
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}: "
              f"|{value:.3e}| < {tol:.3e}")

    print("verify: full pipeline")
    tba = _get_tba(cfg, params)
    check("tba_residual", tba.residual_sup, 1e-8)

    wh = make_factors(params)
    cst = wh.constants(params.r)
    sup = eqm.solve_endpoints(params, tba, wh)
    res = eqm._constraint_residuals(params, wh, sup.u_n, sup.v_n,
                                    eqm._fgi_of(tba))
    check("endpoint_residual", float(np.max(np.abs(res))), 1e-10)
    j_val = eqm.constraint_J(params, tba, wh, sup)
    check("tilt_constraint", j_val, 1e-8)

    dens = eqm.density(params, tba, wh, sup,
                       n_xi=int(cfg.quadrature["n_xi"]),
                       lambda_max=float(cfg.quadrature["lambda_max"]))
    m = eqm.mass(dens)
    check("mass_deficit", m - 1.0, max(1e-3, 10.0 * sup.budget))
    check("density_negativity", min(float(dens.rho_values.min()), 0.0), 1e-6)
    mom = eqm.first_moment(dens)
    asym = eqm.first_moment_asymptotic(params, wh)
    if params.alpha == 0.0:
        check("moment_at_zero_tilt", mom, 1e-8)
    else:
        check("moment_vs_asymptotic", mom / asym.full - 1.0, 0.15)

    mid = 0.5 * (sup.a_n + sup.b_n)
    quarter = 0.25 * (sup.b_n - sup.a_n)
    pts = np.linspace(mid - quarter, mid + quarter, 9)
    vals = np.array([eqm.effective_potential(params, tba, dens, sup, x)
                     for x in pts])
    c_eq = float(np.mean(vals))
    veff_spread = float(vals.max() - vals.min())
    check("effective_potential_constancy", veff_spread,
          1e-2 * max(abs(c_eq), 1e-12))

    vprime = max(abs(potential(params, tba, x, order=1))
                 for x in np.linspace(sup.a_n, sup.b_n, 33))
    pv_max = max(abs(eqm.singular_residual(params, tba, dens, sup, x))
                 for x in pts[1:-1:2])
    check("singular_equation_residual", pv_max, 1e-3 * vprime)

    oracle_block = _oracle_block(cfg, params, tba)
    oracle_block.pop("_measure")
    rel_edge = abs(oracle_block["b"] - sup.b_n) / sup.x_n
    check("oracle_endpoint_proximity", rel_edge, 0.05)
    check("oracle_mean_vs_moment", oracle_block["mean"] - mom, 1e-2)

    report = {
        "support": _support_dict(sup),
        "constants": {"c0": cst.c0, "d0": cst.d0, "d1": cst.d1,
                      "ratio": cst.ratio_c0_d0},
        "mass": m,
        "moment": mom,
        "moment_asymptotic": {"full": asym.full,
                              "simplified": asym.simplified},
        "J_residual": j_val,
        "veff_constancy": veff_spread,
        "pv_residual": pv_max,
        "oracle": oracle_block,
        "checks": checks,
    }
    out = Path(cfg.output_dir) / "report.json"
    _write_json(out, report)
    n_fail = sum(not c["pass"] for c in checks)
    print(f"wrote {out}  ({len(checks) - n_fail}/{len(checks)} checks passed)")
    return 3 if n_fail else 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgeq",
        description="Equilibrium-measure construction for a cosh-confined "
                    "log-gas with a two-period interaction")
    parser.add_argument("--config", "-c", required=True,
                        help="path to a JSON run configuration")
    parser.add_argument("--output", "-o", default=None,
                        help="output directory (overrides the config)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve-tba", help="solve the pseudo-energy equation")
    sp.set_defaults(func=_cmd_solve_tba)

    sp = sub.add_parser("endpoints", help="solve for the support endpoints")
    sp.add_argument("--variant", default="newton",
                    choices=("newton", "lemma_c0", "theorem_d0"),
                    help="solved endpoints or a closed-form expansion")
    sp.set_defaults(func=_cmd_endpoints)

    sp = sub.add_parser("density", help="evaluate the equilibrium density")
    sp.set_defaults(func=_cmd_density)

    sp = sub.add_parser("moment", help="mass and first moment of the density")
    sp.set_defaults(func=_cmd_moment)

    sp = sub.add_parser("oracle", help="brute-force energy minimization")
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("verify", help="run the pipeline with cross-checks")
    sp.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
