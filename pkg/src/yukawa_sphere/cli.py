"""Command-line driver: solve | convergence | ksweep | curvature.

All outputs are deterministic: scientific notation with 12 significant
digits, "\n" line endings, rows ordered by sweep value.  Exit status is 0 iff
every solve met the GMRES tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import ConfigError, SolverError, YukawaSphereError
from .experiments import run_convergence, run_curvature, run_ksweep, run_solve

__all__ = ["main", "cmd_solve", "cmd_convergence", "cmd_ksweep", "cmd_curvature"]


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if np.isnan(x):
        return ""
    return f"{x:.11e}"


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else _fmt(c) for c in row))
    path.write_text("\n".join(lines) + "\n")


def _write_density(path: Path, geometry, density):
    rows = []
    off = 0
    for ci, curve in enumerate(geometry.curves):
        alphas = curve.params
        for j in range(curve.n_nodes):
            x, y, z = curve.nodes[j]
            rows.append([str(ci), str(j), alphas[j], x, y, z,
                         density.values[off + j]])
        off += curve.n_nodes
    _write_csv(path, ["curve", "node", "alpha", "x", "y", "z", "mu"], rows)


def _write_interior(path: Path, targets, u_vals):
    rows = [[p[0], p[1], p[2], u] for p, u in zip(targets.points, u_vals)]
    _write_csv(path, ["x", "y", "z", "u"], rows)


def cmd_solve(cfg, out: Path, seed=None) -> int:
    res = run_solve(cfg, seed=seed)
    _write_density(out / "density.csv", res["geometry"], res["density"])
    _write_interior(out / "interior.csv", res["targets"], res["u"])
    diag = {
        "unknowns": res["unknowns"],
        "gmres_iterations": res["iterations"],
        "gmres_relres": res["relres"],
    }
    if res["condition_2norm"] is not None:
        diag["condition_2norm"] = res["condition_2norm"]
    if "max_error" in res:
        diag["max_error_at_targets"] = res["max_error"]
    (out / "diagnostics.json").write_text(
        json.dumps(diag, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_convergence(cfg, out: Path, seed=None) -> int:
    res = run_convergence(cfg, seed=seed)
    rows = res["rows"]
    if len(rows) == 1:
        header = ["N", "iterations", "trapezoid_error", "alpert_error"]
        data = [[str(r["n"]), str(r["iterations"]), r["trapezoid_error"],
                 r["alpert_error"]] for r in rows]
    else:
        header = ["N", "iterations", "trapezoid_error", "alpert_error",
                  "trapezoid_order"]
        data = [[str(r["n"]), str(r["iterations"]), r["trapezoid_error"],
                 r["alpert_error"], r["trapezoid_order"]] for r in rows]
    _write_csv(out / "convergence.csv", header, data)
    return 0


def cmd_ksweep(cfg, out: Path, want_eigs: bool = False) -> int:
    res = run_ksweep(cfg, want_eigs=want_eigs)
    data = [[r["k"], r["condition"], str(r["iterations"])] for r in res["rows"]]
    _write_csv(out / "ksweep.csv", ["k", "condition_2norm", "iterations"], data)
    if want_eigs:
        rows = []
        for k in sorted(res["eigenvalues"]):
            ev = res["eigenvalues"][k]
            order = np.lexsort((ev.imag, ev.real))
            for lam in ev[order]:
                rows.append([k, lam.real, lam.imag])
        _write_csv(out / "eigenvalues.csv", ["k", "re", "im"], rows)
    return 0


def cmd_curvature(cfg, out: Path) -> int:
    res = run_curvature(cfg)
    data = [[r["ratio"], r["condition"], str(r["iterations"])] for r in res["rows"]]
    _write_csv(out / "curvature.csv", ["aspect_ratio", "condition_2norm",
                                       "iterations"], data)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="yukawa-sphere",
        description="Boundary integral solver for the Yukawa-Beltrami "
                    "Dirichlet problem on the unit sphere")
    parser.add_argument("command",
                        choices=["solve", "convergence", "ksweep", "curvature"])
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--eigenvalues", action="store_true",
                        help="also write the eigenvalue table (ksweep)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed for target scattering")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "solve":
            return cmd_solve(cfg, out, seed=args.seed)
        if args.command == "convergence":
            return cmd_convergence(cfg, out, seed=args.seed)
        if args.command == "ksweep":
            return cmd_ksweep(cfg, out, want_eigs=args.eigenvalues)
        return cmd_curvature(cfg, out)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1
    except YukawaSphereError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
