"""Command line interface: generate, reconstruct, compare, render."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, parse_config
from .errors import CdiiError
from .fieldio import read_field, render_png, write_field
from .grid import Grid
from .objective import InverseProblem
from .phantoms import NoiseSpec, add_noise, generate_data_pair, rasterize
from .picard import picard_run
from .report import ReconReport
from .vip import vip_run


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config) if getattr(args, "config", None) else RunConfig()
    for name in ("test_case", "noise", "seed", "n_fine", "n_coarse", "algo"):
        value = getattr(args, name.replace("-", "_"), None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _cmd_generate(args) -> int:
    cfg = _load_config(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    phantom = cfg.make_phantom()
    coarse = Grid(cfg.n_coarse)
    sigma_true = rasterize(phantom, coarse)
    h1, h2 = generate_data_pair(phantom, cfg.n_fine, cfg.n_coarse)
    if cfg.noise > 0:
        h1 = add_noise(h1, NoiseSpec(cfg.noise, cfg.seed))
        h2 = add_noise(h2, NoiseSpec(cfg.noise, cfg.seed + 1))
    write_field(out / "H1.csv", h1)
    write_field(out / "H2.csv", h2)
    write_field(out / "sigma_true.csv", sigma_true)
    print(f"wrote H1.csv, H2.csv, sigma_true.csv to {out} (N={cfg.n_coarse})")
    return 0


def _load_problem(data_dir: Path) -> tuple[InverseProblem, "ScalarField | None"]:
    h1 = read_field(data_dir / "H1.csv")
    h2 = read_field(data_dir / "H2.csv")
    if h1.grid != h2.grid:
        raise CdiiError("H1 and H2 are on different grids")
    truth_path = data_dir / "sigma_true.csv"
    truth = read_field(truth_path) if truth_path.exists() else None
    return InverseProblem(h1.grid, h1, h2), truth


def _run_algorithm(algo: str, problem: InverseProblem, cfg: RunConfig, truth) -> ReconReport:
    if algo == "vip":
        vip_cfg = cfg.vip_config()
        vip_cfg.validate()
        res = vip_run(problem, vip_cfg)
        report = ReconReport(
            "vip", res.sigma, [r.as_dict() for r in res.history],
            res.n_iter, res.converged, res.wall_time,
            config=cfg.as_dict(), seed=cfg.seed,
            notes=["multiplier scale in the residual uses the L2 weight beta"],
        )
    elif algo == "picard":
        res = picard_run(problem, cfg.picard_config())
        report = ReconReport(
            "picard", res.sigma, [{"err": e} for e in res.err_history],
            res.n_iter, res.converged, res.wall_time,
            config=cfg.as_dict(), seed=cfg.seed,
        )
        report.metrics["n_clamped"] = res.n_clamped
    else:
        raise CdiiError(f"unknown algorithm {algo!r}")
    if truth is not None:
        report.attach_truth(truth)
    return report


def _write_report(report: ReconReport, out: Path, stem: str) -> None:
    write_field(out / f"sigma_{stem}.csv", report.sigma)
    lo = min(0.0, float(report.sigma.values.min()))
    hi = max(1.0, float(report.sigma.values.max()))
    render_png(report.sigma, out / f"sigma_{stem}.png", (lo, hi))
    (out / f"report_{stem}.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")


def _cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    problem, truth = _load_problem(Path(args.data))
    algo = args.algo or cfg.algo
    if algo == "both":
        return _cmd_compare(args)
    report = _run_algorithm(algo, problem, cfg, truth)
    _write_report(report, out, algo)
    err = report.metrics.get("relative_l2_error")
    tail = f", rel L2 error {err:.4f}" if err is not None else ""
    print(f"{algo}: {report.n_iter} iterations{tail}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _load_config(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    problem, truth = _load_problem(Path(args.data))
    side_by_side = {}
    for algo in ("vip", "picard"):
        report = _run_algorithm(algo, problem, cfg, truth)
        _write_report(report, out, algo)
        side_by_side[algo] = {
            "n_iter": report.n_iter,
            "converged": report.converged,
            "wall_time_s": report.wall_time,
            **report.metrics,
        }
    (out / "compare.json").write_text(json.dumps(side_by_side, indent=2) + "\n")
    for algo, m in side_by_side.items():
        err = m.get("relative_l2_error")
        print(f"{algo:8s} iters={m['n_iter']:3d} " + (f"rel_l2={err:.4f}" if err is not None else ""))
    return 0


def _cmd_render(args) -> int:
    field = read_field(args.field)
    value_range = None
    if args.vmin is not None or args.vmax is not None:
        lo = args.vmin if args.vmin is not None else float(np.min(field.values))
        hi = args.vmax if args.vmax is not None else float(np.max(field.values))
        value_range = (lo, hi)
    render_png(field, args.output, value_range)
    print(f"wrote {args.output}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdii", description="Sparse log-conductivity reconstruction from interior data"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="synthesize interior data for a phantom")
    gen.add_argument("--test-case", type=int, choices=(1, 2, 3, 4), dest="test_case")
    gen.add_argument("--config", type=str)
    gen.add_argument("--noise", type=float)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--n-fine", type=int, dest="n_fine")
    gen.add_argument("--n-coarse", type=int, dest="n_coarse")
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=_cmd_generate)

    rec = sub.add_parser("reconstruct", help="reconstruct from serialized data files")
    rec.add_argument("--algo", choices=("vip", "picard", "both"))
    rec.add_argument("--config", type=str)
    rec.add_argument("--data", required=True, help="directory with H1.csv and H2.csv")
    rec.add_argument("-o", "--output", required=True)
    rec.set_defaults(func=_cmd_reconstruct)

    cmp_ = sub.add_parser("compare", help="run both algorithms on the same data")
    cmp_.add_argument("--config", type=str)
    cmp_.add_argument("--data", required=True)
    cmp_.add_argument("-o", "--output", required=True)
    cmp_.set_defaults(func=_cmd_compare)

    ren = sub.add_parser("render", help="render a field file to a PNG")
    ren.add_argument("field")
    ren.add_argument("-o", "--output", required=True)
    ren.add_argument("--vmin", type=float)
    ren.add_argument("--vmax", type=float)
    ren.set_defaults(func=_cmd_render)
    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CdiiError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
