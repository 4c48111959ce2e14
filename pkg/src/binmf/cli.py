"""Command-line front end: ``binmf {factorize,sweep,pareto,metrics}``.

Exit codes: 0 on success, 1 on domain or configuration errors, 2 on I/O
errors (missing, unreadable or malformed files). ``BINMF_LOG`` sets the log
level (error, warn, info, debug).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import BinmfError, ConfigError, FormatError, ShapeError
from .io import (RunManifest, StagedDir, _write_bytes, load_matrix, read_front,
                 save_matrix, save_results, sha256_file, trace_csv, utc_now, write_front)
from .kernels import SIGMA_PRESETS, KernelSpec
from .metrics import report
from .pareto import DEFAULT_ALPHAS, SweepConfig, nondominated_mask, sweep
from .solver import SolveConfig, solve
from .updates import UpdateRule

log = logging.getLogger("binmf")

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; here that code is reserved for I/O
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def parse_alphas(spec: str) -> tuple[float, ...]:
    """``"start:step:end"`` or a comma list, e.g. ``"0:0.02:1"`` or ``"0,0.5,1"``."""
    spec = spec.strip()
    try:
        if ":" in spec:
            start, step, end = (float(p) for p in spec.split(":"))
            if step <= 0:
                raise ConfigError(f"--alphas step must be positive, got {step!r}")
            count = int(round((end - start) / step)) + 1
            if count < 1:
                raise ConfigError(f"--alphas {spec!r} describes an empty grid")
            values = tuple(round(start + i * step, 12) for i in range(count))
        else:
            values = tuple(float(p) for p in spec.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse --alphas {spec!r}") from None
    return values


def _sigma(value: str) -> float:
    if value in SIGMA_PRESETS:
        return SIGMA_PRESETS[value]
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number or one of {sorted(SIGMA_PRESETS)}, got {value!r}") from None


def _add_kernel_flags(p):
    p.add_argument("--kernel", default="gaussian",
                   choices=["gaussian", "polynomial", "exponential", "sigmoid"])
    p.add_argument("--sigma", type=_sigma,
                   help="bandwidth (gaussian/exponential); a number or a preset: "
                        + ", ".join(f"{k}={v}" for k, v in SIGMA_PRESETS.items()))
    p.add_argument("--c", type=float, default=0.0, help="offset (polynomial/sigmoid)")
    p.add_argument("--d", type=int, default=2, help="degree (polynomial)")
    p.add_argument("--gamma", type=float, default=1.0, help="scale (sigmoid)")


def _add_solve_flags(p):
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--format", choices=["csv", "f64le"])
    p.add_argument("--rank", type=int, required=True)
    _add_kernel_flags(p)
    p.add_argument("--mode", default="multiplicative", choices=["multiplicative", "additive"])
    p.add_argument("--step-a", type=float, default=1e-3)
    p.add_argument("--step-e", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binmf", description="Bi-objective (linear + kernel) NMF.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("factorize", help="solve for one weight alpha")
    _add_solve_flags(p)
    p.add_argument("--alpha", type=float, required=True)

    p = sub.add_parser("sweep", help="solve over a grid of weights and filter the front")
    _add_solve_flags(p)
    p.add_argument("--alphas", default=None, help='"start:step:end" or comma list (default 0:0.02:1)')
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")

    p = sub.add_parser("replay", help="re-run a sweep from its manifest.json")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--jobs", type=int, default=None)

    p = sub.add_parser("pareto", help="recompute dominated flags of stored fronts")
    p.add_argument("--input", required=True, type=Path, action="append",
                   help="results directory or front.csv; repeat to merge")
    p.add_argument("--out", type=Path, help="output directory (required when merging)")

    p = sub.add_parser("metrics", help="RE and RE_phi of given factors")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--e", required=True, type=Path, help="endmember matrix file (L x N)")
    p.add_argument("--a", required=True, type=Path, help="abundance matrix file (N x T)")
    p.add_argument("--format", choices=["csv", "f64le"])
    _add_kernel_flags(p)
    p.add_argument("--out", type=Path, help="write a manifest here")
    return parser


def kernel_from_args(args) -> KernelSpec:
    if args.kernel in ("gaussian", "exponential") and args.sigma is None:
        raise ConfigError(f"--sigma is required for the {args.kernel} kernel")
    return KernelSpec(args.kernel, sigma=args.sigma, c=args.c, d=args.d, gamma=args.gamma)


def solve_config_from_args(args, alpha) -> SolveConfig:
    rule = UpdateRule(args.mode, step_a=args.step_a, step_e=args.step_e)
    return SolveConfig(rank=args.rank, alpha=alpha, kernel=kernel_from_args(args), rule=rule,
                       max_iter=args.max_iter, seed=args.seed)


def _load_input(path, fmt):
    m = load_matrix(path, fmt)
    return m, {"input_path": str(path), "input_format": fmt or path.suffix.lstrip("."),
               "input_sha256": sha256_file(path)}


def cmd_factorize(args) -> int:
    cfg = solve_config_from_args(args, args.alpha)
    x, info = _load_input(args.input, args.format)
    manifest = RunManifest("factorize", cfg.to_dict(), **info)
    rec = solve(x, cfg)
    m = report(x, rec.e, rec.a, cfg.kernel)
    with StagedDir(args.out) as tmp:
        save_matrix(rec.e, tmp / "E.f64le")
        save_matrix(rec.a, tmp / "A.f64le")
        _write_bytes(tmp / "trace.csv", trace_csv(rec.trace).encode("ascii"))
        manifest.finished = utc_now()
        manifest.extra = {"iterations": rec.iterations_run, "stop_reason": rec.stop_reason}
        _write_bytes(tmp / "manifest.json", manifest.to_json().encode("utf-8"))
    ob = rec.objective
    print(f"alpha={ob.alpha!r} J_X={ob.j_input!r} J_H={ob.j_feature!r} J={ob.j_aggregated!r} "
          f"RE={m.re!r} RE_phi={m.re_phi!r} iterations={rec.iterations_run} "
          f"stop={rec.stop_reason}")
    return 0


def _run_sweep(x, cfg: SweepConfig, manifest, out, jobs):
    front = sweep(x, cfg, jobs=jobs)
    save_results(front, manifest, out, x, cfg.base.kernel)
    print(f"{len(front.nondominated)} non-dominated of {len(front.solutions)} solutions")
    return 0


def cmd_sweep(args) -> int:
    alphas = DEFAULT_ALPHAS if args.alphas is None else parse_alphas(args.alphas)
    base = solve_config_from_args(args, alphas[0])
    cfg = SweepConfig(base=base, alphas=alphas)
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    x, info = _load_input(args.input, args.format)
    manifest = RunManifest("sweep", cfg.to_dict(), **info)
    return _run_sweep(x, cfg, manifest, args.out, args.jobs)


def cmd_replay(args) -> int:
    old = RunManifest.load(args.manifest)
    if old.command != "sweep":
        raise ConfigError(f"replay needs a sweep manifest, got {old.command!r}")
    cfg = SweepConfig.from_dict(old.config)
    path = Path(old.input_path)
    if sha256_file(path) != old.input_sha256:
        raise ConfigError(f"{path} does not match the digest recorded in the manifest")
    x = load_matrix(path, old.input_format)
    manifest = RunManifest("sweep", cfg.to_dict(), old.input_path, old.input_format,
                           old.input_sha256, extra={"replayed_from": str(args.manifest)})
    return _run_sweep(x, cfg, manifest, args.out, args.jobs)


def cmd_pareto(args) -> int:
    paths = [p / "front.csv" if p.is_dir() else p for p in args.input]
    if len(paths) > 1 and args.out is None:
        raise ConfigError("--out is required when merging several fronts")
    rows = []
    for p in paths:
        rows.extend(read_front(p))
    mask = nondominated_mask([(r["j_input"], r["j_feature"]) for r in rows])
    for r, keep in zip(rows, mask):
        r["dominated"] = not keep
    rows.sort(key=lambda r: r["alpha"])
    target = paths[0] if args.out is None else args.out / "front.csv"
    manifest = RunManifest("pareto", {"inputs": [str(p) for p in paths]})
    with StagedDir(target.parent) as tmp:
        write_front(rows, tmp / "front.csv")
        manifest.finished = utc_now()
        _write_bytes(tmp / "pareto_manifest.json", manifest.to_json().encode("utf-8"))
    print(f"{int(mask.sum())} non-dominated of {len(rows)} solutions")
    return 0


def cmd_metrics(args) -> int:
    k = kernel_from_args(args)
    x, info = _load_input(args.input, args.format)
    e = load_matrix(args.e, args.format)
    a = load_matrix(args.a, args.format)
    if e.rows != x.rows or a.cols != x.cols or e.cols != a.rows:
        raise ShapeError(f"incompatible shapes X{x.shape}, E{e.shape}, A{a.shape}")
    m = report(x, e, a, k)
    if args.out is not None:
        manifest = RunManifest("metrics", {"kernel": k.to_dict(), "e": str(args.e),
                                           "a": str(args.a)}, **info)
        manifest.finished = utc_now()
        manifest.extra = {"re": m.re, "re_phi": m.re_phi}
        with StagedDir(args.out) as tmp:
            _write_bytes(tmp / "manifest.json", manifest.to_json().encode("utf-8"))
    print(f"RE {m.re!r}")
    print(f"RE_phi {m.re_phi!r}")
    return 0


COMMANDS = {"factorize": cmd_factorize, "sweep": cmd_sweep, "replay": cmd_replay,
            "pareto": cmd_pareto, "metrics": cmd_metrics}


def main(argv=None) -> int:
    level = LOG_LEVELS.get(os.environ.get("BINMF_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (OSError, FormatError) as exc:
        print(f"binmf: error: {exc}", file=sys.stderr)
        return 2
    except BinmfError as exc:
        print(f"binmf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
