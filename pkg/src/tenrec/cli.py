"""Command-line surface for reproducible experiments.

Every subcommand prints a machine-readable record of ``key=value``
lines; residual traces can be written to CSV for plotting.  Seeds are
mandatory on randomized paths.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from . import data as dat
from . import tensorfile
from .onebit import gnobhtc, gnobrhtc, naive_estimate, onebit_observe
from .penalties import PENALTY_NAMES, make_penalty
from .shrink import gnhtsvt
from .sketch import SketchConfig, ad_rsthosvd_blbp, gnhtsvt_randomized, rsthosvd_bki, sthosvd
from .solvers import SolverConfig, gnhtc, gnrhtc
from .transform import Transform


def _emit(record: dict) -> None:
    for key, value in record.items():
        if isinstance(value, float):
            print(f"{key}={value:.10g}")
        else:
            print(f"{key}={value}")


def _write_residual_csv(path, report) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", *report.residual_names, "mu"])
        for i, (row, mu) in enumerate(zip(report.residual_history, report.mu_history), 1):
            writer.writerow([i, *row, mu])


def _ints(text: str):
    return tuple(int(v) for v in text.split(",") if v)


def _penalty_arg(name: str, q: float, gamma: float):
    key = name.lower().replace("_", "-")
    if key == "lq":
        return make_penalty(key, q=q)
    if key == "capped-lq":
        return make_penalty(key, q=q)
    if key in ("mcp", "firm"):
        return make_penalty(key, gamma=gamma)
    if key == "log":
        return make_penalty(key, gamma=max(gamma, 0.5))
    return make_penalty(key)


def _load_or_synth(args) -> np.ndarray:
    if getattr(args, "input", None):
        return tensorfile.read_tensor(args.input)
    if args.dims is None:
        raise SystemExit("either --input or --dims are required")
    rank = getattr(args, "synth_rank", None) or tuple(min(4, n) for n in args.dims)
    return dat.synth_lowrank_smooth(args.dims, rank, args.smoothness, args.seed)


def _sketch_from_args(args, dims) -> SketchConfig:
    if args.eps is not None:
        return SketchConfig(mode="fixed-accuracy", order=(0, 1), eps=args.eps,
                            block=args.block or 10, seed=args.seed)
    ranks = args.sketch_rank or (min(40, dims[0]), min(40, dims[1]))
    blocks = tuple(max(1, int(np.ceil(r / 4))) for r in ranks)
    return SketchConfig(mode="fixed-rank", order=(0, 1), ranks=ranks, blocks=blocks,
                        krylov=(args.krylov or 4,) * 2, seed=args.seed)


def _cmd_synth(args):
    x = dat.synth_lowrank_smooth(args.dims, args.rank, args.smoothness, args.seed)
    tensorfile.write_tensor(args.out, x)
    _emit({"command": "synth", "dims": ",".join(map(str, x.shape)),
           "rank": ",".join(map(str, args.rank)), "seed": args.seed, "out": args.out})


def _cmd_metrics(args):
    ref = tensorfile.read_tensor(args.ref)
    est = tensorfile.read_tensor(args.est)
    rec = dat.metrics(ref, est)
    _emit({"command": "metrics", **rec})


def _cmd_approx(args):
    x = _load_or_synth(args)
    t0 = time.perf_counter()
    record = {"command": "approx", "algo": args.algo,
              "dims": ",".join(map(str, x.shape)), "seed": args.seed}
    if args.algo == "sthosvd":
        if not args.rank_target:
            raise SystemExit("--rank is required for sthosvd")
        tf = sthosvd(x, args.rank_target, order=args.order)
    elif args.algo == "bki":
        if not args.rank_target:
            raise SystemExit("--rank is required for bki")
        ranks = args.rank_target
        blocks = args.block_vec or tuple(max(1, int(np.ceil(r / 4))) for r in ranks)
        krylov = (args.krylov,) * len(ranks) if args.krylov is not None else None
        tf = rsthosvd_bki(x, ranks, order=args.order, blocks=blocks,
                          krylov=krylov, seed=args.seed)
    else:  # blbp
        if args.eps is None:
            raise SystemExit("--eps is required for blbp")
        tf, diag = ad_rsthosvd_blbp(x, eps=args.eps, block=args.block or 10,
                                    order=args.order, seed=args.seed)
        record["implied_rel_error"] = diag.implied_error / max(np.linalg.norm(x), 1e-300)
        record["discovered_ranks"] = ",".join(str(diag.ranks[k]) for k in sorted(diag.ranks))
    elapsed = time.perf_counter() - t0
    err = np.linalg.norm(tf.reconstruct() - x) / max(np.linalg.norm(x), 1e-300)
    record.update({"rel_error": float(err), "time_s": elapsed,
                   "ranks": ",".join(map(str, tf.ranks))})
    if args.report:
        with open(args.report, "w") as fh:
            for key, value in record.items():
                fh.write(f"{key}={value}\n")
    _emit(record)


def _cmd_complete(args):
    truth = _load_or_synth(args)
    mobs, mask, _ = dat.corrupt(truth, args.sr, args.nr, args.seed + 1)
    phi = _penalty_arg(args.penalty, args.q, args.gamma)
    psi = _penalty_arg(args.noise_penalty, args.q, args.gamma)
    sketch = _sketch_from_args(args, truth.shape) if args.randomized else None
    cfg = SolverConfig(phi=phi, psi=psi, structure=args.structure,
                       gamma_modes=args.gamma_modes, xi=args.xi,
                       max_iters=args.max_iters, randomized=args.randomized,
                       sketch=sketch, seed=args.seed)
    if args.nr == 0 and args.noise_free:
        l, report = gnhtc(mobs, mask, cfg)
    else:
        l, _, report = gnrhtc(mobs, mask, cfg)
    rec = dat.metrics(truth, np.clip(l, 0.0, 1.0))
    _emit({"command": "complete", "sr": args.sr, "nr": args.nr,
           "penalty": args.penalty, "noise_penalty": args.noise_penalty,
           "structure": args.structure, "randomized": args.randomized,
           "iterations": report.iterations, "converged": report.converged,
           "time_s": report.wall_clock, **rec})
    if args.residual_csv:
        _write_residual_csv(args.residual_csv, report)
    if args.out:
        tensorfile.write_tensor(args.out, l)


def _cmd_onebit(args):
    truth = _load_or_synth(args)
    theta = args.theta
    if theta is None:
        theta = 1.2 * (float(np.abs(truth).max()) + 3.0 * args.sigma)
    obs = onebit_observe(truth, m=args.m, theta=theta, sigma=args.sigma,
                         seed=args.seed + 1, sparse_ratio=args.sparse_ratio)
    phi = _penalty_arg(args.penalty, args.q, args.gamma)
    psi = _penalty_arg(args.noise_penalty, args.q, args.gamma)
    cfg = SolverConfig.one_bit(phi=phi, psi=psi, gamma_modes=args.gamma_modes,
                               xi=args.xi, lam2=args.lam2, max_iters=args.max_iters,
                               seed=args.seed)
    if args.robust:
        l, s, report = gnobrhtc(obs, cfg, alpha=args.alpha)
    else:
        l, report = gnobhtc(obs, cfg, alpha=args.alpha)
    rec = dat.metrics(truth, np.clip(l, 0.0, 1.0))
    naive = dat.metrics(truth, np.clip(naive_estimate(obs), 0.0, 1.0))
    _emit({"command": "onebit", "m": args.m, "theta": theta, "sigma": args.sigma,
           "robust": args.robust, "iterations": report.iterations,
           "converged": report.converged, "time_s": report.wall_clock,
           "naive_psnr": naive["psnr"], **rec})
    if args.residual_csv:
        _write_residual_csv(args.residual_csv, report)
    if args.out:
        tensorfile.write_tensor(args.out, l)


def _cmd_bench(args):
    x = dat.synth_spectral_decay(args.dims, args.decay, args.seed)
    pen = _penalty_arg(args.penalty, args.q, args.gamma)
    tau = args.tau * float(np.linalg.norm(x)) / np.sqrt(x.size)
    t0 = time.perf_counter()
    det = gnhtsvt(x, Transform.fft(), pen, tau)
    t_det = time.perf_counter() - t0
    sketch = _sketch_from_args(args, x.shape)
    t0 = time.perf_counter()
    rnd = gnhtsvt_randomized(x, Transform.fft(), pen, tau, sketch)
    t_rnd = time.perf_counter() - t0
    dev = float(np.linalg.norm(rnd - det) / max(np.linalg.norm(det), 1e-300))
    _emit({"command": "bench", "dims": ",".join(map(str, x.shape)),
           "deterministic_s": t_det, "randomized_s": t_rnd,
           "speedup": t_det / max(t_rnd, 1e-12), "rel_deviation": dev})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tenrec",
                                description="randomized tensor approximation and recovery")
    sub = p.add_subparsers(dest="command", required=True)

    def add_synth_opts(sp):
        sp.add_argument("--dims", type=_ints, default=None,
                        help="comma-separated tensor dims for synthetic input")
        sp.add_argument("--synth-rank", type=_ints, default=None,
                        help="multilinear rank of the synthetic tensor")
        sp.add_argument("--smoothness", type=float, default=0.7)
        sp.add_argument("--seed", type=int, required=True)

    sp = sub.add_parser("synth", help="write a synthetic low-rank smooth tensor")
    sp.add_argument("--dims", type=_ints, required=True)
    sp.add_argument("--rank", type=_ints, required=True)
    sp.add_argument("--smoothness", type=float, default=0.7)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_synth)

    sp = sub.add_parser("metrics", help="PSNR/RSE between two tensor files")
    sp.add_argument("--ref", required=True)
    sp.add_argument("--est", required=True)
    sp.set_defaults(func=_cmd_metrics)

    sp = sub.add_parser("approx", help="Tucker compression of a tensor")
    sp.add_argument("--input", default=None, help="GTEN file (else synthetic)")
    add_synth_opts(sp)
    sp.add_argument("--algo", choices=("sthosvd", "bki", "blbp"), default="bki")
    sp.add_argument("--rank", dest="rank_target", type=_ints, default=None,
                    help="target ranks (sthosvd/bki)")
    sp.add_argument("--eps", type=float, default=None, help="relative tolerance (blbp)")
    sp.add_argument("--block", type=int, default=None, help="block size (blbp)")
    sp.add_argument("--block-vec", type=_ints, default=None, help="per-mode blocks (bki)")
    sp.add_argument("--krylov", type=int, default=None, help="Krylov depth (bki)")
    sp.add_argument("--order", type=_ints, default=None, help="processing order")
    sp.add_argument("--report", default=None)
    sp.set_defaults(func=_cmd_approx)

    sp = sub.add_parser("complete", help="tensor completion from corrupted samples")
    sp.add_argument("--input", default=None)
    add_synth_opts(sp)
    sp.add_argument("--sr", type=float, required=True, help="sampling rate")
    sp.add_argument("--nr", type=float, default=0.0, help="impulse noise ratio")
    sp.add_argument("--penalty", choices=PENALTY_NAMES, default="mcp")
    sp.add_argument("--noise-penalty", choices=PENALTY_NAMES, default="mcp")
    sp.add_argument("--structure", choices=("entry", "tube", "slice"), default="entry")
    sp.add_argument("--gamma-modes", type=_ints, default=None)
    sp.add_argument("--xi", type=float, default=1.5)
    sp.add_argument("--q", type=float, default=0.5)
    sp.add_argument("--gamma", type=float, default=2.5)
    sp.add_argument("--randomized", action="store_true")
    sp.add_argument("--sketch-rank", type=_ints, default=None)
    sp.add_argument("--krylov", type=int, default=4)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--block", type=int, default=None)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--noise-free", action="store_true",
                    help="use the exact-fit model when nr=0")
    sp.add_argument("--residual-csv", default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_complete)

    sp = sub.add_parser("onebit", help="recovery from dithered one-bit samples")
    sp.add_argument("--input", default=None)
    add_synth_opts(sp)
    sp.add_argument("--m", type=int, required=True, help="number of samples")
    sp.add_argument("--theta", type=float, default=None, help="dither level")
    sp.add_argument("--sigma", type=float, default=0.0)
    sp.add_argument("--alpha", type=float, default=None, help="box bound")
    sp.add_argument("--robust", action="store_true")
    sp.add_argument("--sparse-ratio", type=float, default=0.0)
    sp.add_argument("--penalty", choices=PENALTY_NAMES, default="mcp")
    sp.add_argument("--noise-penalty", choices=PENALTY_NAMES, default="l1")
    sp.add_argument("--gamma-modes", type=_ints, default=None)
    sp.add_argument("--xi", type=float, default=1.5)
    sp.add_argument("--lam2", type=float, default=None)
    sp.add_argument("--q", type=float, default=0.5)
    sp.add_argument("--gamma", type=float, default=2.5)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--residual-csv", default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_onebit)

    sp = sub.add_parser("bench", help="randomized vs deterministic thresholding")
    sp.add_argument("--dims", type=_ints, default=(200, 200, 20))
    sp.add_argument("--decay", type=float, default=0.9)
    sp.add_argument("--tau", type=float, default=0.05)
    sp.add_argument("--penalty", choices=PENALTY_NAMES, default="mcp")
    sp.add_argument("--q", type=float, default=0.5)
    sp.add_argument("--gamma", type=float, default=2.5)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--sketch-rank", type=_ints, default=None)
    sp.add_argument("--krylov", type=int, default=4)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--block", type=int, default=None)
    sp.set_defaults(func=_cmd_bench)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
