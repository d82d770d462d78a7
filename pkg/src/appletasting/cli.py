"""Command-line harness.

Subcommands: ``run`` (sweep a grid from a config file), ``fit`` (scaling
exponents from a result CSV), ``dims`` (dimension report for a class file),
``oracle`` (exact minimax value at tiny scale), ``sample-class`` and
``verify-class`` (random-class pipeline).  Exit status is 0 only if no
invariant row failed.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import adversaries, classes, dimensions, harness, minimax


def _cmd_run(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = harness.SweepConfig.from_ini(fh)
    rows = harness.run_sweep(config)
    out = args.out or config.out
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            harness.write_rows(rows, fh)
    else:
        harness.write_rows(rows, sys.stdout)
    bad = sum(1 for r in rows if r.within_bound == "0")
    skipped = sum(1 for r in rows if r.within_bound == "skipped")
    print(f"{len(rows)} rows, {bad} bound violations, {skipped} skipped", file=sys.stderr)
    return 1 if bad else 0


def _cmd_fit(args) -> int:
    with open(args.csv, "r", encoding="utf-8") as fh:
        rows = harness.read_rows(fh)
    group_by = tuple(g.strip() for g in args.group_by.split(",") if g.strip())
    fits = harness.fit_scaling(rows, group_by=group_by)
    for f in fits:
        key = ",".join(str(v) for v in f.group)
        print(f"{key}: alpha={f.alpha:.4f} coeff={f.coefficient:.4f} residual={f.residual:.4f} samples={f.samples}")
    return 0


def _cmd_dims(args) -> int:
    hclass = classes.load_class(args.classfile)
    L = dimensions.littlestone_dim(hclass)
    d1 = dimensions.width_depth(hclass, 1, args.cap)
    print(f"hypotheses: {hclass.size}  domain: {hclass.domain_size}")
    print(f"littlestone: {L}")
    print(f"width1_depth: {'cap-exceeded' if d1 is None else d1}")
    for k in args.k:
        v = dimensions.d1_k(hclass, k, args.cap)
        print(f"width1_depth_k{k}: {'cap-exceeded' if v is None else v}")
    w = dimensions.effective_width(hclass, args.cap)
    print(f"effective_width: {'unknown-at-cap' if w is None else w}")
    if w is None:
        label = "unknown-at-cap"
    elif w == 1:
        label = "easy"
    else:
        label = "hard"
    print(f"trichotomy: {label}")
    return 0


def _cmd_oracle(args) -> int:
    if args.universal:
        hclass = classes.universal_class(args.universal)
    else:
        hclass = classes.load_class(args.classfile)
    v = minimax.minimax_value(hclass, args.T, args.k, budget=args.budget)
    print(v)
    return 0


def _cmd_sample_class(args) -> int:
    spec = adversaries.RandomClassSpec(d=args.d, T=args.T, c=args.c, seed=args.seed, size_cap=args.size_cap)
    hclass = adversaries.sample_random_class(spec)
    comments = [f"seed={spec.seed} p={spec.resolved_p:.6g}", f"d={spec.d} T={spec.T} c={spec.c}"]
    classes.save_class(hclass, args.out, comments=comments)
    print(f"wrote {hclass.size} hypotheses over {hclass.domain_size} instances to {args.out}")
    return 0


def _cmd_verify_class(args) -> int:
    hclass = classes.load_class(args.classfile)
    ones_threshold = args.ones_threshold
    if ones_threshold is None:
        ones_threshold = (args.c / 100.0) * math.sqrt(args.d * args.T * math.log2(args.T))
    decay = args.decay
    if decay is None:
        decay = min(0.9, 1000.0 * (args.c / 100.0) * math.sqrt(args.d * math.log2(args.T) / args.T))
    report = adversaries.verify_random_class(
        hclass,
        args.d,
        args.T,
        ones_threshold=ones_threshold,
        decay=decay,
        chains=args.chains,
        chain_seed=args.chain_seed,
        ldim_budget=args.ldim_budget,
    )
    print(f"item1 (min ones {report.min_ones} >= {report.ones_threshold:.4g}): {report.item1}")
    print(f"item2 (chain steps {report.chains_checked}, violations {report.chain_violations}): {report.item2}")
    ld = "-" if report.ldim is None else report.ldim
    print(f"item3 (littlestone {ld} < {report.ldim_bound:.4g}): {report.item3}")
    return 0 if report.ok else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="appletast", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run a sweep from a config file")
    p.add_argument("config")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("fit", help="fit scaling exponents from a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--group-by", default="learner,adversary,n,k")
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("dims", help="dimension report for a class file")
    p.add_argument("classfile")
    p.add_argument("--cap", type=int, default=64)
    p.add_argument("-k", type=int, action="append", default=[])
    p.set_defaults(fn=_cmd_dims)

    p = sub.add_parser("oracle", help="exact minimax mistake value at tiny scale")
    p.add_argument("classfile", nargs="?")
    p.add_argument("-u", "--universal", type=int, default=None, help="use the n-expert universal class")
    p.add_argument("-T", type=int, required=True)
    p.add_argument("-k", type=int, default=0)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("sample-class", help="draw a seeded random class and write it")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-T", type=int, required=True)
    p.add_argument("-c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size-cap", type=int, default=4096)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_sample_class)

    p = sub.add_parser("verify-class", help="verify the random-class properties")
    p.add_argument("classfile")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-T", type=int, required=True)
    p.add_argument("-c", type=float, default=1.0)
    p.add_argument("--ones-threshold", type=float, default=None)
    p.add_argument("--decay", type=float, default=None)
    p.add_argument("--chains", type=int, default=8)
    p.add_argument("--chain-seed", type=int, default=0)
    p.add_argument("--ldim-budget", type=int, default=None)
    p.set_defaults(fn=_cmd_verify_class)

    args = ap.parse_args(argv)
    if args.cmd == "oracle" and not args.universal and not args.classfile:
        ap.error("oracle needs a class file or -u N")
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
