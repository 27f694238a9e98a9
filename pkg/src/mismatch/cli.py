"""Command-line experiment runner.

Exit status: 0 on success, 1 when a configuration or a validation check
fails, 2 on a runtime error.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .codec import Codebook, DEFAULT_BUDGET, favorite_type, index_entropy_estimate, simulate
from .codec.experiments import default_b
from .config import KINDS, load_config, parse_config
from .distributions import Gaussian
from .errors import ConfigError, MismatchError
from .ratefn import additive_mi, rate_pqd
from .validation import TOLERANCE, cross_validate, random_instances

UNITS = "rates in bits/symbol; distortions per letter"


def _write_csv(path, header, rows, meta):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}: {value}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _meta(cfg, args, tolerances):
    return {
        "experiment": cfg.kind,
        "config_sha256": cfg.digest,
        "version": __version__,
        "seed": cfg.seed,
        "budget": args.budget,
        "units": UNITS,
        "tolerances": ", ".join(f"{k}={v}" for k, v in tolerances.items()) or "none",
    }


def run_rate(cfg, args):
    P = cfg.source.marginal
    rows = []
    for D in sorted(cfg.D):
        s = rate_pqd(P, cfg.codebook, cfg.distortion, D)
        rows.append((D, s.lambda_star, s.rate_bits, s.lmi_bits, s.gap_bits))
    header = ["D", "lambda_star", "rate_bits", "lmi_bits", "gap_bits"]
    path = _write_csv(Path(args.out) / "rate.csv", header, rows, _meta(cfg, args, {}))
    for r in rows:
        print(f"D={r[0]:.6g}  R={r[2]:.6f}  I_m={r[3]:.6f}  gap={r[4]:.6f}")
    print(f"wrote {path}")
    return 0


def run_simulate(cfg, args):
    rows = []
    for D in cfg.D:
        b = default_b(cfg.source, cfg.codebook, cfg.distortion, D) if cfg.b is None else cfg.b
        for n in cfg.n:
            traces = simulate(
                cfg.source, cfg.codebook, cfg.distortion, D, n, cfg.trials, cfg.seed, b, args.budget, args.threads
            )
            for t, tr in enumerate(traces):
                rows.append((D, n, t, tr.index_prime, tr.truncated, tr.naive_bits, tr.boundary_flag))
            mean_log = np.mean([tr.log_index_rate for tr in traces])
            trunc = np.mean([tr.truncated for tr in traces])
            print(f"D={D:.6g} n={n}: mean (1/n)log2 N'={mean_log:.4f}  truncated={trunc:.3%}  b={b:.4f}")
    header = ["D", "n", "trial", "N_n", "truncated", "naive_bits", "boundary_flag"]
    path = _write_csv(Path(args.out) / "simulate.csv", header, rows, _meta(cfg, args, {}))
    print(f"wrote {path}")
    return 0


def run_favorite(cfg, args):
    rows = []
    for D in cfg.D:
        for n in cfg.n:
            r = favorite_type(
                cfg.source, cfg.codebook, cfg.distortion, D, n, cfg.trials, cfg.seed, cfg.b,
                method=cfg.method, budget=args.budget, threads=args.threads,
            )
            rows.append((D, n, r.distance, r.metric, r.used, r.truncated))
            print(f"D={D:.6g} n={n}: {r.metric}={r.distance:.5f} ({r.used}/{r.trials} matched)")
    header = ["D", "n", "tv_distance", "metric", "used", "truncated"]
    path = _write_csv(Path(args.out) / "favorite_type.csv", header, rows, _meta(cfg, args, {}))
    print(f"wrote {path}")
    return 0


def run_entropy_gain(cfg, args):
    P = cfg.source.marginal
    rows = []
    for D in cfg.D:
        sol = rate_pqd(P, cfg.codebook, cfg.distortion, D)
        b = sol.rate_bits + 0.5 if cfg.b is None else cfg.b
        for n in cfg.n:
            ests = []
            for cs in cfg.seeds:
                e = index_entropy_estimate(
                    cfg.source, Codebook(n, cfg.codebook, cs), cfg.distortion, D, b, cfg.trials, cfg.seed, args.budget
                )
                ests.append(e)
                rows.append((D, n, cs, e.naive_rate, e.plug_in, sol.gap_bits, e.stderr, e.miller_madow))
            naive = np.mean([e.naive_rate for e in ests])
            ent = np.mean([e.plug_in for e in ests])
            rows.append((D, n, "mean", naive, ent, sol.gap_bits, "", ""))
            print(
                f"D={D:.6g} n={n}: naive={naive:.4f} index_entropy={ent:.4f} "
                f"gain={naive - ent:.4f} (H(Q*||Q)={sol.gap_bits:.4f}, I_m={sol.lmi_bits:.4f})"
            )
    header = ["D", "n", "codebook_seed", "naive_rate", "index_entropy", "gap_lower_bound", "stderr", "miller_madow"]
    path = _write_csv(Path(args.out) / "entropy_gain.csv", header, rows, _meta(cfg, args, {}))
    print(f"wrote {path}")
    return 0


def run_asymptotics(cfg, args):
    P = cfg.source.marginal
    rows = []
    for D in cfg.D:
        limit = additive_mi(P, cfg.distortion, D)
        for tau in sorted(cfg.tau_sq):
            s = rate_pqd(P, Gaussian(tau), cfg.distortion, D)
            rows.append((D, tau, s.rate_bits, s.lmi_bits, limit, abs(s.lmi_bits - limit)))
            print(f"D={D:.6g} tau^2={tau:g}: I_m={s.lmi_bits:.6f}  I(X;X+Z)={limit:.6f}")
    header = ["D", "tau_sq", "rate_bits", "lmi_bits", "additive_mi_bits", "abs_diff"]
    path = _write_csv(Path(args.out) / "asymptotics.csv", header, rows, _meta(cfg, args, {}))
    print(f"wrote {path}")
    return 0


def run_validate(cfg, args):
    rows = cross_validate(random_instances(cfg.instances, cfg.seed))
    out = [(r.instance, r.check, r.solver, r.oracle, r.diff, r.tolerance, r.passed) for r in rows]
    header = ["instance", "check", "solver_bits", "oracle_bits", "abs_diff", "tolerance", "pass"]
    path = _write_csv(Path(args.out) / "validate.csv", header, out, _meta(cfg, args, {"abs_diff": TOLERANCE}))
    failed = [r for r in rows if not r.passed]
    for check in sorted({r.check for r in rows}):
        sub = [r for r in rows if r.check == check]
        worst = max(r.diff for r in sub)
        ok = all(r.passed for r in sub)
        print(f"{check:12s} {'PASS' if ok else 'FAIL'}  worst |diff| = {worst:.3e}  ({len(sub)} instances)")
    print(f"wrote {path}")
    return 1 if failed else 0


RUNNERS = {
    "rate": run_rate,
    "simulate": run_simulate,
    "favorite-type": run_favorite,
    "entropy-gain": run_entropy_gain,
    "asymptotics": run_asymptotics,
    "validate": run_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="mismatch", description="Mismatched-codebook rate experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(KINDS) + "}")
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", type=Path, required=kind != "validate", help="YAML experiment file")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed (u64)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max codewords compared per search")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command) if args.config else parse_config({}, args.command)
    except ConfigError as exc:
        print("invalid configuration:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"cannot read configuration: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.raw["seed"] = args.seed
    if args.seed is not None and "seeds" not in cfg.raw:
        cfg.seeds = [args.seed]
    try:
        return RUNNERS[cfg.kind](cfg, args)
    except MismatchError as exc:
        module = type(exc).__module__
        print(f"runtime error ({type(exc).__name__} in {cfg.kind}, {module}): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
