"""Command-line front end.

Subcommands ``measure``, ``recover``, ``stability``, ``rnmp`` and ``sweep``.
Outputs are CSV unless ``--out`` ends in ``.json``; every artifact embeds
the parameters that produced it, and identical arguments give
byte-identical files.

Exit codes: 0 success, 2 bad input or parameters, 3 signal violates the
variant precondition, 4 numerical failure of the square root.
"""

import argparse
import sys

from . import __version__
from .errors import (
    InputFormatError,
    MetadataError,
    NonRealLeadingEntry,
    NotAPerfectSquare,
    OddLeadingIndex,
)
from .lab import (
    estimate_alpha,
    noise_robustness_sweep,
    stability_constant,
    verify_rnmp_bounds,
    verify_stability_inequality,
)
from .measurement import NOISE_KINDS, NoiseModel, add_noise, measure
from .recovery import dist_up_to_sign, recover_alternating, recover_direct
from .serialize import (
    format_measurement,
    format_report,
    format_result_json,
    is_json_path,
    read_measurement,
    read_signal,
    write_text,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4

DEFAULT_SIGMAS = "0,1e-6,1e-4,1e-2"


def _config(args):
    # the output path is not a parameter of the run; leaving it out lets two
    # runs written to different files compare byte for byte
    return {k: v for k, v in vars(args).items() if k not in ("func", "out")}


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return v


def _nonneg_float(text):
    v = float(text)
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a finite value >= 0, got {text}")
    return v


def _sigma_list(text):
    try:
        vals = [_nonneg_float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sigma list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("sigma list is empty")
    return vals


# ---------------------------------------------------------------------------
# commands


def cmd_measure(args):
    x = read_signal(args.input)
    m = measure(x, args.variant)
    if args.sigma > 0:
        level = args.sigma * float(m.intensities.max()) if args.relative else args.sigma
        m = add_noise(m, NoiseModel(level, args.seed, args.noise_kind))
    write_text(args.out, format_measurement(m, _config(args), as_json=is_json_path(args.out)))
    print(f"wrote {len(m)} intensities (variant {m.variant}, n={m.origin_n}, "
          f"sigma={m.noise_sigma:.17g}, clipped={m.clipped})", file=sys.stderr)
    return EXIT_OK


def cmd_recover(args):
    m, _ = read_measurement(args.input)
    if args.method == "direct":
        fallback = True if args.fallback else None
        result = recover_direct(m, tol=args.tol, fallback=fallback)
    else:
        result = recover_alternating(m, max_iter=args.max_iter, seed=args.seed)
    extra = {}
    print(f"residual {result.residual:.17g}")
    if args.truth is not None:
        truth = read_signal(args.truth)
        if truth.size != m.origin_n:
            raise InputFormatError(f"truth has length {truth.size}, expected {m.origin_n}")
        dist = dist_up_to_sign(result.estimate, truth)
        extra["dist_to_truth"] = dist
        print(f"dist {dist:.17g}")
    write_text(args.out, format_result_json(result, _config(args), extra))
    return EXIT_OK


def cmd_stability(args):
    c_used = args.c_used
    summary = {}
    if args.with_bound:
        c, est = stability_constant(args.variant, args.n, restarts=args.restarts, seed=args.seed)
        c_used = 2 * c if args.variant == "B" else c
        summary = {"c_bound": c, "alpha_hat": est.alpha_hat}
    rep = verify_stability_inequality(args.variant, args.n, num_pairs=args.pairs,
                                      seed=args.seed, c_used=c_used, refine=args.refine)
    row = rep.row()
    row.update(summary)
    write_text(args.out, format_report([row], args.seed, _config(args),
                                       as_json=is_json_path(args.out)))
    return EXIT_OK


def cmd_rnmp(args):
    est = estimate_alpha(args.s, args.f, args.n, restarts=args.restarts, seed=args.seed)
    row = est.row()
    if args.samples > 0:
        rep = verify_rnmp_bounds(args.s, args.f, args.n, num_samples=args.samples,
                                 seed=args.seed, estimate=est)
        row["alpha_hat"] = rep.alpha_hat
        row.update(samples=rep.num_samples, upper_violations=rep.upper_violations,
                   lower_violations=rep.lower_violations, sample_min_ratio=rep.min_ratio,
                   sample_max_ratio=rep.max_ratio)
    write_text(args.out, format_report([row], args.seed, _config(args),
                                       as_json=is_json_path(args.out)))
    return EXIT_OK


def cmd_sweep(args):
    rep = noise_robustness_sweep(args.variant, args.n, args.sigma, trials=args.trials,
                                 seed=args.seed, relative=not args.absolute,
                                 max_iter=args.max_iter, noise_kind=args.noise_kind)
    summary = {"trend_ok": rep.trend_ok, "direct_win_fraction": rep.direct_win_fraction}
    write_text(args.out, format_report([r.row() for r in rep.rows], args.seed, _config(args),
                                       as_json=is_json_path(args.out), summary=summary))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="symphase", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def out_arg(q):
        q.add_argument("--out", default=None,
                       help="output file (.json for JSON); stdout if omitted")

    q = sub.add_parser("measure", help="signal CSV -> measurement file")
    q.add_argument("--in", dest="input", required=True, help="signal CSV (index,re,im)")
    q.add_argument("--variant", choices=("A", "B"), default="A")
    q.add_argument("--sigma", type=_nonneg_float, default=0.0, help="noise level")
    q.add_argument("--relative", action="store_true", help="scale sigma by max intensity")
    q.add_argument("--noise-kind", choices=NOISE_KINDS, default="intensity")
    q.add_argument("--seed", type=int, default=0)
    out_arg(q)
    q.set_defaults(func=cmd_measure)

    q = sub.add_parser("recover", help="measurement file -> recovery result JSON")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--method", choices=("direct", "alternating"), default="direct")
    q.add_argument("--tol", type=_nonneg_float, default=1e-8)
    q.add_argument("--fallback", action="store_true",
                   help="accept an inexact square root instead of failing")
    q.add_argument("--max-iter", type=_positive_int, default=200)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--truth", default=None, help="signal CSV to compare against")
    out_arg(q)
    q.set_defaults(func=cmd_recover)

    q = sub.add_parser("stability", help="empirical stability inequality check")
    q.add_argument("--n", type=_positive_int, required=True)
    q.add_argument("--variant", choices=("A", "B"), default="A")
    q.add_argument("--pairs", type=_positive_int, default=10_000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--c-used", type=_nonneg_float, default=0.0)
    q.add_argument("--with-bound", action="store_true",
                   help="estimate c from the RNMP constant and test against it")
    q.add_argument("--refine", type=_nonneg_int, default=16)
    q.add_argument("--restarts", type=_positive_int, default=32)
    out_arg(q)
    q.set_defaults(func=cmd_stability)

    q = sub.add_parser("rnmp", help="estimate the RNMP constant")
    q.add_argument("--s", type=_positive_int, required=True)
    q.add_argument("--f", type=_positive_int, required=True)
    q.add_argument("--n", type=_positive_int, required=True)
    q.add_argument("--restarts", type=_positive_int, default=32)
    q.add_argument("--samples", type=_nonneg_int, default=10_000)
    q.add_argument("--seed", type=int, default=0)
    out_arg(q)
    q.set_defaults(func=cmd_rnmp)

    q = sub.add_parser("sweep", help="recovery error against noise level")
    q.add_argument("--n", type=_positive_int, required=True)
    q.add_argument("--variant", choices=("A", "B"), default="A")
    q.add_argument("--sigma", type=_sigma_list, default=_sigma_list(DEFAULT_SIGMAS),
                   help="comma-separated noise levels")
    q.add_argument("--absolute", action="store_true",
                   help="sigma is absolute instead of relative to max intensity")
    q.add_argument("--noise-kind", choices=NOISE_KINDS, default="intensity")
    q.add_argument("--trials", type=_positive_int, default=100)
    q.add_argument("--max-iter", type=_positive_int, default=200)
    q.add_argument("--seed", type=int, default=0)
    out_arg(q)
    q.set_defaults(func=cmd_sweep)
    return p


def _fail(code, err):
    print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    # subclasses of ValueError first so they keep their own exit code
    except NonRealLeadingEntry as err:
        return _fail(EXIT_PRECONDITION, err)
    except (NotAPerfectSquare, OddLeadingIndex) as err:
        return _fail(EXIT_NUMERICAL, err)
    except (InputFormatError, MetadataError, ValueError, OSError) as err:
        return _fail(EXIT_INPUT, err)


if __name__ == "__main__":
    sys.exit(main())
