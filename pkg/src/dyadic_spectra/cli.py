"""Command-line front end.

    dyadic-spectra spectrum --family normal --alpha-grid 0:0.5:0.05
    dyadic-spectra solve --kps
    dyadic-spectra count --set A --n 4
    dyadic-spectra profile --n 8 --format csv
    dyadic-spectra sample --family alpha --alpha 0.2 --n 1024 --seed 7
    dyadic-spectra estimate --family pq --theta 0.4 --alpha 0.1 --n 65536 --seed 1
    dyadic-spectra diagnose --input word.json --N 10 --m 3 --epsilon 0.05

Data goes to stdout, log messages to stderr. Exit codes: 0 success,
1 internal error, 2 domain violation (empty level set, exact overflow,
bad parameter), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

from . import counting, diagnostics, measure, spectra

log = logging.getLogger("dyadic_spectra")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64

THREADS_ENV = "DYADIC_SPECTRA_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (both ends inclusive) or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            return spectra.grid(*(float(p) for p in parts))
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    raise UsageError(f"grid must be start:stop:step, got {text!r}")


def parse_window(text: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = int(parts[0])
            return v, v
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise UsageError(f"window must be a:b or a single integer, got {text!r}")


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _in_units(value: float, units: str) -> float:
    return value / spectra.LOG2 if units == "bits" else value


def _dump(obj) -> str:
    return json.dumps(obj, allow_nan=True)


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(args, out):
    alphas = parse_grid(args.alpha_grid)
    thetas = parse_grid(args.theta_grid) if args.theta_grid else None
    if args.family == "freq" and thetas is None:
        raise UsageError("--family freq needs --theta-grid")
    points = spectra.spectrum_scan(alphas, thetas, args.family, workers=_workers())
    if args.format == "json":
        out.write(spectra.scan_to_json(points) + "\n")
    else:
        out.write(spectra.scan_to_csv(points))


def _domain(point: spectra.SpectrumPoint):
    if point.regime == spectra.EMPTY:
        raise spectra.EmptyLevelSetError(
            f"empty level set at alpha={point.alpha}" + ("" if point.theta is None else f", theta={point.theta}")
        )
    return point


def cmd_solve(args, out):
    units = args.units
    if args.kps:
        p = spectra.solve_kps(args.tol)
        h = -math.log1p(-p)
        doc = {"p": p, "entropy_nats": h, "entropy_bits": h / spectra.LOG2, "residual": abs(spectra.kps_residual(p))}
    elif args.ps:
        _need(args, "alpha")
        if args.alpha == 1.0:
            pt = spectra.h_A_alpha(args.alpha)
            doc = {"alpha": 1.0, "entropy_nats": pt.entropy, "regime": pt.regime}
        else:
            roots = spectra.solve_ps(args.alpha, args.tol)
            pt = _domain(spectra.h_A_alpha(args.alpha, args.tol))
            r1, r2 = roots.residuals(args.alpha)
            doc = {"alpha": args.alpha, "p": roots.p, "q": roots.q, "entropy_nats": pt.entropy,
                   "entropy_bits": pt.entropy_bits, "residual": max(r1, r2), "regime": pt.regime}
    elif args.corollary:
        _need(args, "alpha")
        theta = spectra.solve_corollary_theta(args.alpha, args.tol)
        h = spectra.h_freq(theta, args.alpha).entropy
        doc = {"alpha": args.alpha, "theta": theta, "entropy_nats": h, "entropy_bits": h / spectra.LOG2,
               "residual": abs(spectra.corollary_residual(theta, args.alpha))}
    elif args.closed_form:
        theta = spectra.theta_star_closed_form()
        doc = {"theta": theta, "residual": abs(spectra.corollary_residual(theta, 0.0))}
    elif args.normal:
        _need(args, "alpha")
        pt = _domain(spectra.h_normal_alpha(args.alpha))
        doc = {"alpha": args.alpha, "entropy_nats": pt.entropy, "entropy_bits": pt.entropy_bits, "regime": pt.regime}
    else:
        _need(args, "alpha")
        _need(args, "theta")
        pt = _domain(spectra.h_freq(args.theta, args.alpha))
        doc = {"alpha": args.alpha, "theta": args.theta, "entropy_nats": pt.entropy,
               "entropy_bits": pt.entropy_bits, "regime": pt.regime}
    if "entropy_nats" in doc:
        doc["entropy"] = _in_units(doc["entropy_nats"], units)
        doc["units"] = units
    out.write(_dump(doc) + "\n")


def _need(args, name):
    if getattr(args, name) is None:
        raise UsageError(f"--{name} is required here")


def cmd_count(args, out):
    if args.n < 1:
        raise ValueError("--n must be positive")
    if args.set == "A":
        value = counting.count_A(args.n)
    elif args.set == "B":
        value = counting.count_B(args.n)
    else:
        if args.ones is None or args.pairs is None:
            raise UsageError("--set level needs --ones and --pairs windows")
        value = counting.level_set_count(args.n, parse_window(args.ones), parse_window(args.pairs), args.mode)
        if args.mode == counting.LOG:
            value = repr(float(value))
    out.write(f"{value}\n")


def cmd_profile(args, out):
    if args.n < 1:
        raise ValueError("--n must be positive")
    pm = counting.profile_matrix(args.n, args.mode)
    out.write(pm.to_json() + "\n" if args.format == "json" else pm.to_csv())


def _params_from(args) -> measure.MeasureParams:
    if args.family == "alpha":
        _need(args, "alpha")
        return measure.from_alpha(args.alpha)
    if args.family == "pq":
        _need(args, "alpha")
        _need(args, "theta")
        return measure.from_theta_alpha(args.theta, args.alpha)
    if args.family == "uniform":
        return measure.uniform()
    if not args.params:
        raise UsageError("--family custom needs --params JSON")
    return measure.MeasureParams.from_json(args.params)


def word_stats(word, params=None) -> dict:
    stats = {
        "n": int(len(word)),
        "digit_frequency": diagnostics.digit_frequency(word),
        "pair_frequency": diagnostics.pair_frequency(word),
    }
    if params is not None:
        h = measure.empirical_local_entropy(params, word)
        stats["empirical_local_entropy"] = h if math.isfinite(h) else "inf"
    return stats


def _check_seed(args):
    if args.seed is None:
        raise UsageError("--seed is required for randomized commands")


def cmd_sample(args, out):
    _check_seed(args)
    params = _params_from(args)
    word = measure.sample(params, args.n, args.seed)
    if args.format == "binary":
        if not args.out:
            raise UsageError("--format binary needs --out")
        measure.write_word(args.out, word, binary=True)
        out.write(_dump({"seed": args.seed, "n": args.n, "out": args.out}) + "\n")
        return
    if args.format == "ascii":
        out.write(f"# seed={args.seed}\n{measure.word_to_str(word)}\n")
        return
    doc = {
        "seed": args.seed,
        "n": args.n,
        "params": json.loads(params.to_json()),
        "word": measure.word_to_str(word),
        "stats": word_stats(word, params),
    }
    out.write(_dump(doc) + "\n")


def cmd_estimate(args, out):
    _check_seed(args)
    params = _params_from(args)
    rows = []
    for r in range(args.replicates):
        seed = args.seed + r
        word = measure.sample(params, args.n, seed)
        row = word_stats(word, params)
        row["seed"] = seed
        rows.append(row)
    doc = {
        "seed": args.seed,
        "replicates": args.replicates,
        "params": json.loads(params.to_json()),
        "expected": {
            "digit_frequency": measure.xi(params),
            "pair_frequency": measure.expected_pair_freq(params),
            "local_entropy": measure.local_entropy(params),
            "local_entropy_units": _in_units(measure.local_entropy(params), args.units),
        },
        "units": args.units,
        "samples": rows,
    }
    out.write(_dump(doc) + "\n")


def _load_input(path):
    with open(path, "rb") as fh:
        head = fh.read(1)
    if head == b"{":
        with open(path) as fh:
            doc = json.load(fh)
        word = measure.as_word(doc["word"])
        params = measure.MeasureParams(**doc["params"]) if "params" in doc else None
        return word, params, doc.get("seed")
    return measure.read_word(path), None, None


def cmd_diagnose(args, out):
    word, params, seed = _load_input(args.input)
    if args.params:
        params = measure.MeasureParams.from_json(args.params)
    report = {"seed": seed, "stats": word_stats(word, params)}
    report["block_max_deviation"] = {
        str(m): diagnostics.max_block_deviation(word, m) for m in range(1, args.block_order + 1)
    }
    if args.N is not None:
        if args.epsilon is None:
            raise UsageError("--N needs --epsilon")
        if len(word) < 2**args.N:
            raise ValueError(f"word length {len(word)} is below 2**N")
        nrep = diagnostics.membership_N(word, args.N, args.m, args.epsilon)
        report["membership_N"] = {"member": nrep.member, "levels_checked": nrep.levels_checked,
                                  "truncated_at": nrep.truncated_at, "violations": nrep.violations}
        if args.alpha is not None:
            arep = diagnostics.membership_A(word, args.alpha, args.N, args.epsilon)
            report["membership_A"] = {"member": arep.member, "levels_checked": arep.levels_checked,
                                      "truncated_at": arep.truncated_at, "violations": arep.violations}
    n = len(word)
    if n & (n - 1) == 0 and n.bit_length() - 1 >= args.m + 3:
        table = diagnostics.x_table(word, args.m)
        gap = diagnostics.nnorm_gap(table, args.epsilon if args.epsilon is not None else 0.0)
        report["x_table"] = {"relations_hold": table.relations_hold(), "min_eps": gap.min_eps,
                             "min_eps_I": gap.min_eps_I, "min_eps_II": gap.min_eps_II}
    out.write(_dump(report) + "\n")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyadic-spectra", description="Entropy spectra of (k, 2k) level sets.")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", help="tabulate an entropy spectrum")
    p.add_argument("--family", choices=spectra.FAMILIES, default="normal")
    p.add_argument("--alpha-grid", required=True)
    p.add_argument("--theta-grid")
    p.add_argument("--units", choices=("nats", "bits"), default="nats")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("solve", help="root solvers and single spectrum values")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--kps", action="store_true")
    which.add_argument("--ps", action="store_true")
    which.add_argument("--corollary", action="store_true")
    which.add_argument("--closed-form", action="store_true")
    which.add_argument("--normal", action="store_true")
    which.add_argument("--freq", action="store_true")
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--tol", type=float, default=spectra.DEFAULT_TOL)
    p.add_argument("--units", choices=("nats", "bits"), default="nats")

    p = sub.add_parser("count", help="exact word counts")
    p.add_argument("--set", choices=("A", "B", "level"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ones")
    p.add_argument("--pairs")
    p.add_argument("--mode", choices=(counting.EXACT, counting.LOG), default=counting.EXACT)

    p = sub.add_parser("profile", help="(ones, pairs) profile matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=(counting.EXACT, counting.LOG), default=counting.EXACT)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    for name, helptext in (("sample", "draw a word"), ("estimate", "Monte-Carlo estimates")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--family", choices=("alpha", "pq", "uniform", "custom"), default="alpha")
        p.add_argument("--alpha", type=float)
        p.add_argument("--theta", type=float)
        p.add_argument("--params", help="MeasureParams JSON")
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--seed", type=int)
        p.add_argument("--units", choices=("nats", "bits"), default="nats")
        if name == "sample":
            p.add_argument("--format", choices=("json", "ascii", "binary"), default="json")
            p.add_argument("--out")
        else:
            p.add_argument("--replicates", type=int, default=1)

    p = sub.add_parser("diagnose", help="normality and membership diagnostics of a word")
    p.add_argument("--input", required=True)
    p.add_argument("--params", help="MeasureParams JSON for the local entropy")
    p.add_argument("--N", type=int)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--block-order", type=int, default=4)
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "solve": cmd_solve,
    "count": cmd_count,
    "profile": cmd_profile,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "diagnose": cmd_diagnose,
}


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().rstrip() + "\nmissing command")
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=err)
    try:
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (spectra.EmptyLevelSetError, counting.ExactOverflowError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        err.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
