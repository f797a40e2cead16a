"""Command-line front end: ``scope-prune {prune,analyze,synth,sweep}``.

Status lines on stdout are space-separated ``key=value`` pairs.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .bench import instance_from, run_sweep, timed_select
from .errors import DimensionMismatch, ScopeError
from .io import load_bundle, load_csv_fixture, load_selection, save_bundle, save_selection
from .metrics import ThetaGrid, coverage_curve, set_coverage
from .selection import SELECTORS
from .similarity import similarity_from_tokens
from .synth import SynthSpec, generate
from .types import SelectionConfig

log = logging.getLogger("scope_prune")


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _ints(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _load(path):
    """Bundle manifest/directory, or a ``.csv`` fixture."""
    if str(path).lower().endswith(".csv"):
        return load_csv_fixture(path)
    return load_bundle(path)


def _status(**fields) -> str:
    return " ".join(f"{k}={v}" for k, v in fields.items())


def cmd_prune(args) -> int:
    tokens, saliency = _load(args.bundle)
    sim = similarity_from_tokens(tokens)
    config = SelectionConfig(k=args.k, alpha=args.alpha, seed=args.seed)
    result, ms = timed_select(args.method, sim, saliency, config)
    save_selection(result, args.out)
    print(_status(n=tokens.n, k=result.k, method=args.method, alpha=f"{config.alpha:g}",
                  ms=f"{ms:.3f}", set_coverage=f"{set_coverage(result.selected, sim):.6f}",
                  out=args.out))
    return 0


def cmd_analyze(args) -> int:
    tokens, _ = _load(args.bundle)
    sim = similarity_from_tokens(tokens)
    methods = []
    for path in args.selections:
        result = load_selection(path)
        if result.n != tokens.n:
            raise DimensionMismatch(f"{path}: selection is for n={result.n}, bundle has n={tokens.n}")
        name = Path(path).stem
        if name in dict(methods):
            name = str(path)
        methods.append((name, result.selected))
    grid = ThetaGrid.parse(args.thetas) if args.thetas else ThetaGrid()
    text = coverage_curve(methods, sim, grid).to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_synth(args) -> int:
    spec = SynthSpec(n=args.n, d=args.d, clusters=args.clusters, cluster_spread=args.spread,
                     saliency_skew=args.skew, seed=args.seed)
    tokens, saliency, _ = generate(spec)
    meta = {f"synth_{k}": str(v) for k, v in asdict(spec).items()}
    path = save_bundle(tokens, saliency, args.out, metadata=meta)
    print(_status(manifest=path, n=spec.n, d=spec.d))
    return 0


def cmd_sweep(args) -> int:
    alphas, ks, seeds = _floats(args.alphas), _ints(args.ks), _ints(args.seeds)
    if not alphas or not ks or not seeds:
        raise ValueError("--alphas, --ks and --seeds must be non-empty")
    if args.bundle:
        fixed = instance_from(*_load(args.bundle))

        def instance_for_seed(seed):
            return fixed
    else:
        def instance_for_seed(seed):
            spec = SynthSpec(n=args.n, d=args.d, clusters=args.clusters, cluster_spread=args.spread,
                             saliency_skew=args.skew, seed=seed)
            tokens, saliency, _ = generate(spec)
            return instance_from(tokens, saliency)

    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            rows = run_sweep(instance_for_seed, alphas, ks, seeds, fh, jobs=args.jobs)
    else:
        rows = run_sweep(instance_for_seed, alphas, ks, seeds, sys.stdout, jobs=args.jobs)
    print(_status(rows=rows, cells=len(alphas) * len(ks) * len(seeds), out=args.out or "-"),
          file=sys.stderr if not args.out else sys.stdout)
    return 0


def _add_synth_flags(p: argparse.ArgumentParser) -> None:
    defaults = SynthSpec()
    p.add_argument("--n", type=int, default=defaults.n, help="token count")
    p.add_argument("--d", type=int, default=defaults.d, help="embedding dimension")
    p.add_argument("--clusters", type=int, default=defaults.clusters)
    p.add_argument("--spread", type=float, default=defaults.cluster_spread, help="within-cluster noise scale")
    p.add_argument("--skew", type=float, default=defaults.saliency_skew, help="saliency decay per cluster")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scope-prune", description="Saliency-coverage token subset selection.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prune", help="select k tokens from a bundle")
    p.add_argument("--bundle", required=True, help="manifest path, bundle directory or .csv fixture")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0, help="saliency exponent (default 1.0)")
    p.add_argument("--method", choices=SELECTORS, default="scope")
    p.add_argument("--seed", type=int, default=None, help="required for --method random")
    p.add_argument("--out", required=True, help="selection file to write")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("analyze", help="theta-coverage CSV for one or more selections")
    p.add_argument("--bundle", required=True)
    p.add_argument("selections", nargs="+")
    p.add_argument("--thetas", default=None, help="comma list or start:stop:count (default 0:1:11)")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="generate a synthetic clustered bundle")
    _add_synth_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sweep", help="run all selectors over alpha/k/seed grids")
    p.add_argument("--bundle", default=None, help="fixed bundle; otherwise one synthetic bundle per seed")
    _add_synth_flags(p)
    p.add_argument("--alphas", default="1.0")
    p.add_argument("--ks", default="64")
    p.add_argument("--seeds", default="0")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScopeError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
