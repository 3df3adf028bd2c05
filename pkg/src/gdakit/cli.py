"""Command-line driver: ``gdakit generate|fit|grid|experiment``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric degeneracy.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import datagen, discriminant, grid
from .errors import DataError, GdaError, NotPositiveDefinite, NumericDegeneracy, UnknownScenario
from .estimation import LabeledDataset, estimate_cov, estimate_mean, estimate_priors
from .experiments import EXPERIMENTS, run_experiment
from .gaussian import GaussianParams, make_rng
from .mixture import EMOptions, MixtureModel, em_fit

log = logging.getLogger("gdakit")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(GdaError):
    pass


def _bounds(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bounds must be four numbers, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("bounds must be xmin,xmax,ymin,ymax")
    return vals


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys use flag names without dashes."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# -- subcommands -------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = datagen.builtin_scenario(args.scenario, args.seed, pair=tuple(args.pair))
    ds = datagen.generate(spec)
    text = datagen.to_csv(ds)
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %d rows to %s", ds.n, args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _true_likelihoods(path) -> tuple[list, list | None]:
    doc = json.loads(Path(path).read_text())
    likes = []
    for entry in doc["classes"]:
        if "mixture" in entry:
            m = entry["mixture"]
            w = np.asarray(m["weights"], dtype=float)
            likes.append(
                MixtureModel(w / w.sum(), tuple(GaussianParams(c["mean"], c["cov"]) for c in m["components"]))
            )
        else:
            likes.append(GaussianParams(entry["mean"], entry["cov"]))
    return likes, doc.get("priors")


def fit_bayes(ds: LabeledDataset, args) -> discriminant.FittedClassifier:
    """Bayes from true parameters and/or EM mixtures; any remaining class gets its ML Gaussian."""
    priors = estimate_priors(ds)
    likes: list = [None] * ds.n_classes
    if args.bayes_true_params:
        given, given_priors = _true_likelihoods(args.bayes_true_params)
        if len(given) != ds.n_classes:
            raise DataError(f"true-parameter file has {len(given)} classes, data has {ds.n_classes}")
        likes = list(given)
        if given_priors is not None:
            priors = np.asarray(given_priors, dtype=float)
    if args.bayes_mixture:
        targets = args.mixture_classes
        if targets is None:
            targets = [int(np.argmax(ds.class_counts))]
        rng = make_rng(args.seed)
        for k in targets:
            likes[k] = em_fit(ds.rows(k), args.bayes_mixture, rng, EMOptions(restarts=args.em_restarts))
    for k, f in enumerate(likes):
        if f is None:
            cov = estimate_cov(ds, k, args.cov_mode) + args.ridge * np.eye(ds.dim)
            likes[k] = GaussianParams(estimate_mean(ds, k), cov)
    return discriminant.make_bayes(priors, likes)


def cmd_fit(args) -> int:
    ds = datagen.read_csv(args.train)
    try:
        if args.family == "bayes":
            clf = fit_bayes(ds, args)
        else:
            clf = discriminant.fit(ds, args.family, cov_mode=args.cov_mode, ridge=args.ridge)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(f"{exc}; try --ridge 1e-6 for small or collinear classes") from exc
    text = discriminant.dumps(clf)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def cmd_grid(args) -> int:
    clf = discriminant.loads(Path(args.model).read_text())
    if args.bounds is not None:
        bounds = args.bounds
    elif args.data:
        bounds = grid.default_bounds(datagen.read_csv(args.data))
    else:
        raise UsageError("grid needs --bounds or --data to place the lattice")
    if not args.out:
        raise UsageError("grid needs --out PREFIX for the CSV and PPM files")
    g = grid.compute_grid(clf, bounds, args.resolution, workers=args.workers)
    out = Path(args.out)
    grid.write_csv(g, out.with_suffix(".csv"))
    grid.write_ppm(g, out.with_suffix(".ppm"))
    counts = g.counts(clf.n_classes)
    print(json.dumps({"shape": list(g.shape), "bounds": list(g.bounds), "cell_counts": counts.tolist()}))
    return EXIT_OK


def cmd_experiment(args) -> int:
    report = run_experiment(args.name, args.seed, args.resolution, args.ridge, args.out)
    if not args.out:
        print(json.dumps(report, indent=2))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file supplying defaults")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--ridge", type=float, default=0.0, help="add ridge*I to estimated covariances")
    common.add_argument("--resolution", type=float, default=0.1)
    common.add_argument("--out")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="gdakit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic scenario as CSV")
    g.add_argument("--scenario", required=True, choices=datagen.SCENARIO_IDS)
    g.add_argument("--pair", type=int, nargs=2, default=(0, 1), metavar=("I", "J"),
                   help="reference Gaussians used by the binary scenarios b, d, f")
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("fit", parents=[common], help="fit a classifier and write model JSON")
    f.add_argument("--family", required=True, choices=discriminant.FAMILIES)
    f.add_argument("--train", required=True)
    f.add_argument("--cov-mode", choices=("mle", "unbiased"), default="unbiased")
    f.add_argument("--bayes-true-params", help="JSON {classes: [{mean, cov} | {mixture}], priors?}")
    f.add_argument("--bayes-mixture", type=int, metavar="K", help="EM-fit a K-component mixture")
    f.add_argument("--mixture-classes", type=int, nargs="+", help="classes to model as mixtures (default: largest)")
    f.add_argument("--em-restarts", type=int, default=5)
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("grid", parents=[common], help="rasterise decision regions to CSV and PPM")
    r.add_argument("--model", required=True)
    r.add_argument("--bounds", type=_bounds, help="xmin,xmax,ymin,ymax")
    r.add_argument("--data", help="CSV whose padded bounding box sets the bounds")
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_grid)

    e = sub.add_parser("experiment", parents=[common], help="run one simulation family")
    e.add_argument("--name", required=True, choices=tuple(EXPERIMENTS))
    e.set_defaults(func=cmd_experiment)
    p.subcommands = {"generate": g, "fit": f, "grid": r, "experiment": e}
    return p


def _convert(action: argparse.Action, value: str):
    if isinstance(action, argparse._StoreTrueAction):
        return value.lower() in ("1", "true", "yes", "on")
    conv = action.type or str
    if action.nargs in (2, "+"):
        return [conv(v) for v in value.replace(",", " ").split()]
    return conv(value)


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # "--bounds -1,1,-2,2" would otherwise read the value as an option
    joined, i = [], 0
    while i < len(argv):
        if argv[i] == "--bounds" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            joined.append(f"--bounds={argv[i + 1]}")
            i += 2
        else:
            joined.append(argv[i])
            i += 1
    argv = joined
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    early, _ = pre.parse_known_args(argv)
    if early.config and early.command in parser.subcommands:
        try:
            cfg = read_config(early.config)
        except (OSError, UsageError) as exc:
            parser.error(str(exc))
        # config supplies defaults; explicit flags win
        sub = parser.subcommands[early.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            if key not in known or key in ("config", "help"):
                parser.error(f"unknown config key {key!r}")
            try:
                defaults[key] = _convert(known[key], value)
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                parser.error(f"config key {key!r}: {exc}")
            known[key].required = False
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, UnknownScenario) as exc:
        print(f"gdakit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericDegeneracy as exc:
        print(f"gdakit: numeric degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, GdaError, ValueError, KeyError, OSError) as exc:
        print(f"gdakit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
