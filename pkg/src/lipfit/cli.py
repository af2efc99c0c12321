"""Command-line front end: completion fits, penalized logistic fits,
simulation grids, and rate-formula tables.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import data_io, experiments, simulation, theory
from .cv import default_lambda_grid, kfold_cv
from .losses import LossKind
from .matrix_admm import AdmmConfig, GaussianInit, MatrixProblem, admm_solve
from .simulation import ScenarioSpec, all_indices
from .vector_solver import FistaConfig, L1Penalty, SlopePenalty, VectorProblem, prox_grad_solve
from .prox_ops import slope_weights


def parse_loss(text: str) -> LossKind:
    if text == "hinge":
        return LossKind.hinge()
    if text == "logistic":
        return LossKind.logistic()
    if text == "squared":
        return LossKind.squared()
    if text.startswith("quantile:"):
        return LossKind.quantile(float(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(
        f"loss must be hinge|logistic|quantile:TAU|squared, got {text!r}")


def _parse_box(text: str):
    if text.lower() == "none":
        return None
    return float(text)


def _echo_flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def cmd_complete(args) -> int:
    loss = args.loss
    truth = None
    if args.scenario:
        with open(args.scenario, "r", encoding="utf-8") as handle:
            spec = simulation.scenario_from_config(handle.read())
        if isinstance(spec, ScenarioSpec):
            truth, train, _ = simulation.gen_classification(spec)
        else:
            truth, train, _ = simulation.gen_quantile(spec)
        test = None
    else:
        parsed = data_io.read_triplets(data_io.TripletFile(
            args.input, args.format, args.index_base))
        obs = parsed.observations
        if args.inject_outliers > 0:
            obs = data_io.inject_rating_outliers(obs, share=args.inject_outliers,
                                                 seed=args.seed)
        if args.binarize:
            obs = data_io.binarize_ratings(obs)
        if args.test_fraction > 0:
            train, test = data_io.train_test_split(obs, args.test_fraction, args.seed)
        else:
            train, test = obs, None

    alpha = 1.0 / train.n if args.alpha == "auto" else float(args.alpha)
    box = args.box
    if args.cv:
        if loss.classification:
            grid, metric = experiments.classification_grid(train), "misclassification"
        else:
            grid = experiments.quantile_fit_grid(train, loss)
            metric = "pinball" if loss.variant == "quantile" else "mse"
        cfg = AdmmConfig(alpha=alpha, tol=max(args.tol, 1e-7),
                         max_iter=min(args.max_iter, 1200))
        result = kfold_cv(MatrixProblem(train, loss, float(grid[0]), box), grid,
                          folds=args.cv_folds, metric=metric, seed=args.seed, admm=cfg)
        lam = result.best_lambda
    else:
        lam = args.lam

    problem = MatrixProblem(train, loss, lam, box)
    report = admm_solve(problem, AdmmConfig(alpha=alpha, tol=args.tol,
                                            max_iter=args.max_iter,
                                            init=GaussianInit(args.seed)))
    report.config.update(_echo_flags(args))
    report.config["lambda"] = lam

    metrics = {}
    est = report.estimate
    if truth is not None:
        metrics["l1_reconstruction"] = simulation.l1_reconstruction(est, truth)
        if loss.classification:
            metrics["misclassification"] = simulation.misclassification_rate(
                est, truth, all_indices(train.n_rows, train.n_cols))
    if test is not None and test.n:
        preds = est.ravel()[test.flat_indices()]
        metrics["test_mae"] = float(np.mean(np.abs(preds - test.values)))
        metrics["test_mse"] = float(np.mean((preds - test.values) ** 2))
        if loss.classification:
            metrics["test_misclassification"] = float(
                np.mean(simulation.sign_pm1(preds) != test.values))

    _emit(report, metrics, args.report, args.traces)
    return 0


def cmd_glm(args) -> int:
    raw = np.loadtxt(args.design, delimiter=",", ndmin=2)
    labels, design = raw[:, 0], raw[:, 1:]
    if design.shape[1] == 0:
        raise ValueError("design file needs label plus at least one feature column")
    if args.penalty == "l1":
        make_pen = L1Penalty
    else:
        w = slope_weights(design.shape[1])
        make_pen = lambda lam: SlopePenalty(lam, w)

    cfg = FistaConfig(max_iter=args.max_iter, tol=args.tol)
    if args.cv:
        center = theory.lambda_lasso(design.shape[1], labels.size)
        grid = default_lambda_grid(center)
        probe = VectorProblem(design, labels, LossKind.logistic(), make_pen(grid[0]),
                              args.radius)
        result = kfold_cv(probe, grid, folds=args.cv_folds, metric="misclassification",
                          seed=args.seed, fista=cfg)
        lam = result.best_lambda
    else:
        lam = args.lam

    problem = VectorProblem(design, labels, LossKind.logistic(), make_pen(lam),
                            args.radius)
    report = prox_grad_solve(problem, cfg)
    report.config.update(_echo_flags(args))
    report.config["lambda"] = lam
    est = report.estimate
    metrics = {
        "nonzeros": int(np.sum(np.abs(est) > 1e-10)),
        "train_misclassification": float(
            np.mean(simulation.sign_pm1(design @ est) != labels)),
    }
    _emit(report, metrics, args.report, args.traces)
    return 0


def cmd_simulate(args) -> int:
    seeds = range(args.seeds)
    kw = dict(m=args.m, t=args.t, rank=args.rank, fraction=args.fraction,
              seeds=seeds, folds=args.cv_folds, fast=not args.full)
    if args.experiment == "table1":
        rows = experiments.run_table1(**kw)
    elif args.experiment == "noise-sweep":
        rows = experiments.run_noise_sweep(**kw)
    elif args.experiment == "outlier-magnitude":
        rows = experiments.run_outlier_magnitude(**kw)
    elif args.experiment == "outlier-share":
        rows = experiments.run_outlier_share(**kw)
    else:
        rows = experiments.run_student(**kw)
    csv = experiments.rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def _sweep_values(text: str):
    name, _, spec = text.partition("=")
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"sweep must be param=lo:hi:num[:log], got {text!r}")
    lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
    if len(parts) == 4 and parts[3] == "log":
        vals = np.geomspace(lo, hi, num)
    else:
        vals = np.linspace(lo, hi, num)
    return name, vals


def cmd_rates(args) -> int:
    name, vals = _sweep_values(args.sweep)

    def evaluate(**over):
        p = dict(m=args.m, t=args.t, n=args.n, s=args.s, p=args.p, q=args.q,
                 kappa=args.kappa, const=args.const)
        p.update(over)
        f = args.formula
        if f == "lambda-matrix":
            return theory.lambda_matrix(int(p["m"]), int(p["t"]), int(p["n"]), p["const"])
        if f == "lambda-lasso":
            return theory.lambda_lasso(int(p["p"]), int(p["n"]), p["const"])
        if f == "lambda-slope":
            return theory.lambda_slope(int(p["n"]), p["const"])
        if f == "rademacher-s1":
            return theory.rademacher_bound_s1(int(p["m"]), int(p["t"]), p["const"])
        if f == "rho-star":
            return theory.rho_star_matrix(int(p["s"]), int(p["m"]), int(p["t"]),
                                          int(p["n"]), p["kappa"], p["const"])
        if f.startswith("rate:"):
            kind = f.split(":", 1)[1]
            kwargs = dict(kappa=p["kappa"], const=p["const"])
            if kind in ("matrix_S2", "matrix_Sp", "matrix_excess"):
                kwargs.update(m=int(p["m"]), t=int(p["t"]), n=int(p["n"]), s=int(p["s"]))
                if kind == "matrix_Sp":
                    kwargs["p_schatten"] = args.p_schatten
            elif kind in ("lasso_lq", "slope_l2"):
                kwargs.update(p=int(p["p"]), n=int(p["n"]), s=int(p["s"]))
                if kind == "lasso_lq":
                    kwargs["q"] = p["q"]
            else:
                kwargs["excess_hinge"] = args.excess_hinge
            return theory.rate_bound(kind, **kwargs)
        raise ValueError(f"unknown formula {f!r}")

    lines = [f"{name},{args.formula}"]
    for v in vals:
        v = float(v)
        lines.append(f"{v!r},{float(evaluate(**{name: v}))!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _emit(report, metrics, report_path, traces_path):
    if report_path:
        data_io.write_report(report, metrics, report_path, traces_path)
    else:
        blob = {"iterations": report.iterations, "converged": report.converged,
                "objective": report.objective_trace[-1], **metrics}
        for k, v in blob.items():
            print(f"{k}: {v}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lipfit",
        description="Penalized estimation with Lipschitz losses: matrix completion, "
                    "sparse logistic regression, simulations, and rate tables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complete", help="nuclear-norm-penalized completion fit")
    p.add_argument("--loss", type=parse_loss, default=LossKind.hinge(),
                   help="hinge|logistic|quantile:TAU|squared")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="lam", type=float, help="penalty level")
    group.add_argument("--cv", action="store_true", help="tune the penalty by CV")
    p.add_argument("--cv-folds", type=int, default=3)
    p.add_argument("--alpha", default="auto",
                   help="augmented Lagrange parameter; 'auto' = 1/N")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=6000)
    p.add_argument("--box", type=_parse_box, default=None,
                   help="entrywise bound, or 'none'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="triplet file (row col value [timestamp])")
    p.add_argument("--format", choices=("tsv", "csv"), default="tsv")
    p.add_argument("--index-base", type=int, choices=(0, 1), default=1)
    p.add_argument("--binarize", action="store_true",
                   help="map ratings 4,5 to +1 and the rest to -1")
    p.add_argument("--test-fraction", type=float, default=0.0)
    p.add_argument("--inject-outliers", type=float, default=0.0,
                   help="rewrite this share of 5-ratings to 1 before fitting")
    p.add_argument("--scenario", help="scenario config file (key = value lines)")
    p.add_argument("--report", help="write the fit report here")
    p.add_argument("--traces", help="write iteration traces CSV here")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("glm", help="l1/SLOPE-penalized logistic regression")
    p.add_argument("--design", required=True,
                   help="CSV with the label in the first column")
    p.add_argument("--penalty", choices=("l1", "slope"), default="l1")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="lam", type=float)
    group.add_argument("--cv", action="store_true")
    p.add_argument("--cv-folds", type=int, default=5)
    p.add_argument("--radius", type=float, default=None, help="l2-ball constraint")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write the fit report here")
    p.add_argument("--traces", help="write iteration traces CSV here")
    p.set_defaults(func=cmd_glm)

    p = sub.add_parser("simulate", help="run a simulation grid, emit metric CSV")
    p.add_argument("--experiment", required=True,
                   choices=("table1", "noise-sweep", "outlier-magnitude",
                            "outlier-share", "student"))
    p.add_argument("--m", type=int, default=60)
    p.add_argument("--t", type=int, default=60)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--seeds", type=int, default=3, help="number of seeds (0..k-1)")
    p.add_argument("--cv-folds", type=int, default=3)
    p.add_argument("--full", action="store_true",
                   help="tighter solver tolerances (slower)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rates", help="evaluate rate formulas over a parameter sweep")
    p.add_argument("--formula", required=True,
                   help="lambda-matrix|lambda-lasso|lambda-slope|rademacher-s1|"
                        "rho-star|rate:KIND")
    p.add_argument("--sweep", required=True, help="param=lo:hi:num[:log]")
    p.add_argument("--m", type=float, default=100)
    p.add_argument("--t", type=float, default=100)
    p.add_argument("--n", type=float, default=10000)
    p.add_argument("--s", type=float, default=3)
    p.add_argument("--p", type=float, default=1000)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--p-schatten", type=float, default=2.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--const", type=float, default=1.0)
    p.add_argument("--excess-hinge", type=float, default=1.0)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_rates)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "complete":
        if bool(args.input) == bool(args.scenario):
            parser.error("exactly one of --input or --scenario is required")
        if args.lam is None and not args.cv:
            parser.error("one of --lambda or --cv is required")
    if args.command == "glm" and args.lam is None and not args.cv:
        parser.error("one of --lambda or --cv is required")
    try:
        return args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
