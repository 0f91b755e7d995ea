"""Command-line entry points: sample, kl, action, experiment."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness, metrics, samplers, schedule, targets


def _load_target(spec: dict) -> targets.GaussianMixtureTarget:
    if "ring" in spec:
        ring = spec["ring"]
        return targets.ring_mixture(
            int(ring["num_modes"]), float(ring["r"]), float(ring["precision"])
        )
    return targets.GaussianMixtureTarget.from_json(spec)


def _load_grid(spec: dict) -> schedule.ThetaGrid:
    if "steps" in spec:
        return schedule.ThetaGrid.from_steps(np.asarray(spec["steps"], dtype=float))
    return schedule.grid_from_quadratic_steps(
        int(spec["M"]), float(spec["s_min"]), float(spec["s_max"])
    )


def _cmd_sample(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    target = _load_target(config["target"])
    sched = schedule.AnnealingSchedule.from_config(config["schedule"])
    grid = _load_grid(config["grid"])
    sched.validate(beta=None)

    root = np.random.SeedSequence(args.seed)
    rng_init, rng_chain = (np.random.default_rng(s) for s in root.spawn(2))

    if sched.eta0 == 1.0:
        inits = target.tilted(sched.lambda0).sample(args.chains, rng_init)
    elif sched.eta0 == 0.0:
        inits = rng_init.standard_normal((args.chains, target.dim)) / np.sqrt(
            sched.lambda0
        )
    else:
        inits, _ = samplers.sample_pi0_batch(
            target, sched.eta0, sched.lambda0, rng_init, args.chains
        )
    finals = samplers.run_almc_batch(target, sched, grid, rng_chain, inits)

    header = "chain," + ",".join(f"dim{j}" for j in range(target.dim))
    lines = [header]
    for idx, row in enumerate(finals):
        lines.append(f"{idx}," + ",".join(repr(float(v)) for v in row))
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {finals.shape[0]} samples to {args.out}")
    return 0


def _read_sample_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        cols = [i for i, name in enumerate(header) if name.startswith("dim")]
        if not cols:  # headerless numeric CSV: every column is a coordinate
            fh.seek(0)
            return np.loadtxt(fh, delimiter=",", ndmin=2)
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return data[:, cols]


def _cmd_kl(args) -> int:
    p = _read_sample_csv(args.p)
    q = _read_sample_csv(args.q)
    print(metrics.knn_kl(p, q, k=args.k))
    return 0


def _cmd_action(args) -> int:
    if args.kind == "mog-bound":
        report = metrics.mog_action_bound(args.beta, args.r, args.d, args.lambda0)
    else:
        if args.S is None:
            sys.exit("--S is required for the heat-curve action")
        mixture = targets.ring_mixture(args.num_modes, args.r, args.beta)
        report = metrics.heat_curve_action(
            mixture,
            args.S,
            mc_samples=args.mc_samples,
            quad_points=args.quad_points,
            rng=np.random.default_rng(args.seed),
        )
    print(f"action={report.value} method={report.method} error={report.error_estimate}")
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config) as fh:
        config = harness.ExperimentConfig.from_json(fh.read())
    if not args.full_scale:
        oversized = [r for r in config.r_values if r > 15]
        if oversized:
            sys.exit(
                f"radii {oversized} need hours of compute; rerun with --full-scale"
            )
    records = harness.run_sweep(config, master_seed=args.seed)
    harness.write_records_csv(records, args.out)
    fits = harness.threshold_fits(records, config)
    harness.write_fit_json(args.fit, fits, master_seed=args.seed)
    failed = sum(r.failed for r in records)
    print(f"wrote {len(records)} records to {args.out} ({failed} failed cells)")
    print(f"wrote fits to {args.fit}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="almc", description="Annealed Langevin sampling toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="run annealed chains to completion")
    p_sample.add_argument("--config", required=True, help="run configuration JSON")
    p_sample.add_argument("--chains", type=int, default=1000)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True, help="output samples CSV")
    p_sample.set_defaults(func=_cmd_sample)

    p_kl = sub.add_parser("kl", help="k-NN divergence between two sample CSVs")
    p_kl.add_argument("--p", required=True)
    p_kl.add_argument("--q", required=True)
    p_kl.add_argument("--k", type=int, default=3)
    p_kl.set_defaults(func=_cmd_kl)

    p_action = sub.add_parser("action", help="action values for measure curves")
    p_action.add_argument("--kind", choices=["mog-bound", "heat"], required=True)
    p_action.add_argument("--beta", type=float, required=True)
    p_action.add_argument("--r", type=float, required=True)
    p_action.add_argument("--d", type=int, required=True)
    p_action.add_argument("--lambda0", type=float, default=5.0)
    p_action.add_argument("--S", type=float, default=None)
    p_action.add_argument("--num-modes", type=int, default=6)
    p_action.add_argument("--mc-samples", type=int, default=10000)
    p_action.add_argument("--quad-points", type=int, default=64)
    p_action.add_argument("--seed", type=int, default=0)
    p_action.set_defaults(func=_cmd_action)

    p_exp = sub.add_parser("experiment", help="run the radius-scaling sweep")
    p_exp.add_argument("--config", required=True)
    p_exp.add_argument("--out", required=True, help="records CSV path")
    p_exp.add_argument("--fit", required=True, help="fit JSON path")
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.add_argument("--full-scale", action="store_true")
    p_exp.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
