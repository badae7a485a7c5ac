"""Command-line entry point: derive error series, run experiment sweeps,
and print layer-depth estimates.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys

from . import experiments, models
from .formulas import depth_estimate, pauli_rotation_depth, suzuki
from .pauli import PauliString
from .series import error_hamiltonian

_FORMULA_ORDERS = {"suzuki1": 1, "suzuki2": 2, "suzuki4": 4}


def _model_from_args(args) -> tuple:
    params = {"rows": args.rows, "cols": args.cols}
    if args.model == "ising":
        params.update(J=args.J, h=args.h)
    elif args.model == "heisenberg":
        params.update(seed=args.seed)
    elif args.model == "hubbard":
        params.update(J=args.J, U=args.U)
    elif args.model == "file":
        if not args.path:
            raise experiments.ConfigError("--path is required for --model file")
        params = {"path": args.path}
    cfg = experiments.ExperimentConfig(
        model_name=args.model,
        model_params=params,
        formula_name=args.formula,
        modes=("standard",),
        t_grid=(1.0,),
        n_layers_grid=(1,),
        n_samples_grid=(1,),
        seed=args.seed,
    )
    return experiments.build_model(cfg)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=["ising", "heisenberg", "hubbard", "file"])
    p.add_argument("--rows", type=int, default=1)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--U", type=float, default=4.0)
    p.add_argument("--path", default=None, help="Hamiltonian file for --model file")
    p.add_argument("--formula", default="suzuki2", choices=sorted(_FORMULA_ORDERS))
    p.add_argument("--seed", type=int, required=True,
                   help="master seed; all randomness flows from it")


def cmd_derive(args) -> int:
    H, partition = _model_from_args(args)
    formula = suzuki(_FORMULA_ORDERS[args.formula], partition, label=args.formula)
    order = args.order if args.order is not None else 2 * formula.order
    e = error_hamiltonian(formula, H, max_order=order)
    powers = e.nonzero_powers()
    if not powers:
        print("error series is identically zero (commuting model)")
        return 0
    for j in powers:
        for s, c in e.omega(j).real_terms():
            print(f"{j} {s.label()} {format(c, '.17g')}")
    return 0


def cmd_run(args) -> int:
    cfg = experiments.ExperimentConfig.from_yaml(args.config)
    if args.out:
        cfg = experiments.ExperimentConfig(
            **{**cfg.__dict__, "output": args.out}
        )
    if not cfg.output:
        raise experiments.ConfigError("no output path: set 'output' in config or pass --out")
    experiments.run_sweep(cfg, threads=args.threads)
    print(f"wrote {cfg.output}")
    return 0


def cmd_depth(args) -> int:
    H, partition = _model_from_args(args)
    formula = suzuki(_FORMULA_ORDERS[args.formula], partition, label=args.formula)
    extra = []
    if args.correction:
        extra = [PauliString.from_label(lbl) for lbl in args.correction]
    d = depth_estimate(formula, extra_paulis=extra)
    print("factor depth")
    for i, fd in enumerate(d["per_layer"]["per_factor"]):
        print(f"{i} {fd}")
    print(f"formula_depth {d['per_layer']['formula_depth']}")
    if extra:
        print(f"correction_depth {d['per_layer']['correction_depth']}")
        for lbl in args.correction:
            w = PauliString.from_label(lbl).weight
            print(f"rotation {lbl} weight {w} depth {pauli_rotation_depth(PauliString.from_label(lbl))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steer",
        description="Trotter error series derivation, randomized correction "
        "sampling experiments, and depth estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_derive = sub.add_parser("derive", help="dump the error series of a formula")
    _add_model_flags(p_derive)
    p_derive.add_argument("--order", type=int, default=None,
                          help="series truncation order (default 2k)")
    p_derive.set_defaults(func=cmd_derive)

    p_run = sub.add_parser("run", help="run an experiment sweep from a YAML config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="override the config's output path")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_depth = sub.add_parser("depth", help="layer-depth estimate for a formula")
    _add_model_flags(p_depth)
    p_depth.add_argument("--correction", nargs="*", default=[],
                         help="Pauli labels of sampled corrections to include")
    p_depth.set_defaults(func=cmd_depth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (experiments.ConfigError, models.ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - single CLI failure funnel
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
