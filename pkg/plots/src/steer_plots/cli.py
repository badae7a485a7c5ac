import argparse
import sys

from .figures import SchemaError, plot_heatmap, plot_scaling, plot_target_layers


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render figures from experiment CSVs."
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("scaling", help="log-log error vs t with guide slopes")
    p.add_argument("--in", dest="inputs", nargs=1, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("heatmap",
                       help="best-error ratio of two sweeps per (t, layers)")
    p.add_argument("--in", dest="inputs", nargs=2, required=True,
                   metavar=("CSV_A", "CSV_B"))
    p.add_argument("--out", required=True)
    p.add_argument("--mask-above", type=float, default=0.9,
                   help="mask cells whose best error exceeds this (default 0.9)")

    p = sub.add_parser("target-layers",
                       help="layers-to-target vs size with power-law fits")
    p.add_argument("--in", dest="inputs", nargs=1, required=True)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.kind == "scaling":
            plot_scaling(args.inputs[0], args.out)
        elif args.kind == "heatmap":
            plot_heatmap(args.inputs[0], args.inputs[1], args.out,
                         mask_above=args.mask_above)
        else:
            plot_target_layers(args.inputs[0], args.out)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - single CLI failure funnel
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
