"""Command-line entry point.

Exit codes are a stable contract: 0 success, 2 input error, 3 weight
error, 64 usage error.  The default weight file comes from the
``NST_WEIGHTS`` environment variable; ``--weights`` overrides it.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import (
    ArgumentError,
    InputError,
    NstError,
    WeightError,
)
from .evaluation import SsimParams, bench_csv, benchmark, evaluate_corpus
from .imageio import read_image, write_png
from .pipeline import (
    DEFAULT_OUTPUT_SIZE,
    Method,
    MethodConfig,
    stylize,
)
from .vgg import decode, encode
from .weights import load_weights

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_WEIGHTS = 3
EXIT_USAGE = 64

METHOD_NAMES = [m.value for m in Method]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ArgumentError(f"--size expects WxH, got {text!r}") from None


def _load_store(args):
    path = args.weights or os.environ.get("NST_WEIGHTS")
    if not path:
        print("no weight file: pass --weights or set NST_WEIGHTS", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    try:
        return load_weights(path)
    except FileNotFoundError:
        print(f"weight file not found: {path}", file=sys.stderr)
        raise SystemExit(EXIT_WEIGHTS)
    except WeightError as e:
        print(f"weight error: {e}", file=sys.stderr)
        raise SystemExit(EXIT_WEIGHTS)


def _read(path):
    try:
        return read_image(path)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _check_alpha(alpha):
    if alpha is not None and not 0.0 <= alpha <= 1.0:
        print(f"--alpha must be in [0, 1], got {alpha}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _collect_images(path: str) -> list[Path]:
    p = Path(path)
    if p.is_dir():
        return sorted(
            q for q in p.iterdir() if q.suffix.lower() in (".png", ".jpg", ".jpeg")
        )
    return [p]


def cmd_stylize(args) -> int:
    _check_alpha(args.alpha)
    store = _load_store(args)
    content = _read(args.content)
    style = _read(args.style)
    cfg = MethodConfig(
        method=Method.from_name(args.method),
        alpha=args.alpha,
        output_size=args.size,
    )
    try:
        out = stylize(content, style, cfg, store)
    except WeightError as e:
        print(f"weight error: {e}", file=sys.stderr)
        return EXIT_WEIGHTS
    write_png(args.out, out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    store = _load_store(args)
    contents = _collect_images(args.content)
    styles = _collect_images(args.style)
    if not contents or not styles:
        print("empty corpus directory", file=sys.stderr)
        return EXIT_INPUT
    n = min(len(contents), len(styles))
    pairs = [(_read(c), _read(s)) for c, s in zip(contents[:n], styles[:n])]
    try:
        report = evaluate_corpus(
            [Method.from_name(m) for m in args.methods.split(",")],
            pairs,
            store,
            output_size=args.size,
            params=SsimParams(),
            jobs=args.jobs,
            corpus=f"{args.content}|{args.style}",
        )
    except WeightError as e:
        print(f"weight error: {e}", file=sys.stderr)
        return EXIT_WEIGHTS
    csv_text = report.to_csv()
    if args.report:
        Path(args.report).write_text(csv_text, encoding="utf-8", newline="")
    sys.stdout.write(report.render_text())
    return EXIT_OK


def cmd_bench(args) -> int:
    store = _load_store(args)
    content = _read(args.content)
    style = _read(args.style)
    methods = METHOD_NAMES if args.method == "all" else [args.method]
    reports = []
    for name in methods:
        method = Method.from_name(name)
        cfg = MethodConfig(method=method, output_size=args.size)
        try:
            reports.append(
                benchmark(method, cfg, [(content, style)], args.reps, weights=store)
            )
        except WeightError as e:
            print(f"weight error: {e}", file=sys.stderr)
            return EXIT_WEIGHTS
    csv_text = bench_csv(reports)
    if args.report:
        Path(args.report).write_text(csv_text, encoding="utf-8", newline="")
    sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    store = _load_store(args)
    img = _read(args.content)
    from .imageio import resize_image
    from .pipeline import working_size

    ww, wh = working_size(args.size)
    img = resize_image(img, ww, wh)
    try:
        feats, idx = encode(img, args.level, store)
        out = decode(feats, args.level, store)
    except WeightError as e:
        print(f"weight error: {e}", file=sys.stderr)
        return EXIT_WEIGHTS
    write_png(args.out, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nstlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--weights", default=None, help="NSTW weight file")
        p.add_argument("--size", type=_size_arg, default=DEFAULT_OUTPUT_SIZE,
                       help="output size WxH (default 600x450)")

    p = sub.add_parser("stylize", help="stylize one content/style image pair")
    common(p)
    p.add_argument("--method", required=True, choices=METHOD_NAMES)
    p.add_argument("--content", required=True)
    p.add_argument("--style", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(func=cmd_stylize)

    p = sub.add_parser("evaluate", help="run the corpus SSIM/loss report")
    common(p)
    p.add_argument("--content", required=True, help="content image or directory")
    p.add_argument("--style", required=True, help="style image or directory")
    p.add_argument("--methods", default=",".join(METHOD_NAMES))
    p.add_argument("--report", default=None, help="CSV output path")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="time stylization per method")
    common(p)
    p.add_argument("--method", default="all", choices=METHOD_NAMES + ["all"])
    p.add_argument("--content", required=True)
    p.add_argument("--style", required=True)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--report", default=None, help="CSV output path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("reconstruct", help="encode/decode sanity check")
    common(p)
    p.add_argument("--content", required=True)
    p.add_argument("--level", type=int, required=True, choices=[1, 2, 3, 4, 5])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)
    return parser


def _size_arg(text):
    try:
        return _parse_size(text)
    except ArgumentError as e:
        raise argparse.ArgumentTypeError(str(e))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except WeightError as e:
        print(f"weight error: {e}", file=sys.stderr)
        return EXIT_WEIGHTS
    except NstError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
