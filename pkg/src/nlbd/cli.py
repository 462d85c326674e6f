"""Command-line front end for box files, distillation, search, and scans.

Verbs: validate, value, distill, search, scan, tables, equiv. All numeric
output is printed to 12 significant digits and is deterministic for a given
argument vector; the thread count never changes printed numbers, only wall
time. Exit codes: 0 success (validate: box valid), 1 invalid box or a
computation that reports failure, 2 usage errors, 3 file errors, 4 exceeded
enumeration budgets. Error messages go to stderr.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from collections.abc import Sequence

from .boxes import chsh_value_of_box, validate_box
from .equivalence import build_equivalent_boxes
from .errors import (
    ArityMismatch,
    BudgetExceeded,
    FormatError,
    NlbdError,
    UnknownKind,
)
from .fileio import (
    format_box_matrix,
    format_protocol,
    format_xor_box,
    parse_protocol,
    read_box_file,
    write_box_file,
)
from .search import (
    adaptive_search_max,
    enumerate_nonadaptive_max,
    format_table_report,
    region_scan,
    reproduce_tables,
)
from .wirings import (
    AdaptiveTwoCopyProtocol,
    NonAdaptiveProtocol,
    apply_adaptive,
    apply_nonadaptive,
    bs_wiring,
    or_protocol,
    parity_protocol,
)
from .xorboxes import MultipartiteXorBox, xor_value

_CORRELATOR_FIELDS = ("alpha", "beta", "gamma", "omega", "d1", "d2", "d3", "eps")


class _CliError(Exception):
    """A failure with a chosen exit code; the message goes to stderr."""

    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _fmt(value: float) -> str:
    if value == 0.0:  # normalize -0.0
        value = 0.0
    return f"{value:.12g}"


def _load_box(path: str):
    try:
        return read_box_file(path)
    except OSError as err:
        raise _CliError(3, f"{path}: {err.strerror or err}") from err
    except FormatError as err:
        raise _CliError(3, f"{path}: {err}") from err


def _resolve_threads(option: int | None) -> int:
    if option is not None:
        if option < 1:
            raise _CliError(2, f"--threads must be >= 1, got {option}")
        return option
    raw = os.environ.get("NLBD_THREADS")
    if raw is None or not raw.strip():
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise _CliError(2, f"NLBD_THREADS={raw!r} is not an integer") from None
    if value < 1:
        raise _CliError(2, f"NLBD_THREADS must be >= 1, got {value}")
    return value


def _parse_axis(option: str, text: str):
    """Parse VALUE or START:STOP:STEP into a scalar or a 3-tuple."""
    parts = text.split(":")
    values: list[float] | None = None
    if len(parts) in (1, 3):
        try:
            values = [float(p) for p in parts]
        except ValueError:
            values = None
    if values is None or not all(math.isfinite(v) for v in values):
        raise _CliError(2, f"{option} expects VALUE or START:STOP:STEP, got {text!r}")
    return values[0] if len(values) == 1 else tuple(values)


def _emit_box(box, out: str | None) -> None:
    if out is None:
        if isinstance(box, MultipartiteXorBox):
            sys.stdout.write(format_xor_box(box))
        else:
            sys.stdout.write(format_box_matrix(box))
    else:
        try:
            write_box_file(out, box)
        except OSError as err:
            raise _CliError(3, f"{out}: {err.strerror or err}") from err
        print(f"wrote {out}")


def _cmd_validate(args: argparse.Namespace) -> int:
    box = _load_box(args.boxfile)
    if isinstance(box, MultipartiteXorBox):
        # The parser only constructs these with biases in [-1, 1], which is
        # the whole constraint set for this representation.
        print(f"valid xor box: n={box.game.n}, value {_fmt(xor_value(box))}")
        return 0
    report = validate_box(box)
    if report.valid:
        print(f"valid box: CHSH value {_fmt(chsh_value_of_box(box))}")
        return 0
    print("invalid box:")
    for name, magnitude in report.violations:
        if name == "negativity":
            print(f"  negativity: worst entry {_fmt(float(box.p.min()))}")
        else:
            print(f"  {name}: worst deviation {_fmt(magnitude)}")
    return 1


def _cmd_value(args: argparse.Namespace) -> int:
    box = _load_box(args.boxfile)
    if isinstance(box, MultipartiteXorBox):
        print(_fmt(xor_value(box)))
    else:
        print(_fmt(chsh_value_of_box(box)))
    return 0


def _apply_bipartite_protocol(spec: str, boxes: list, m: int):
    if spec == "parity":
        return apply_nonadaptive(boxes, parity_protocol(2, m))
    if spec == "or":
        if m != 2:
            raise _CliError(2, f"the OR protocol takes --copies 2, got {m}")
        return apply_nonadaptive(boxes, or_protocol())
    if spec.startswith("adaptive:"):
        if m != 2:
            raise _CliError(2, f"adaptive protocols take --copies 2, got {m}")
        digits = spec[len("adaptive:") :]
        try:
            proto = parse_protocol(f"proto=adaptive2;tables={digits}")
        except FormatError as err:
            raise _CliError(2, f"bad adaptive protocol {digits!r}: {err}") from err
        return apply_adaptive(boxes[0], boxes[1], proto)
    raise _CliError(2, f"unknown protocol {spec!r}: expected parity, or, adaptive:<hex>")


def _cmd_distill(args: argparse.Namespace) -> int:
    if args.copies < 1:
        raise _CliError(2, f"--copies must be >= 1, got {args.copies}")
    boxes = [_load_box(p) for p in args.boxfile]
    xor_like = [isinstance(b, MultipartiteXorBox) for b in boxes]
    if any(xor_like):
        if not all(xor_like) or len(boxes) != 1:
            raise _CliError(2, "xor distillation takes exactly one xor box file")
        if args.protocol != "parity":
            raise _CliError(2, "only the parity protocol applies to xor box files")
        box = boxes[0]
        distilled = MultipartiteXorBox(box.game, tuple(d**args.copies for d in box.delta))
        value = xor_value(distilled)
    else:
        if args.copies > 10:
            raise _CliError(
                4, f"--copies {args.copies} exceeds the exact enumeration budget (max 10)"
            )
        if len(boxes) == 1:
            boxes = boxes * args.copies
        elif len(boxes) != args.copies:
            raise _CliError(
                2, f"--copies {args.copies} needs 1 or {args.copies} box files, got {len(boxes)}"
            )
        distilled = _apply_bipartite_protocol(args.protocol, boxes, args.copies)
        value = chsh_value_of_box(distilled)
    print(_fmt(value))
    _emit_box(distilled, args.out)
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    box = _load_box(args.boxfile)
    threads = _resolve_threads(args.threads)
    if args.search_class == "adaptive":
        if args.m not in (None, 2):
            raise _CliError(2, "adaptive search is over two copies; omit --m or pass --m 2")
        if isinstance(box, MultipartiteXorBox):
            raise _CliError(2, "adaptive search takes a bipartite box file")
        result = adaptive_search_max(box, threads=threads)
        proto_line = format_protocol(AdaptiveTwoCopyProtocol.decode(result.best_protocol))
    else:
        if args.m is None:
            raise _CliError(2, "nonadaptive search needs --m")
        result = enumerate_nonadaptive_max(
            box,
            args.m,
            input_dependent=args.input_dependent,
            threads=threads,
            exact=args.exact,
        )
        proto_line = format_protocol(
            NonAdaptiveProtocol.decode(result.n, result.m, result.best_protocol)
        )
    print(f"class={result.class_name}")
    print(f"n={result.n}")
    print(f"m={result.m}")
    print(f"protocols_examined={result.protocols_examined}")
    print(f"best_value={_fmt(result.best_value)}")
    print(f"best_protocol={proto_line}")
    if result.best_exact is not None:
        print(f"best_exact={result.best_exact}")
    return 0


def _cmd_scan(args: argparse.Namespace) -> int:
    grid = {
        "alpha": _parse_axis("--alpha", args.alpha),
        "eps": _parse_axis("--eps", args.eps),
        "beta": _parse_axis("--beta", args.beta) if args.beta is not None else None,
        "delta": _parse_axis("--delta", args.delta) if args.delta is not None else 1.0,
    }
    protocols = tuple(label for label in args.protocols.split(",") if label)
    threads = _resolve_threads(args.threads)
    result = region_scan(grid, protocols=protocols, threads=threads)
    if args.out == "-":
        result.write_csv(sys.stdout)
    else:
        try:
            with open(args.out, "w", encoding="utf-8") as stream:
                result.write_csv(stream)
        except OSError as err:
            raise _CliError(3, f"{args.out}: {err.strerror or err}") from err
        print(f"wrote {len(result)} rows to {args.out}")
    return 0


def _cmd_tables(args: argparse.Namespace) -> int:
    report = reproduce_tables(args.which, audit_adaptive=args.audit)
    print(format_table_report(report))
    return 0


def _cmd_equiv(args: argparse.Namespace) -> int:
    if args.proto is None:
        proto = bs_wiring()
    else:
        parsed = parse_protocol(f"proto=adaptive2;tables={args.proto}")
        assert isinstance(parsed, AdaptiveTwoCopyProtocol)
        proto = parsed
    result = build_equivalent_boxes(proto)
    print(format_protocol(proto))
    fact = result.factorization
    for row, label in enumerate(("00", "01", "10", "11")):
        coeffs = ",".join(_fmt(c) for c in fact.targets[row].coeffs)
        factors = ";".join(f"{_fmt(f.c1)},{_fmt(f.c0)}" for f in fact.entries[row])
        print(f"target{label}={coeffs}")
        print(f"factors{label}={factors}")
    for i, label in enumerate(("box1", "box2")):
        form = result.boxes[i].correlator_form(args.delta)
        fields = " ".join(f"{name}={_fmt(getattr(form, name))}" for name in _CORRELATOR_FIELDS)
        print(f"{label}: {fields}")
    print(f"certificate_max_deviation={_fmt(result.certificate.max_deviation)}")
    print(f"certificate_p00_deviation={_fmt(result.certificate.p00_deviation)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlbd",
        description="Validate, evaluate, distill, and search nonlocal boxes.",
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    p = sub.add_parser("validate", help="check a box file against the box constraints")
    p.add_argument("boxfile")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("value", help="print the CHSH or XOR-game value of a box file")
    p.add_argument("boxfile")
    p.set_defaults(handler=_cmd_value)

    p = sub.add_parser("distill", help="apply a distillation protocol, print the value")
    p.add_argument("--protocol", required=True, help="parity, or, or adaptive:<hex>")
    p.add_argument("--copies", type=int, required=True, metavar="M")
    p.add_argument("--out", help="write the distilled box here (default: stdout)")
    p.add_argument("boxfile", nargs="+", help="one file (copied M times) or M files")
    p.set_defaults(handler=_cmd_distill)

    p = sub.add_parser("search", help="exact maximum of a protocol class on a box")
    p.add_argument(
        "--class",
        dest="search_class",
        required=True,
        choices=("nonadaptive", "adaptive"),
    )
    p.add_argument("--m", type=int, help="number of copies (nonadaptive classes)")
    p.add_argument(
        "--input-dependent",
        action="store_true",
        help="let each player's table depend on their input",
    )
    p.add_argument("--exact", action="store_true", help="certify in rational arithmetic")
    p.add_argument("--threads", type=int, help="worker threads (default: NLBD_THREADS or 1)")
    p.add_argument("boxfile")
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("scan", help="sweep the symmetric box family, write a CSV")
    p.add_argument("--alpha", required=True, metavar="A[:B:STEP]")
    p.add_argument("--eps", required=True, metavar="A[:B:STEP]")
    p.add_argument("--beta", metavar="A[:B:STEP]", help="default: track alpha")
    p.add_argument("--delta", metavar="A[:B:STEP]", help="default: 1")
    p.add_argument(
        "--protocols",
        default="PARITY,OR",
        metavar="LABELS",
        help="comma-separated from PARITY, OR, A (default: PARITY,OR)",
    )
    p.add_argument("--threads", type=int, help="worker threads (default: NLBD_THREADS or 1)")
    p.add_argument("--out", required=True, help="CSV path, or - for stdout")
    p.set_defaults(handler=_cmd_scan)

    p = sub.add_parser("tables", help="reference tables: printed vs recomputed values")
    p.add_argument("--which", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--audit", action="store_true", help="also run the adaptive search per row")
    p.set_defaults(handler=_cmd_tables)

    p = sub.add_parser("equiv", help="rewrite an adaptive wiring as parity over two boxes")
    p.add_argument("--delta", type=float, required=True, help="print the boxes at this bias")
    p.add_argument(
        "--proto",
        metavar="HEX",
        help="six-digit wiring encoding (default: the isotropic-distilling wiring)",
    )
    p.set_defaults(handler=_cmd_equiv)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except _CliError as err:
        print(f"nlbd: {err}", file=sys.stderr)
        return err.code
    except BudgetExceeded as err:
        print(f"nlbd: {err}", file=sys.stderr)
        return 4
    except OSError as err:
        print(f"nlbd: {err}", file=sys.stderr)
        return 3
    except (FormatError, ArityMismatch, UnknownKind) as err:
        print(f"nlbd: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"nlbd: {err}", file=sys.stderr)
        return 2
    except NlbdError as err:
        print(f"nlbd: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
