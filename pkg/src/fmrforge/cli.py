"""``fmrforge`` command-line front end.

Exit codes: 0 success, 1 usage, 2 input/parse/validation error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bundled, report, selftest
from .circuit import CellLibrary, load_library, load_netlist
from .errors import CapExceededError, FmrForgeError
from .faults import compute_fmr, enumerate_faults, estimate_fmr_mc, resolve_cap
from .metrics import CostModel, compare, metrics
from .redundancy import apply_insertion, flatten_hypothetical, identify_redundant_products, plan_insertion
from .twolevel import Cube, minimal_cover, netlist_truth_table, prime_implicants, read_pla, write_pla

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path: str) -> str:
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    # fall back to the bundled data directory (e.g. "fig1a" or "fig1a.json")
    for candidate in (p.name, p.name + ".json", p.stem + ".json"):
        if bundled.has_data(candidate):
            return bundled.data_text(candidate)
    raise FileNotFoundError(f"no such file: {path}")


def _library(path: str | None) -> CellLibrary:
    if path is None:
        return bundled.demo_library()
    p = Path(path)
    if not p.is_file() and p.name in ("demo", "demo.json"):
        return bundled.demo_library()
    return load_library(_read(path))


def _netlist(path: str, lib: CellLibrary):
    return load_netlist(_read(path), lib)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _split(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [t.strip() for t in text.split(",") if t.strip()]


# -- commands ---------------------------------------------------------------


def cmd_fmr(args):
    lib = _library(args.library)
    net = _netlist(args.netlist, lib)
    if args.samples:
        est = estimate_fmr_mc(net, args.samples, args.seed, workers=args.workers)
        return report.render_mc(net.name, est, args.format)
    r = compute_fmr(net, cap=args.cap, workers=args.workers)
    return report.render_fmr(net.name, r, args.format)


def cmd_enumerate(args):
    lib = _library(args.library)
    net = _netlist(args.netlist, lib)
    rows = list(enumerate_faults(net, cap=args.cap))
    return report.render_enumeration(net, rows, args.format)


def cmd_identify(args):
    lib = _library(args.library)
    net = _netlist(args.netlist, lib)
    findings, products = identify_redundant_products(net, args.po, cap=args.cap)
    return report.render_findings(net, findings, products, args.format)


def cmd_insert(args):
    lib = _library(args.library)
    net = _netlist(args.netlist, lib)
    names = _split(args.products)
    if names is None:
        _, products = identify_redundant_products(net, args.po, cap=args.cap)
    else:
        try:
            products = [Cube.parse(p, net.inputs) for p in names]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    plan = plan_insertion(net, products, lib, capacity=args.capacity, output=args.po)
    augmented = apply_insertion(net, plan)
    before = compute_fmr(net, cap=args.cap)
    after = compute_fmr(augmented, cap=args.cap)
    if args.out:
        Path(args.out).write_text(augmented.to_json(), encoding="utf-8")
    if args.format == "json":
        return report.dumps(
            {
                "products": [p.render(net.inputs) for p in products],
                "new_gates": [g.id for g in plan.new_gates],
                "before": before.to_document(),
                "after": after.to_document(),
                "netlist": augmented.to_document(),
            }
        )
    lines = [
        "products: " + (", ".join(p.render(net.inputs) for p in products) or "(none)"),
        f"new gates: {len(plan.new_gates)} ({plan.mode})",
        "before: " + report.fmr_summary_line(net.name, before),
        "after:  " + report.fmr_summary_line(augmented.name, after),
    ]
    if not args.out:
        lines += ["", augmented.to_json().rstrip()]
    return "\n".join(lines) + "\n"


def cmd_flatten(args):
    lib = _library(args.library)
    net = _netlist(args.netlist, lib)
    flat = flatten_hypothetical(net, args.po, _split(args.keep) or [])
    r = compute_fmr(flat, cap=args.cap)
    if args.out:
        Path(args.out).write_text(flat.to_json(), encoding="utf-8")
    if args.format == "json":
        return report.dumps({"fmr": r.to_document(), "netlist": flat.to_document()})
    text = report.fmr_summary_line(flat.name, r) + "\n"
    if not args.out:
        text += "\n" + flat.to_json()
    return text


def cmd_minimize(args):
    if args.pla:
        tt = read_pla(_read(args.pla))
        out_name = "f"
    elif args.netlist:
        net = _netlist(args.netlist, _library(args.library))
        out_name = args.po or net.outputs[0]
        tt = netlist_truth_table(net, out_name)
    else:
        raise UsageError("minimize needs --pla or --netlist")
    cover = minimal_cover(tt)
    primes = prime_implicants(tt)
    if args.format == "json":
        return report.dumps(
            {
                "inputs": list(tt.names),
                "primes": [p.render(tt.names) for p in primes],
                "cover": [c.render(tt.names) for c in cover],
                "optimal": cover.optimal,
            }
        )
    if args.format == "csv":
        return write_pla(cover, tt.names, out_name)
    return (
        f"{out_name} = {cover.render(tt.names)}\n"
        f"prime implicants: {', '.join(p.render(tt.names) for p in primes)}\n"
        f"optimal: {cover.optimal}\n"
    )


def _cost_model(args) -> CostModel:
    return CostModel(args.cost)


def cmd_metrics(args):
    lib = _library(args.library)
    cm = _cost_model(args)
    entries = []
    for path in args.netlists:
        net = _netlist(path, lib)
        entries.append((net.name, metrics(net, cm), compute_fmr(net, cap=args.cap)))
    return report.render_metrics(entries, args.format)


def cmd_compare(args):
    lib = _library(args.library)
    cm = _cost_model(args)
    a = _netlist(args.a, lib)
    b = _netlist(args.b, lib)
    deltas = compare(
        (metrics(a, cm), compute_fmr(a, cap=args.cap)),
        (metrics(b, cm), compute_fmr(b, cap=args.cap)),
    )
    return report.render_compare(a.name, b.name, deltas, args.format)


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fmrforge", description="Fault masking ratio analysis and redundant logic insertion.")
    p.add_argument("--selftest", action="store_true", help="reproduce the case-study numbers and exit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, netlist=True, fmt="md"):
        if netlist:
            sp.add_argument("--netlist", required=True, help="netlist JSON (or bundled name, e.g. fig1a)")
        sp.add_argument("--library", help="cell library JSON (default: bundled demo library)")
        sp.add_argument("--format", choices=("md", "csv", "json"), default=fmt)
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--cap", type=int, default=None, help="n+m enumeration cap (default 24 or $FMRFORGE_CAP)")

    sp = sub.add_parser("fmr", help="exhaustive or sampled FMR")
    common(sp)
    sp.add_argument("--samples", type=int, default=0, help="Monte Carlo samples instead of enumeration")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_fmr)

    sp = sub.add_parser("enumerate", help="truth-cum-fault enumeration table")
    common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("identify", help="redundant products for 1->0 output errors")
    common(sp)
    sp.add_argument("--po", help="primary output to analyse")
    sp.set_defaults(func=cmd_identify)

    sp = sub.add_parser("insert", help="insert redundant products as a carry-through chain")
    common(sp)
    sp.add_argument("--po")
    sp.add_argument("--products", help='comma-separated cubes, e.g. "AD,BC" (default: identified products)')
    sp.add_argument("--capacity", type=int, default=2, help="products per chain gate")
    sp.add_argument("--out", help="write the augmented netlist JSON here")
    sp.set_defaults(func=cmd_insert)

    sp = sub.add_parser("flatten", help="collapse the output cone into one hypothetical gate")
    common(sp)
    sp.add_argument("--po")
    sp.add_argument("--keep", default="", help="comma-separated internal nodes to keep")
    sp.add_argument("--out", help="write the flattened netlist JSON here")
    sp.set_defaults(func=cmd_flatten)

    sp = sub.add_parser("minimize", help="prime implicants and minimum cover")
    common(sp, netlist=False)
    sp.add_argument("--pla", help="single-output PLA file")
    sp.add_argument("--netlist", help="take the function from a netlist output instead")
    sp.add_argument("--po")
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("metrics", help="design metrics and FMR table")
    common(sp, netlist=False)
    sp.add_argument("netlists", nargs="+")
    sp.add_argument("--cost", choices=("unit", "library"), default="unit")
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("compare", help="metric and FMR deltas from A to B")
    common(sp, netlist=False)
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--cost", choices=("unit", "library"), default="unit")
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code
    if args.selftest:
        return EXIT_OK if selftest.run(sys.stdout) else EXIT_INPUT
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        resolve_cap(args.cap)
        text = args.func(args)
    except UsageError as exc:
        print(f"fmrforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"fmrforge: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FmrForgeError, FileNotFoundError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"fmrforge: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    _emit(text, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
