"""Command-line front end.

Subcommands: synthesize (band spec -> design JSON + netlist), analyze
(netlist -> band metrics, optional Touchstone), sweep (parameter
families -> CSV + summary JSON), pz (resonator pole/zero report) and
check (netlist validation).  Exit codes: 0 success, 1 analysis or
infeasibility error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import mna, netlist, reports, resonator, synthesis

_SUPPRESSION_NOTE = (
    "suppression = min(G_T(f_low), G_T(f_high)) - G_T(f_notch), all in dB; "
    "return loss reported as positive dB"
)


def _value(token: str) -> float:
    try:
        return netlist.parse_value(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _grid(token: str) -> tuple[int, float, float]:
    parts = token.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be <count>,<start>,<stop>")
    try:
        count = int(parts[0])
        start = netlist.parse_value(parts[1])
        stop = netlist.parse_value(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if count < 2 or start <= 0 or stop <= start:
        raise argparse.ArgumentTypeError("grid must satisfy count >= 2, 0 < start < stop")
    return count, start, stop


def _values_list(token: str) -> list[float]:
    if not token.strip():
        raise argparse.ArgumentTypeError("empty value list")
    return [_value(t) for t in token.split(",")]


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dbmatch",
        description="dual-band transformer matching network synthesis and analysis",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("synthesize", help="design a network from band specs")
    ps.add_argument("--fl", type=_value, required=True, help="lower band frequency (Hz)")
    ps.add_argument("--fh", type=_value, required=True, help="upper band frequency (Hz)")
    ps.add_argument("--fsc", type=_value, default=None, help="notch frequency (default geometric mean)")
    ps.add_argument("--ropt", type=_value, required=True, help="source-side match target (ohms)")
    ps.add_argument("--rl", type=_value, required=True, help="load resistance (ohms)")
    ps.add_argument("--cp", type=_value, required=True, help="primary parasitic capacitance (F)")
    ps.add_argument("--cs", type=_value, required=True, help="secondary parasitic capacitance (F)")
    ps.add_argument("--km", type=_value, default=1.0, help="coupling coefficient")
    ps.add_argument("--qxfmr", type=_value, default=None, help="transformer winding Q (default ideal)")
    ps.add_argument("--qt", type=_value, default=None, help="resonator inductor Q (default ideal)")
    ps.add_argument("--lts", default="auto", help="tank inductance (H) or 'auto'")
    ps.add_argument("--ideal", action="store_true", help="force K_m = 1 and infinite Q")
    ps.add_argument("--no-refine", action="store_true", help="skip numerical refinement")
    ps.add_argument("--out", default="design", help="output file prefix")
    ps.add_argument("--grid", type=_grid, default=(2501, 20e9, 45e9), help="netlist sweep grid count,start,stop")
    ps.add_argument("--json", action="store_true", help="print the design JSON to stdout")

    pa = sub.add_parser("analyze", help="sweep a netlist and extract band metrics")
    pa.add_argument("path", help="netlist file")
    pa.add_argument("--fl", type=_value, default=28e9, help="lower band center (Hz)")
    pa.add_argument("--fh", type=_value, default=38e9, help="upper band center (Hz)")
    pa.add_argument("--grid", type=_grid, default=None, help="override the netlist .ac grid")
    pa.add_argument("--touchstone", action="store_true", help="write <out>.s2p")
    pa.add_argument("--out", default=None, help="output file prefix (default: stdout only)")
    pa.add_argument("--json", action="store_true", help="print metrics JSON to stdout (default)")

    pw = sub.add_parser("sweep", help="parameter sweep around a base design")
    pw.add_argument("kind", choices=("cts", "qxfmr", "km", "qt"))
    pw.add_argument("--base", required=True, help="design JSON from `synthesize`")
    pw.add_argument("--values", type=_values_list, required=True, help="comma-separated parameter values")
    pw.add_argument("--km", type=_value, default=None, help="override base coupling before sweeping")
    pw.add_argument("--qxfmr", type=_value, default=None, help="override base transformer Q")
    pw.add_argument("--qt", type=_value, default=None, help="override base resonator Q")
    pw.add_argument("--grid", type=_grid, default=(2501, 20e9, 45e9))
    pw.add_argument("--out", default="sweep", help="output file prefix")

    pz = sub.add_parser("pz", help="resonator pole/zero report")
    pz.add_argument("--base", default=None, help="design JSON (reads its resonator)")
    pz.add_argument("--topology", default="III", choices=("III", "IV"))
    pz.add_argument("--lts", type=_value, default=None)
    pz.add_argument("--cts", type=_value, default=None)
    pz.add_argument("--cts1", type=_value, default=None)

    pc = sub.add_parser("check", help="validate a netlist file")
    pc.add_argument("path")
    pc.add_argument("--json", action="store_true", help="machine-readable result")
    return p


def _apply_overrides(net, km=None, qxfmr=None, qt=None):
    t = net.transformer
    r = net.resonator
    spec = net.spec
    if km is not None:
        t = replace(t, coupling=km)
        spec = replace(spec, k_m=km)
    if qxfmr is not None:
        t = replace(t, q_xfmr=qxfmr)
        spec = replace(spec, q_xfmr=qxfmr)
    if qt is not None:
        r = replace(r, q_t=qt)
        spec = replace(spec, q_t=qt)
    return replace(net, transformer=t, resonator=r, spec=spec)


def cmd_synthesize(args) -> int:
    q_x = math.inf if args.qxfmr is None else args.qxfmr
    q_t = math.inf if args.qt is None else args.qt
    k_m = args.km
    if args.ideal:
        k_m, q_x, q_t = 1.0, math.inf, math.inf
    try:
        spec = synthesis.DesignSpec(
            f_low=args.fl,
            f_high=args.fh,
            f_sc=args.fsc,
            r_opt=args.ropt,
            r_load=args.rl,
            c_par_primary=args.cp,
            c_par_secondary=args.cs,
            k_m=k_m,
            q_xfmr=q_x,
            q_t=q_t,
        )
    except synthesis.SynthesisError as exc:
        # inconsistent flag values are a usage error, unlike infeasibility
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    l_ts = "auto" if args.lts == "auto" else netlist.parse_value(args.lts)
    net = synthesis.synthesize(spec, l_ts=l_ts, do_refine=not args.no_refine)
    for w in net.diagnostics.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    if net.refinement is not None and not net.refinement.converged:
        print(f"warning: refinement {net.refinement.message}", file=sys.stderr)
    doc = synthesis.design_to_json(net)
    Path(f"{args.out}.design.json").write_text(doc)
    cir = netlist.serialize(synthesis.to_netlist(net, grid=args.grid))
    Path(f"{args.out}.cir").write_text(cir)
    if args.json:
        sys.stdout.write(doc)
    else:
        print(f"wrote {args.out}.design.json and {args.out}.cir")
    return 0


def cmd_analyze(args) -> int:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        net = netlist.parse(text)
    except netlist.NetlistError as exc:
        print(f"error: {args.path}: {exc}", file=sys.stderr)
        return 1
    freqs = None
    if args.grid is not None:
        count, start, stop = args.grid
        freqs = np.linspace(start, stop, count)
    resp = mna.sparams(net, freqs)
    metrics = reports.extract_band_metrics(resp, args.fl, args.fh)
    doc = {
        "metrics": metrics.as_dict(),
        "f_low": args.fl,
        "f_high": args.fh,
        "metadata": {"suppression_definition": _SUPPRESSION_NOTE},
    }
    out = _dump_json(doc)
    if args.out:
        Path(f"{args.out}.metrics.json").write_text(out)
        if args.touchstone:
            Path(f"{args.out}.s2p").write_text(reports.touchstone_text(resp))
        if not args.json:
            print(f"wrote {args.out}.metrics.json")
    if args.json or not args.out:
        sys.stdout.write(out)
    return 0


def cmd_sweep(args) -> int:
    base = synthesis.design_from_json(Path(args.base).read_text())
    base = _apply_overrides(base, km=args.km, qxfmr=args.qxfmr, qt=args.qt)
    if not args.values:
        print("error: empty sweep range", file=sys.stderr)
        return 1
    for v in args.values:
        if v <= 0 and args.kind != "cts":
            print(f"error: nonpositive {args.kind} value {v}", file=sys.stderr)
            return 1
        if v < 0:
            print(f"error: negative cts value {v}", file=sys.stderr)
            return 1
    count, start, stop = args.grid
    freqs = np.linspace(start, stop, count)
    columns = []
    summary = {}
    for v in args.values:
        if args.kind == "cts":
            variant = replace(base, resonator=replace(base.resonator, c_ts=v))
        elif args.kind == "qt":
            variant = replace(
                base,
                resonator=replace(base.resonator, q_t=v),
                spec=replace(base.spec, q_t=v),
            )
        elif args.kind == "qxfmr":
            variant = replace(
                base,
                transformer=replace(base.transformer, q_xfmr=v),
                spec=replace(base.spec, q_xfmr=v),
            )
        else:  # km
            variant = replace(
                base,
                transformer=replace(base.transformer, coupling=v),
                spec=replace(base.spec, k_m=v),
            )
        resp = synthesis.frequency_response(variant, freqs)
        gt_db = resp.gt_db()
        label = f"{args.kind}={netlist.render_value(v)}"
        columns.append((label, gt_db))
        metrics = reports.extract_band_metrics(resp, base.spec.f_low, base.spec.f_high)
        full = reports.find_notch(freqs, gt_db, start, stop)
        summary[label] = {
            "band_metrics": metrics.as_dict(),
            "f_notch_full": None if full is None else full[0],
            "notch_db_full": None if full is None else full[1],
        }
    csv_text = reports.sweep_csv_text(freqs, columns)
    Path(f"{args.out}.sweep_{args.kind}.csv").write_text(csv_text)
    doc = {
        "kind": args.kind,
        "curves": summary,
        "metadata": {
            "suppression_definition": _SUPPRESSION_NOTE,
            "values_db": "transducer gain, 10*log10",
        },
    }
    Path(f"{args.out}.sweep_{args.kind}.summary.json").write_text(_dump_json(doc))
    print(f"wrote {args.out}.sweep_{args.kind}.csv and {args.out}.sweep_{args.kind}.summary.json")
    return 0


def cmd_pz(args) -> int:
    if args.base:
        net = synthesis.design_from_json(Path(args.base).read_text())
        spec = net.resonator
    else:
        if None in (args.lts, args.cts, args.cts1):
            print("error: need --base or all of --lts/--cts/--cts1", file=sys.stderr)
            return 2
        spec = resonator.ResonatorSpec(args.topology, args.lts, args.cts, args.cts1)
    report = resonator.poles_zeros(spec)
    doc = {
        "topology": spec.topology,
        "poles_hz": [w / (2.0 * math.pi) for w in report.poles],
        "zeros_hz": [w / (2.0 * math.pi) for w in report.zeros],
        "ordering": report.ordering,
        "degenerate": report.degenerate,
    }
    sys.stdout.write(_dump_json(doc))
    return 0


def cmd_check(args) -> int:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        net = netlist.parse(text)
        mna.stamp(net)  # connectivity and coupling validation
    except (netlist.NetlistError, mna.MnaError) as exc:
        if args.json:
            sys.stdout.write(_dump_json({"ok": False, "error": str(exc)}))
        else:
            print(f"error: {args.path}: {exc}", file=sys.stderr)
        return 1
    summary = {
        "ok": True,
        "title": net.title,
        "elements": len(net.elements),
        "couplings": len(net.couplings),
        "ports": len(net.ports),
        "nodes": len(net.nodes()),
    }
    if args.json:
        sys.stdout.write(_dump_json(summary))
    else:
        print(
            f"OK: {net.title!r}: {summary['elements']} elements, "
            f"{summary['couplings']} couplings, {summary['ports']} ports"
        )
    return 0


_COMMANDS = {
    "synthesize": cmd_synthesize,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "pz": cmd_pz,
    "check": cmd_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (
        synthesis.SynthesisError,
        netlist.NetlistError,
        mna.MnaError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
