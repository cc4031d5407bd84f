"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 input error, 3 capacity error.
Every run prints a JSON report (or its text rendering) that records the
version, seed and inputs; artifacts go to ``--out`` and are written atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Any, Sequence

from . import __version__
from .analysis import (
    extract,
    gate_support_census,
    hierarchy_report,
    reduce_colsub_to_hom,
    reduce_hom_to_colsub,
    scaling_experiment,
)
from .circuit import ABP, Circuit, abp_to_circuit, count_parse_trees, enumerate_parse_trees, metrics
from .decomp import validate
from .errors import CapacityError, ConsistencyError, HomsynthError
from .graphcore import Graph, parse_graph, prune
from .oracle import PolySpec, pit_equal
from .synth import DEFAULT_GATE_CAP, default_gate_cap, synth_abp, synth_circuit
from .widths import pw_delta, tw_delta

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(HomsynthError):
    pass


# --- helpers ------------------------------------------------------------------

def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".homsynth-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_text(path: str, what: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path!r}: {exc.strerror}") from None


def load_graph(arg: str) -> Graph:
    if os.path.isfile(arg):
        return parse_graph(read_text(arg, "graph"))
    return parse_graph(arg)


def load_circuit(path: str) -> tuple[Circuit, bool]:
    """Circuit from a circuit or ABP JSON file; the flag says whether it was an ABP."""
    data = json.loads(read_text(path, "circuit"))
    if "gates" in data:
        return Circuit.from_dict(data), False
    return abp_to_circuit(ABP.from_dict(data)), True


def parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def seed64(text: str) -> int:
    value = int(text, 0)
    if not -(2**63) <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def gate_cap(args) -> int:
    return args.gate_cap if args.gate_cap is not None else default_gate_cap()


def graph_summary(g: Graph) -> dict[str, Any]:
    return {"vertex_count": g.vertex_count, "edges": [list(e) for e in g.edges], "connected": g.is_connected()}


def render_text(data: Any, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for key, val in data.items():
            if isinstance(val, (dict, list)) and val and not all(isinstance(x, (int, str)) for x in val):
                lines.append(f"{pad}{key}:")
                lines.append(render_text(val, indent + 1).rstrip("\n"))
            else:
                lines.append(f"{pad}{key}: {json.dumps(val)}")
    elif isinstance(data, list):
        for item in data:
            lines.append(f"{pad}- " + render_text(item, indent + 1).strip())
    else:
        lines.append(f"{pad}{data}")
    return "\n".join(lines) + "\n"


def emit(args, command: str, inputs: dict[str, Any], result: dict[str, Any], text: str | None = None):
    report = {
        "tool": "homsynth",
        "version": __version__,
        "command": command,
        "seed": args.seed,
        "inputs": inputs,
        "result": result,
    }
    body = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if args.report:
        write_atomic(args.report, body)
    if args.format == "text":
        sys.stdout.write(text if text is not None else render_text(report))
    else:
        sys.stdout.write(body)


def artifact(args, json_text: str, dot_text: str | None, text: str | None = None) -> str | None:
    if not args.out:
        return None
    if args.format == "dot" and dot_text is not None:
        payload = dot_text
    elif args.format == "text" and text is not None:
        payload = text
    else:
        payload = json_text
    write_atomic(args.out, payload)
    return args.out


def circuit_text(c: Circuit) -> str:
    lines = [f"# output g{c.output}"]
    for gid, g in enumerate(c.gates):
        if g.kind == "input":
            lines.append(f"g{gid} = {g.var}")
        elif g.kind == "const":
            lines.append(f"g{gid} = {g.const}")
        else:
            op = " + " if g.kind == "add" else " * "
            lines.append(f"g{gid} = " + op.join(f"g{k}" for k in g.children))
    return "\n".join(lines) + "\n"


# --- subcommands ----------------------------------------------------------------

def cmd_param(args) -> int:
    g = load_graph(args.graph)
    solver = pw_delta if args.decomposition == "path" else tw_delta
    cert = solver(g, args.delta, pruned=args.pruned)
    out = artifact(args, cert.to_json(), None if args.decomposition == "path" else cert.certificate.to_dot())
    result = {"parameter": cert.parameter, "value": cert.value, "certificate": cert.to_dict(), "certificate_path": out}
    text = f"{cert.parameter}(delta={args.delta}) = {cert.value}\n" + (f"certificate: {out}\n" if out else "")
    emit(args, "param", {"graph": graph_summary(g), "delta": args.delta, "pruned": args.pruned,
                         "decomposition": args.decomposition}, result, text)
    return EXIT_OK


def cmd_synth(args) -> int:
    g = load_graph(args.graph)
    inputs = {"graph": graph_summary(g), "n": args.n, "delta": args.delta, "poly": args.poly, "abp": args.abp}
    if args.abp:
        abp, cert = synth_abp(g, args.n, args.delta, args.poly)
        out = artifact(args, abp.to_json(), abp.to_dot())
        c = abp_to_circuit(abp)
        m = metrics(c)
        result = {
            "abp": {"length": abp.length, "size": abp.size, "edges": len(abp.edges), "monotone": abp.is_monotone()},
            "skew_circuit": m.to_dict(),
            "certificate": cert.to_dict(),
            "artifact": out,
        }
    else:
        c, plan = synth_circuit(g, args.n, args.delta, args.poly, gate_cap(args))
        out = artifact(args, c.to_json(), c.to_dot(), circuit_text(c))
        result = plan.report(c)
        result["metrics"] = metrics(c).to_dict()
        result["artifact"] = out
    emit(args, "synth", inputs, result)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = load_graph(args.graph)
    c, was_abp = load_circuit(args.circuit)
    verdict = pit_equal(c, PolySpec(g, args.n, args.poly), args.trials, args.seed)
    result = verdict.to_dict()
    result["abp"] = was_abp
    emit(args, "verify", {"graph": graph_summary(g), "circuit": args.circuit, "n": args.n, "poly": args.poly,
                          "trials": args.trials}, result,
         f"{'equal' if verdict.equal else 'MISMATCH'} after {args.trials} trials (seed {args.seed})\n")
    return EXIT_OK if verdict.equal else EXIT_MISMATCH


def cmd_extract(args) -> int:
    g = load_graph(args.graph)
    c, _ = load_circuit(args.circuit)
    pd = metrics(c).product_depth
    pruned = prune(g)
    total = count_parse_trees(c)
    if total > args.limit:
        raise CapacityError(f"{total} parse trees exceed --limit {args.limit}")
    bad = []
    first = None
    for idx, tree in enumerate(enumerate_parse_trees(c, args.limit)):
        td = extract(c, g, tree).decomposition
        rep = validate(pruned, td)
        if first is None:
            first = td.to_dict()
        if not rep.valid or td.height > max(pd, 1):
            bad.append({"index": idx, "violations": rep.violations, "height": td.height})
    result = {"parse_trees": total, "product_depth": pd, "invalid": bad[:20], "invalid_count": len(bad),
              "first": first}
    emit(args, "extract", {"graph": graph_summary(g), "circuit": args.circuit}, result)
    return EXIT_OK if not bad else EXIT_MISMATCH


def cmd_census(args) -> int:
    g = load_graph(args.graph)
    c, _ = load_circuit(args.circuit)
    rep = gate_support_census(c, g, args.n)
    emit(args, "census", {"graph": graph_summary(g), "circuit": args.circuit, "n": args.n}, rep.to_dict())
    return EXIT_OK if not rep.violations else EXIT_MISMATCH


def cmd_reduce(args) -> int:
    g = load_graph(args.graph)
    c, _ = load_circuit(args.circuit)
    if args.direction == "colsub-to-hom":
        out_c = reduce_colsub_to_hom(c, g, args.diagonal)
    else:
        if args.n is None:
            raise UsageError("--n is required for hom-to-colsub")
        out_c = reduce_hom_to_colsub(c, g, args.n)
    path = artifact(args, out_c.to_json(), out_c.to_dot(), circuit_text(out_c))
    result = {"before": metrics(c).to_dict(), "after": metrics(out_c).to_dict(), "artifact": path}
    emit(args, "reduce", {"graph": graph_summary(g), "circuit": args.circuit, "direction": args.direction,
                          "diagonal": args.diagonal, "n": args.n}, result)
    return EXIT_OK


def cmd_scale(args) -> int:
    g = load_graph(args.graph)
    rep = scaling_experiment(g, args.delta, args.poly, args.n_list, gate_cap(args), name=args.graph)
    emit(args, "scale", {"graph": graph_summary(g), "delta": args.delta, "poly": args.poly,
                         "n_list": args.n_list}, rep.to_dict(), rep.to_text())
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def cmd_hierarchy(args) -> int:
    rep = hierarchy_report(args.d, args.delta, args.n_list, gate_cap(args))
    emit(args, "hierarchy", {"d": args.d, "delta": args.delta, "n_list": args.n_list}, rep.to_dict(), rep.to_text())
    return EXIT_OK


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=seed64, default=0, help="64-bit seed (default 0)")
    common.add_argument("--gate-cap", type=int, default=None,
                        help=f"gate cap (default $HOMSYNTH_GATE_CAP or {DEFAULT_GATE_CAP})")
    common.add_argument("--format", choices=("json", "dot", "text"), default="json")
    common.add_argument("--out", help="artifact path")
    common.add_argument("--report", help="also write the JSON report here")

    p = argparse.ArgumentParser(prog="homsynth", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"homsynth {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("param", parents=[common], help="exact depth-bounded tree/path width")
    s.add_argument("--graph", required=True, help="graph file, inline text or generator like dary:2:3")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--pruned", type=parse_bool, default=False)
    s.add_argument("--decomposition", choices=("tree", "path"), default="tree")
    s.set_defaults(func=cmd_param)

    s = sub.add_parser("synth", parents=[common], help="compile a circuit or ABP")
    s.add_argument("--graph", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--poly", choices=("hom", "colsub"), required=True)
    s.add_argument("--abp", action="store_true")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("verify", parents=[common], help="randomized equality against the oracle")
    s.add_argument("--circuit", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--poly", choices=("hom", "colsub"), required=True)
    s.add_argument("--trials", type=int, default=20)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("extract", parents=[common], help="decompositions from every parse tree")
    s.add_argument("--circuit", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--limit", type=int, default=10**5)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("census", parents=[common], help="per-gate monomial counts")
    s.add_argument("--circuit", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("reduce", parents=[common], help="Hom <-> ColSub circuit reductions")
    s.add_argument("--circuit", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--direction", choices=("colsub-to-hom", "hom-to-colsub"), required=True)
    s.add_argument("--diagonal", choices=("keep", "zero"), default="keep")
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("scale", parents=[common], help="gate count vs n and fitted exponent")
    s.add_argument("--graph", required=True)
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--poly", choices=("hom", "colsub"), required=True)
    s.add_argument("--n-list", type=parse_int_list, default=[4, 8, 16, 32])
    s.set_defaults(func=cmd_scale)

    s = sub.add_parser("hierarchy", parents=[common], help="depth hierarchy on full d-ary trees")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--n-list", type=parse_int_list, default=[2, 3, 4])
    s.set_defaults(func=cmd_hierarchy)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"homsynth: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConsistencyError as exc:
        print(f"homsynth: consistency: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (HomsynthError, ValueError) as exc:
        print(f"homsynth: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
