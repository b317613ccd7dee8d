"""Command-line front end.

Exit codes: 0 compatible / pass / success, 2 incompatible / fail, 1 error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import io
from .cnf import export_cnf
from .errors import PossibleWorldsError
from .hierarchy import DEFAULT_NODE_CAP, enumerate_uniform, order_k_test
from .possibilistic import decide_support, prepare, verify_certificate
from .prob import distance, format_fraction
from .structure import cardinality_bound, normalization_changes, normalize
from .worlds import LatentSpec, simulate

EXIT_OK, EXIT_ERROR, EXIT_NO = 0, 1, 2


class UsageError(Exception):
    pass


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    return int(os.environ.get("PW_THREADS", "1") or 1)


def _changes_json(changes: dict) -> dict:
    return {k: [list(e) if isinstance(e, tuple) else e for e in v] for k, v in changes.items()}


def _emit(text: str, out):
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_normalize(args) -> int:
    g = io.read_structure(args.structure)
    normal = normalize(g)
    _emit(io.dumps(io.structure_to_json(normal)), args.out)
    changes = normalization_changes(g, normal)
    for name, items in changes.items():
        for item in items:
            shown = "->".join(item) if isinstance(item, tuple) else item
            print(f"{name.replace('_', ' ')}: {shown}", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args) -> int:
    g = io.read_structure(args.structure)
    normal, _ = prepare(g)
    rows = []
    for l in normal.latent:
        b = cardinality_bound(normal, l)
        order = list(normal.visible)
        rows.append({
            "latent": l,
            "bound": b.value,
            "district": sorted(b.district, key=order.index),
            "conditioning": sorted(b.conditioning, key=order.index),
            "descendant_part": sorted(b.descendant_part, key=order.index),
            "remainder": sorted(b.remainder, key=order.index),
        })
    sys.stdout.write(io.dumps({"bounds": rows}))
    return EXIT_OK


def cmd_check(args) -> int:
    g = io.read_structure(args.structure)
    sigma = io.support_from_json(io.load_json(args.data))
    if args.cnf:
        # validate before searching so a non-binary input fails fast
        doc = export_cnf(g, sigma)
    verdict = decide_support(g, sigma, threads=_threads(args))
    report = {
        "verdict": "COMPATIBLE" if verdict.compatible else "INCOMPATIBLE",
        "support_size": len(sigma),
        "normalization": _changes_json(verdict.changes),
        "nodes": verdict.nodes,
        "backtracks": verdict.backtracks,
    }
    if verdict.compatible:
        report["certificate_verified"] = verify_certificate(g, verdict.certificate, sigma)
        if args.certificate:
            io.write_text(args.certificate, io.dumps(io.certificate_to_json(verdict.certificate)))
    if args.cnf:
        io.write_text(args.cnf, doc.to_dimacs())
    sys.stdout.write(io.dumps(report))
    return EXIT_OK if verdict.compatible else EXIT_NO


def _certificate_structure(g, doc):
    names = {item.get("name") for item in doc.get("latent_cardinalities", []) if isinstance(item, dict)}
    exogenous = all(not g.graph.parents(l) for l in g.latent)
    if exogenous and names == set(g.latent):
        return g
    return normalize(g)


def cmd_simulate(args) -> int:
    g = io.read_structure(args.structure)
    doc = io.load_json(args.certificate)
    structure = _certificate_structure(g, doc)
    cert = io.certificate_from_json(doc, structure)
    dist = simulate(structure, cert.table, LatentSpec(dict(cert.latent_cards)))
    _emit(io.dumps(io.distribution_to_json(dist)), args.out)
    return EXIT_OK


def _parse_latent_cards(text: str, latents) -> dict[str, int] | int:
    text = text.strip()
    if "=" not in text:
        try:
            return int(text)
        except ValueError:
            raise UsageError(f"bad --latent-cards value {text!r}") from None
    out = {}
    for part in text.split(","):
        name, _, k = part.partition("=")
        try:
            out[name.strip()] = int(k)
        except ValueError:
            raise UsageError(f"bad --latent-cards entry {part!r}") from None
    unknown = set(out) - set(latents)
    if unknown:
        raise UsageError(f"unknown latents in --latent-cards: {sorted(unknown)} (normal form has {list(latents)})")
    return out


def cmd_enumerate(args) -> int:
    g = io.read_structure(args.structure)
    normal, _ = prepare(g)
    cards = _parse_latent_cards(args.latent_cards, normal.latent)
    if isinstance(cards, dict):
        missing = set(normal.latent) - set(cards)
        if missing:
            raise UsageError(f"--latent-cards misses latents {sorted(missing)}")
    if (cards if isinstance(cards, int) else min(cards.values(), default=1)) < 1:
        raise UsageError("latent cardinalities must be >= 1")
    uniform = enumerate_uniform(normal, cards, witnesses=args.witnesses,
                                node_cap=args.node_cap, threads=_threads(args))
    lines = []
    for counts in uniform.members:
        record = io.distribution_to_json(uniform.distribution(counts))
        if args.witnesses:
            record["witness"] = io.certificate_to_json(uniform.certificate(counts))
        lines.append(json.dumps(record, separators=(",", ":")))
    _emit("".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


def cmd_test_order(args) -> int:
    if args.K < 1:
        raise UsageError("-K must be >= 1")
    if args.C is not None and args.C < 1:
        raise UsageError("--C must be >= 1")
    g = io.read_structure(args.structure)
    p = io.distribution_from_json(io.load_json(args.distribution))
    res = order_k_test(g, p, args.K, C=args.C, node_cap=args.node_cap, threads=_threads(args))
    report = {
        "verdict": "PASS" if res.passed else "FAIL",
        "K": res.K,
        "L": res.bound.L,
        "C": res.bound.C,
        "C_override": res.C_override is not None,
        "latent_bounds": res.latent_bounds,
        "epsilon": format_fraction(res.epsilon),
        "min_distance": format_fraction(res.distance),
        "uniform_set_size": res.size,
        "nearest": io.distribution_to_json(res.nearest),
    }
    if res.passed and res.certificate is not None:
        report["certificate"] = io.certificate_to_json(res.certificate)
    sys.stdout.write(io.dumps(report))
    return EXIT_OK if res.passed else EXIT_NO


def cmd_distance(args) -> int:
    p = io.distribution_from_json(io.load_json(args.first))
    q = io.distribution_from_json(io.load_json(args.second))
    if set(p.variables) == set(q.variables) and p.variables != q.variables:
        q = q.reorder(p.variables)
    print(format_fraction(distance(p, q)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="possible-worlds",
        description="Causal compatibility with latent variables via possible-worlds diagrams.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: $PW_THREADS or 1)")
    common.add_argument("--seed", type=int, default=None,
                        help="reserved; the solvers use no randomness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", parents=[common], help="rewrite a structure into normal form")
    p.add_argument("structure")
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("bounds", parents=[common], help="latent cardinality bounds")
    p.add_argument("structure")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("check", parents=[common], help="decide possibilistic compatibility")
    p.add_argument("structure")
    p.add_argument("data", help="support or distribution file")
    p.add_argument("--certificate", help="write the certificate here when compatible")
    p.add_argument("--cnf", help="also write a DIMACS encoding (binary visibles only)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", parents=[common], help="distribution produced by a certificate")
    p.add_argument("structure")
    p.add_argument("certificate")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enumerate", parents=[common], help="list uniformly induced distributions (JSON lines)")
    p.add_argument("structure")
    p.add_argument("--latent-cards", required=True,
                   help="one integer for all latents, or name=k,name=k over the normal form")
    p.add_argument("--witnesses", action="store_true", help="attach a generating table to each record")
    p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("test-order", parents=[common], help="order-K probabilistic compatibility test")
    p.add_argument("structure")
    p.add_argument("distribution")
    p.add_argument("-K", type=int, required=True)
    p.add_argument("--C", type=int, default=None, help="override the latent cardinality cap used in epsilon")
    p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    p.set_defaults(func=cmd_test_order)

    p = sub.add_parser("distance", parents=[common], help="exact L1 distance of two distributions")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_distance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (PossibleWorldsError, UsageError, OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
