"""Command-line front end.

Every command prints one canonical JSON document (sorted keys) on stdout and
human-readable diagnostics on stderr.  Exit codes: 0 ok, 1 contract error,
2 input error, 3 resource error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .ballcore import BallStructure, dedup_radii, preserves_balls, validate, verify_asymorphism
from .cellular import cellularization, partition_at
from .decompose import decompose, decomposition_coords
from .errors import BalleanError, ContractError, InputError, ResourceError
from .groupball import SubgroupChain, asymorphism_between, chain_profile, group_ballean, truncated_locally_finite
from .metrics import FiniteMetricSpace, metric_ballean, random_ultrametric, ultrametrize
from .product import DEFAULT_MAX_SUPPORT, PointedFamily, build_product_ballean

EXIT_CODES = {"ok": 0, "contract-error": 1, "input-error": 2, "resource-error": 3}


@dataclass
class CommandResult:
    status: str
    payload: dict
    diagnostics: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def read_document(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            {"line": exc.lineno, "column": exc.colno},
        ) from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top-level JSON value must be an object")
    return doc


def structure_from_document(doc: dict, max_support: int) -> BallStructure:
    """Accept a ball structure, metric space, pointed family or subgroup chain document."""
    if "balls" in doc:
        size = len(doc.get("support") or ())
        if size > max_support:
            raise ResourceError(f"support of {size} points exceeds the bound {max_support}")
        return BallStructure.from_json(doc)
    if "dist" in doc:
        ms = FiniteMetricSpace.from_json(doc)
        if ms.size > max_support:
            raise ResourceError(f"support of {ms.size} points exceeds the bound {max_support}")
        return metric_ballean(ms)
    if "factors" in doc:
        return build_product_ballean(PointedFamily.from_json(doc), max_support=max_support)
    if "table" in doc:
        sc = SubgroupChain.from_json(doc)
        if sc.group.order > max_support:
            raise ResourceError(f"group of order {sc.group.order} exceeds the bound {max_support}")
        return group_ballean(sc)
    raise InputError("unrecognized document: expected a ball structure, metric space, family or group")


def _load(path: str, args) -> BallStructure:
    return structure_from_document(read_document(path), args.max_support)


def cmd_validate(args) -> CommandResult:
    bs = _load(args.path, args)
    report = validate(bs)
    diags = [
        f"{v.axiom} fails at radii {[bs.radii[a] for a in v.radii]}: point {bs.support[v.point]!r}, "
        f"other {bs.support[v.other]!r}"
        for v in report.counterexamples
    ]
    return CommandResult("ok" if report.ok else "contract-error", report.to_json(bs), diags)


def cmd_cellularize(args) -> CommandResult:
    return CommandResult("ok", cellularization(_load(args.path, args)).to_json())


def cmd_partition(args) -> CommandResult:
    bs = _load(args.path, args)
    radii = [bs.radius_index(args.radius)] if args.radius is not None else range(bs.num_radii)
    out = {bs.radii[a]: [[bs.support[x] for x in block] for block in partition_at(bs, a)] for a in radii}
    return CommandResult("ok", {"partitions": out})


def cmd_ultrametrize(args) -> CommandResult:
    bs = _load(args.path, args)
    ms, radius_map = ultrametrize(bs)
    return CommandResult(
        "ok",
        {"space": ms.to_json(), "radius_map": {bs.radii[a]: str(v) for a, v in radius_map.items()}},
    )


def cmd_decompose(args) -> CommandResult:
    bs = _load(args.path, args)
    if args.dedup_radii:
        bs = dedup_radii(bs)
    x0 = bs.point_index(args.basepoint) if args.basepoint is not None else 0
    family, asym = decompose(bs, x0)
    target = build_product_ballean(family, max_support=max(args.max_support, bs.size))
    if not (verify_asymorphism(bs, target, asym) and preserves_balls(bs, target, asym.forward)):
        raise ContractError("constructed map failed re-verification")
    coords = decomposition_coords(family, asym)
    sizes = family.sizes
    payload = {
        "profile": {"mu": sizes[0], "kappas": list(sizes[1:])},
        "factors": family.to_json()["factors"],
        "map": {bs.support[x]: list(c) for x, c in enumerate(coords)},
    }
    return CommandResult("ok", payload, [f"basepoint {bs.support[x0]!r}; verified {bs.size} points"])


def cmd_asymorph(args) -> CommandResult:
    scG = SubgroupChain.from_json(read_document(args.path_g))
    scH = SubgroupChain.from_json(read_document(args.path_h))
    for sc in (scG, scH):
        if sc.group.order > args.max_support:
            raise ResourceError(f"group of order {sc.group.order} exceeds the bound {args.max_support}")
    asym = asymorphism_between(scG, scH)
    bG, bH = group_ballean(scG), group_ballean(scH)
    check = verify_asymorphism(bG, bH, asym)
    payload = {
        "profile": chain_profile(scG).to_json(),
        "map": {bG.support[x]: bH.support[y] for x, y in enumerate(asym.forward)},
        "forward_bound": {bG.radii[a]: bH.radii[b] for a, b in enumerate(asym.forward_bound)},
        "backward_bound": {bH.radii[a]: bG.radii[b] for a, b in enumerate(asym.backward_bound)},
        "verified": check.ok,
    }
    return CommandResult("ok" if check.ok else "contract-error", payload)


def cmd_gen_ultrametric(args) -> CommandResult:
    return CommandResult("ok", random_ultrametric(args.seed, args.points, args.depth).to_json())


def cmd_gen_chain(args) -> CommandResult:
    return CommandResult("ok", truncated_locally_finite(args.seed, args.levels).to_json())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ballean", description="Finite balleans: axioms, cells, decompositions.")
    parser.add_argument("--max-support", type=int, default=DEFAULT_MAX_SUPPORT, help="largest support accepted")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the ballean axioms")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cellularize", help="replace balls by their path closures")
    p.add_argument("path")
    p.set_defaults(func=cmd_cellularize)

    p = sub.add_parser("partition", help="blocks of a cellular structure per radius")
    p.add_argument("path")
    p.add_argument("--radius", help="only this radius (by name)")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("ultrametrize", help="ultrametric inducing a cellular chain of partitions")
    p.add_argument("path")
    p.set_defaults(func=cmd_ultrametrize)

    p = sub.add_parser("decompose", help="factor a homogeneous cellular ballean as a direct product")
    p.add_argument("path")
    p.add_argument("--basepoint", help="point sent to the all-basepoints tuple (default: first point)")
    p.add_argument("--dedup-radii", action="store_true", help="drop radii repeating an earlier ball map")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("asymorph", help="asymorphism between two group chains with equal profiles")
    p.add_argument("path_g")
    p.add_argument("path_h")
    p.set_defaults(func=cmd_asymorph)

    p = sub.add_parser("gen-ultrametric", help="random ultrametric space")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--depth", type=int, default=3)
    p.set_defaults(func=cmd_gen_ultrametric)

    p = sub.add_parser("gen-chain", help="random subgroup chain in a small abelian group")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--levels", type=int, default=3)
    p.set_defaults(func=cmd_gen_chain)
    return parser


def run(argv: list[str] | None = None) -> CommandResult:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BalleanError as exc:
        return CommandResult(exc.status, {"error": {"status": exc.status, "message": exc.message, **exc.details}}, [exc.message])


def main(argv: list[str] | None = None) -> int:
    result = run(argv)
    sys.stdout.write(canonical_json(result.payload))
    for line in result.diagnostics:
        print(line, file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
