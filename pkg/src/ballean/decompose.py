"""Decomposition of homogeneous cellular balleans into direct products.

The construction is inductive on the radius.  Radius-0 balls are enumerated
directly; a radius-``k`` ball is split into its radius-``(k-1)`` blocks, a
transversal containing the current centre is chosen, each block is
decomposed recursively and the block's position in the transversal becomes
coordinate ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .ballcore import Asymorphism, BallStructure, is_chain, preserves_balls, validate
from .cellular import noncellular_witness, path_labels
from .errors import ContractError, InputError
from .product import PointedFamily, build_product_ballean, product_coords, product_index


@dataclass(frozen=True)
class BranchingProfile:
    """Size of the radius-0 balls and the split count at each successive radius."""

    mu: int
    kappas: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kappas", tuple(int(k) for k in self.kappas))

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.mu, *self.kappas)

    def to_json(self) -> dict:
        return {"mu": self.mu, "kappas": list(self.kappas)}


@dataclass(frozen=True)
class HomogeneityViolation:
    condition: str  # "i", "ii", "iv" or "v"
    point: int
    radius: int
    detail: dict = field(default_factory=dict)

    def to_json(self, bs: BallStructure) -> dict:
        return {
            "condition": self.condition,
            "point": bs.support[self.point],
            "radius": bs.radii[self.radius],
            **self.detail,
        }


@dataclass(frozen=True)
class HomogeneityReport:
    ok: bool
    profile: BranchingProfile | None = None
    violation: HomogeneityViolation | None = None

    def to_json(self, bs: BallStructure) -> dict:
        return {
            "ok": self.ok,
            "profile": None if self.profile is None else self.profile.to_json(),
            "violation": None if self.violation is None else self.violation.to_json(bs),
        }


def _check_preconditions(bs: BallStructure) -> None:
    report = validate(bs)
    if not report.ok:
        raise ContractError("structure is not a ballean", {"report": report.to_json(bs)})
    if not is_chain(bs):
        raise ContractError("radii are not linearly ordered in index order")
    top = bs.members[-1]
    if not top.all():
        x = int(np.flatnonzero(~top.all(axis=1))[0])
        raise ContractError(
            f"the top ball around {bs.support[x]!r} is not the whole support",
            {"point": bs.support[x]},
        )


def check_homogeneity(bs: BallStructure) -> HomogeneityReport:
    """Check cellularity, strict nesting and uniform branching; extract the profile.

    Limit-continuity holds vacuously for a finite index set and is not
    checked.  The first violation in condition order is reported.
    """
    _check_preconditions(bs)
    M = bs.members
    m = bs.num_radii

    for a in range(m):
        w = noncellular_witness(bs, a)
        if w is not None:
            return HomogeneityReport(False, violation=HomogeneityViolation("i", w[0], a, {"other": bs.support[w[1]]}))

    sizes = M.sum(axis=2)  # sizes[a, x] = |B(x, a)|
    for a in range(m - 1):
        flat = np.flatnonzero(sizes[a] == sizes[a + 1])
        if flat.size:
            x = int(flat[0])
            return HomogeneityReport(
                False,
                violation=HomogeneityViolation("ii", x, a + 1, {"size": int(sizes[a, x])}),
            )

    mu = int(sizes[0, 0])
    flat = np.flatnonzero(sizes[0] != mu)
    if flat.size:
        x = int(flat[0])
        return HomogeneityReport(
            False,
            violation=HomogeneityViolation("iv", x, 0, {"expected": mu, "found": int(sizes[0, x])}),
        )

    kappas = []
    for a in range(m - 1):
        labels = path_labels(bs, a)
        counts = [len(np.unique(labels[M[a + 1, x]])) for x in range(bs.size)]
        kappa = counts[0]
        for x, c in enumerate(counts):
            if c != kappa:
                return HomogeneityReport(
                    False,
                    violation=HomogeneityViolation("v", x, a, {"expected": kappa, "found": c}),
                )
        kappas.append(kappa)
    return HomogeneityReport(True, profile=BranchingProfile(mu, tuple(kappas)))


def canonical_block_order(blocks: Iterable[Iterable[int]], x0: int) -> tuple[list[list[int]], list[int]]:
    """Order blocks with ``x0``'s block first, the rest by smallest member.

    Returns the ordered blocks (members sorted) and their representatives:
    ``x0`` for its own block, the smallest member otherwise.
    """
    ordered = sorted(sorted(b) for b in blocks)
    home = [b for b in ordered if x0 in b]
    if not home:
        raise ContractError(f"point {x0} is not covered by the blocks")
    rest = [b for b in ordered if x0 not in b]
    return [home[0], *rest], [x0, *(b[0] for b in rest)]


def _assign(bs: BallStructure, labels: np.ndarray, centre: int, level: int, out: dict[int, list[int]]) -> None:
    """Fill ``out[x]`` with coordinates ``0..level`` for every ``x`` in ``B(centre, level)``."""
    ball = np.flatnonzero(bs.members[level, centre])
    if level == 0:
        _, reps = canonical_block_order([[int(x)] for x in ball], centre)
        for k, x in enumerate(reps):
            out[x] = [k]
        return
    sub = labels[level - 1]
    groups: dict[int, list[int]] = {}
    for x in ball.tolist():
        groups.setdefault(int(sub[x]), []).append(x)
    _, reps = canonical_block_order(groups.values(), centre)
    for k, y in enumerate(reps):
        _assign(bs, labels, y, level - 1, out)
        for x in groups[int(sub[y])]:
            out[x].append(k)


def decompose(bs: BallStructure, x0: int = 0) -> tuple[PointedFamily, Asymorphism]:
    """Factor a homogeneous cellular ballean as a direct product.

    Returns the pointed family (factor sizes ``mu, kappa_0, ...``, basepoints
    0) and a map onto ``build_product_ballean(family)`` with identity radius
    bounds that carries every ball exactly onto a ball of the same radius and
    sends ``x0`` to the all-basepoints tuple.
    """
    x0 = bs.check_point(x0)
    report = check_homogeneity(bs)
    if not report.ok:
        v = report.violation
        raise ContractError(
            f"condition ({v.condition}) fails at point {bs.support[v.point]!r}, radius {bs.radii[v.radius]!r}",
            {"report": report.to_json(bs)},
        )
    family = PointedFamily.from_sizes(report.profile.sizes)
    labels = np.stack([path_labels(bs, a) for a in range(bs.num_radii)])
    coords: dict[int, list[int]] = {}
    _assign(bs, labels, x0, bs.num_radii - 1, coords)
    forward = tuple(product_index(family, coords[x]) for x in range(bs.size))
    ids = tuple(range(bs.num_radii))
    return family, Asymorphism(forward, ids, ids)


def decomposition_coords(family: PointedFamily, a: Asymorphism) -> list[tuple[int, ...]]:
    return [product_coords(family, i) for i in a.forward]


def verify_decomposition(bs: BallStructure, family: PointedFamily, a: Asymorphism) -> bool:
    """Exact ball-image equality against the product ballean of ``family``."""
    return preserves_balls(bs, build_product_ballean(family, max_support=max(bs.size, 1)), a.forward)


def profile_from_sizes(sizes: Sequence[int]) -> BranchingProfile:
    if not sizes:
        raise InputError("a profile needs at least the radius-0 size")
    return BranchingProfile(int(sizes[0]), tuple(sizes[1:]))
