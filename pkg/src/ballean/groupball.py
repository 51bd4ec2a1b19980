"""Balleans of finite groups filtered by subgroup chains.

A chain ``G_0 < G_1 < ... < G_{m-1} = G`` gives the ball structure whose
radius-``k`` ball around ``g`` is the left coset ``g G_k``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import prod
from typing import Mapping, Sequence

import numpy as np

from .ballcore import Asymorphism, BallStructure
from .decompose import BranchingProfile, decompose
from .errors import ContractError, InputError


class FiniteGroup:
    """A group given by its Cayley table; element 0 is the identity."""

    __slots__ = ("table",)

    def __init__(self, table):
        arr = np.array(table, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InputError("Cayley table must be a non-empty square matrix")
        if arr.min() < 0 or arr.max() >= arr.shape[0]:
            raise InputError("Cayley table entries must be element indices")
        arr.flags.writeable = False
        self.table = arr

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(np.flatnonzero(self.table[a] == 0)[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


@dataclass(frozen=True)
class GroupCheck:
    ok: bool
    reason: str | None = None
    witness: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_group(g: FiniteGroup) -> GroupCheck:
    """Latin square, two-sided identity at 0, associativity, inverses; first failure wins."""
    T = g.table
    n = g.order
    full = np.arange(n)
    for x in range(n):
        if len(set(T[x].tolist())) != n:
            y = next(y for y in range(n) if list(T[x]).count(T[x, y]) > 1)
            return GroupCheck(False, "latin-row", (x, y))
        if len(set(T[:, x].tolist())) != n:
            y = next(y for y in range(n) if list(T[:, x]).count(T[y, x]) > 1)
            return GroupCheck(False, "latin-column", (y, x))
    if not (np.array_equal(T[0], full) and np.array_equal(T[:, 0], full)):
        x = int(np.flatnonzero((T[0] != full) | (T[:, 0] != full))[0])
        return GroupCheck(False, "identity", (x,))
    # T[T][a, b, c] = (ab)c and T[:, T][a, b, c] = a(bc)
    bad = T[T] != T[:, T]
    if bad.any():
        return GroupCheck(False, "associativity", tuple(int(v) for v in np.argwhere(bad)[0]))
    for x in range(n):
        if not ((T[x] == 0) & (T[:, x] == 0)).any():
            return GroupCheck(False, "inverse", (x,))
    return GroupCheck(True)


def cyclic_group(n: int) -> FiniteGroup:
    i = np.arange(n)
    return FiniteGroup((i[:, None] + i[None, :]) % n)


def abelian_group(orders: Sequence[int]) -> FiniteGroup:
    """Direct sum of cyclic groups, elements in mixed radix with coordinate 0 fastest."""
    coords = _mixed_radix(orders)
    total = len(coords)
    radix = np.cumprod([1, *orders[:-1]]) if orders else np.ones(0, dtype=np.int64)
    summed = (coords[:, None, :] + coords[None, :, :]) % np.asarray(orders, dtype=np.int64)
    table = (summed * radix).sum(axis=2) if orders else np.zeros((total, total), dtype=np.int64)
    return FiniteGroup(table)


def _mixed_radix(orders: Sequence[int]) -> np.ndarray:
    total = prod(orders)
    idx = np.arange(total)
    cols = []
    for s in orders:
        idx, c = np.divmod(idx, s)
        cols.append(c)
    return np.stack(cols, axis=1) if cols else np.zeros((1, 0), dtype=np.int64)


class SubgroupChain:
    """A strictly increasing chain of subgroups ending at the whole group."""

    __slots__ = ("group", "chain")

    def __init__(self, group: FiniteGroup, chain: Sequence[Sequence[int]]):
        check = validate_group(group)
        if not check:
            raise InputError(f"not a group: {check.reason} fails at {list(check.witness)}")
        subgroups = tuple(frozenset(int(v) for v in level) for level in chain)
        if not subgroups:
            raise InputError("a chain needs at least one subgroup")
        n = group.order
        T = group.table
        for k, sub in enumerate(subgroups):
            if any(not 0 <= v < n for v in sub):
                raise InputError(f"chain level {k} names an element outside the group")
            if 0 not in sub:
                raise InputError(f"chain level {k} does not contain the identity")
            members = np.array(sorted(sub))
            products = T[np.ix_(members, members)]
            if not np.isin(products, members).all():
                raise InputError(f"chain level {k} is not closed under the product")
            if any(group.inverse(int(v)) not in sub for v in members):
                raise InputError(f"chain level {k} is not closed under inverses")
            if k and not subgroups[k - 1] < sub:
                raise InputError(f"chain level {k} does not strictly contain level {k - 1}")
        if len(subgroups[-1]) != n:
            raise InputError("the last chain level must be the whole group")
        self.group = group
        self.chain = subgroups

    @property
    def levels(self) -> int:
        return len(self.chain)

    def to_json(self) -> dict:
        return {
            "order": self.group.order,
            "table": self.group.table.tolist(),
            "chain": [sorted(level) for level in self.chain],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> SubgroupChain:
        try:
            order = int(doc["order"])
            table = doc["table"]
            chain = doc["chain"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"group document is missing {exc}") from None
        group = FiniteGroup(table)
        if group.order != order:
            raise InputError(f"declared order {order} does not match the {group.order}x{group.order} table")
        return cls(group, chain)


def group_ballean(sc: SubgroupChain) -> BallStructure:
    """Left cosets ``g G_k`` as the radius-``k`` balls."""
    T = sc.group.table
    n = sc.group.order
    members = np.zeros((sc.levels, n, n), dtype=bool)
    for k, sub in enumerate(sc.chain):
        cols = np.array(sorted(sub))
        rows = np.arange(n)[:, None]
        members[k, rows, T[:, cols]] = True
    return BallStructure([str(i) for i in range(n)], [str(k) for k in range(sc.levels)], members)


def chain_profile(sc: SubgroupChain) -> BranchingProfile:
    sizes = [len(level) for level in sc.chain]
    return BranchingProfile(sizes[0], tuple(b // a for a, b in zip(sizes, sizes[1:])))


def asymorphism_between(scG: SubgroupChain, scH: SubgroupChain) -> Asymorphism:
    """Map ``G`` onto ``H`` through the direct product both chains decompose into."""
    pG, pH = chain_profile(scG), chain_profile(scH)
    if pG != pH:
        raise ContractError(
            "chains have different branching profiles",
            {"profiles": [pG.to_json(), pH.to_json()]},
        )
    _, fG = decompose(group_ballean(scG), 0)
    _, fH = decompose(group_ballean(scH), 0)
    return fG.then(fH.inverse())


def _relabel(group: FiniteGroup, chain: list[list[int]], rng: random.Random) -> tuple[FiniteGroup, list[list[int]]]:
    n = group.order
    rest = list(range(1, n))
    rng.shuffle(rest)
    perm = np.array([0, *rest])
    table = np.empty_like(group.table)
    table[perm[:, None], perm[None, :]] = perm[group.table]
    return FiniteGroup(table), [sorted(int(perm[v]) for v in level) for level in chain]


def chain_with_profile(profile: BranchingProfile, seed) -> SubgroupChain:
    """A chain with the given profile inside a random direct sum of cyclic groups.

    Consecutive steps may share one cyclic factor (``Z_4`` over ``{0, 2}``) or
    a composite step may split into two factors, so equal profiles are
    realized by non-isomorphic groups.  Elements are relabelled at random
    with the identity kept at 0.
    """
    rng = random.Random(seed)
    steps = list(profile.sizes)
    if any(s < 1 for s in steps) or any(s < 2 for s in steps[1:]):
        raise InputError(f"profile {profile.to_json()} cannot be a strict subgroup chain")
    factors: list[list[tuple[int, int]]] = []  # per cyclic factor: (level, step) pairs
    for level, s in enumerate(steps):
        if s == 1:
            continue
        open_factor = factors and factors[-1][-1][0] == level - 1
        divisor = next((d for d in range(2, s) if s % d == 0), None)
        choice = rng.random()
        if open_factor and choice < 0.4:
            factors[-1].append((level, s))
        elif divisor is not None and choice < 0.7:
            factors.append([(level, divisor)])
            factors.append([(level, s // divisor)])
        else:
            factors.append([(level, s)])
    orders = [prod(step for _, step in f) for f in factors]
    group = abelian_group(orders)
    coords = _mixed_radix(orders)
    chain = []
    for level in range(len(steps)):
        mask = np.ones(len(coords), dtype=bool)
        for i, f in enumerate(factors):
            sub_order = prod(step for lv, step in f if lv <= level)
            mask &= coords[:, i] % (orders[i] // sub_order) == 0
        chain.append(np.flatnonzero(mask).tolist())
    group, chain = _relabel(group, chain, rng)
    return SubgroupChain(group, chain)


def truncated_locally_finite(seed, m: int) -> SubgroupChain:
    """An ``m``-level chain of small abelian groups, deterministic in ``seed``."""
    if m < 1:
        raise InputError("need m >= 1")
    rng = random.Random(seed)
    profile = BranchingProfile(rng.randint(1, 4), tuple(rng.randint(2, 4) for _ in range(m - 1)))
    return chain_with_profile(profile, rng.random())
