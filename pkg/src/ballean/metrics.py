"""Finite metric spaces with exact rational distances and their balleans."""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

import numpy as np

from .ballcore import Asymorphism, BallStructure, is_chain, is_connected
from .cellular import noncellular_witness
from .errors import ContractError, InputError


def _as_fraction(value) -> Fraction:
    try:
        return Fraction(value) if not isinstance(value, float) else Fraction(str(value))
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"not a rational distance: {value!r}") from None


class FiniteMetricSpace:
    """Points with a symmetric rational distance satisfying the metric axioms."""

    __slots__ = ("points", "dist", "_scale", "_scaled")

    def __init__(self, points: Sequence[str], dist: Sequence[Sequence]):
        points = tuple(str(p) for p in points)
        n = len(points)
        if n == 0:
            raise InputError("a metric space needs at least one point")
        if len(set(points)) != n:
            raise InputError("point names must be unique")
        if len(dist) != n or any(len(row) != n for row in dist):
            raise InputError(f"distance matrix must be {n}x{n}")
        d = tuple(tuple(_as_fraction(v) for v in row) for row in dist)
        self.points = points
        self.dist = d
        # common denominator, so ball tests are exact integer comparisons
        self._scale = lcm(*(v.denominator for row in d for v in row))
        scaled = [[int(v * self._scale) for v in row] for row in d]
        big = max(abs(v) for row in scaled for v in row) >= 1 << 60
        self._scaled = np.array(scaled, dtype=object if big else np.int64)
        self._check()

    def _check(self) -> None:
        D = self._scaled
        n = len(self.points)
        p = self.points
        for x in range(n):
            if D[x, x] != 0:
                raise InputError(f"d({p[x]}, {p[x]}) must be 0")
            for y in range(x + 1, n):
                if D[x, y] != D[y, x]:
                    raise InputError(f"distance is not symmetric at ({p[x]}, {p[y]})")
                if D[x, y] <= 0:
                    raise InputError(f"d({p[x]}, {p[y]}) must be positive")
        # bad[x, z, y]: d(x, y) > d(x, z) + d(z, y)
        bad = D[:, None, :] > D[:, :, None] + D[None, :, :]
        if bad.any():
            x, z, y = map(int, np.argwhere(bad)[0])
            raise InputError(
                f"triangle inequality fails for ({p[x]}, {p[z]}, {p[y]})",
                {"triple": [p[x], p[z], p[y]]},
            )

    @property
    def size(self) -> int:
        return len(self.points)

    def d(self, x: int, y: int) -> Fraction:
        return self.dist[x][y]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.points == other.points and self.dist == other.dist

    def __hash__(self) -> int:
        return hash((self.points, self.dist))

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={self.size})"

    def to_json(self) -> dict:
        return {"points": list(self.points), "dist": [[str(v) for v in row] for row in self.dist]}

    @classmethod
    def from_json(cls, doc: Mapping) -> FiniteMetricSpace:
        try:
            return cls(doc["points"], doc["dist"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"metric space document is missing {exc}") from None


def metric_ballean(ms: FiniteMetricSpace) -> BallStructure:
    """Closed balls at every realized distance."""
    values = sorted({v for row in ms.dist for v in row})
    members = np.stack([ms._scaled <= int(r * ms._scale) for r in values]).astype(bool)
    return BallStructure(ms.points, [str(r) for r in values], members)


def is_ultrametric(ms: FiniteMetricSpace) -> bool:
    D = ms._scaled
    bad = D[:, None, :] > np.maximum(D[:, :, None], D[None, :, :])
    return not bool(bad.any())


def ultrametrize(bs: BallStructure) -> tuple[FiniteMetricSpace, dict[int, Fraction]]:
    """Ultrametric whose balls reproduce the nested partitions of ``bs``.

    ``d(x, y) = 1 + i`` for the least radius index ``i`` whose ball around
    ``x`` contains ``y``.  Returns the space and the map radius index -> the
    distance realizing that radius.
    """
    if not is_chain(bs):
        raise ContractError("radii are not linearly ordered in index order")
    if not is_connected(bs):
        raise ContractError("structure is not connected")
    for a in range(bs.num_radii):
        w = noncellular_witness(bs, a)
        if w is not None:
            raise ContractError(
                f"structure is not cellular at radius {bs.radii[a]!r}",
                {"radius": bs.radii[a], "point": bs.support[w[0]], "other": bs.support[w[1]]},
            )
    M = bs.members
    # index of the first radius containing y in B(x, .)
    first = np.argmax(M, axis=0)
    dist = [[0 if x == y else int(first[x, y]) + 1 for y in range(bs.size)] for x in range(bs.size)]
    radius_map = {a: Fraction(a + 1) for a in range(bs.num_radii)}
    return FiniteMetricSpace(bs.support, dist), radius_map


def ultrametric_asymorphism(
    bs: BallStructure, ms: FiniteMetricSpace, radius_map: Mapping[int, Fraction]
) -> Asymorphism:
    """Identity map with bounds pairing each radius of ``bs`` with a radius of ``metric_ballean(ms)``."""
    values = sorted({v for row in ms.dist for v in row})
    forward = []
    for a in range(bs.num_radii):
        target = radius_map[a]
        forward.append(max(i for i, v in enumerate(values) if v <= target))
    inverse = {v: a for a, v in radius_map.items()}
    backward = [inverse.get(v, 0) if v > 0 else 0 for v in values]
    return Asymorphism(tuple(range(bs.size)), tuple(forward), tuple(backward))


def random_ultrametric(seed, n: int, depth: int) -> FiniteMetricSpace:
    """Ultrametric built by recursive random splitting, deterministic in ``seed``.

    Level values increase strictly; two points are at the value of the
    smallest level whose block contains both.
    """
    if n < 1 or depth < 1:
        raise InputError("need n >= 1 and depth >= 1")
    rng = random.Random(seed)
    levels = []
    value = Fraction(0)
    for _ in range(depth):
        value += Fraction(rng.randint(1, 4), rng.randint(1, 3))
        levels.append(value)
    # block id of each point at levels depth-1 .. 0; top level is one block
    blocks = [[0] * n]
    for _ in range(depth - 1):
        parent = blocks[-1]
        child = [0] * n
        groups: dict[int, list[int]] = {}
        for x, b in enumerate(parent):
            groups.setdefault(b, []).append(x)
        next_id = 0
        for members in groups.values():
            rng.shuffle(members)
            parts = rng.randint(1, min(len(members), 3))
            for i, x in enumerate(members):
                child[x] = next_id + i % parts
            next_id += parts
        blocks.append(child)
    blocks.reverse()  # blocks[k] is the partition at levels[k]
    dist = []
    for x in range(n):
        row = []
        for y in range(n):
            if x == y:
                row.append(Fraction(0))
            else:
                k = next(k for k in range(depth) if blocks[k][x] == blocks[k][y])
                row.append(levels[k])
        dist.append(row)
    return FiniteMetricSpace([f"p{i}" for i in range(n)], dist)
