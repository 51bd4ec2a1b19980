"""Path closure of balls, cellularization and cellularity."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .ballcore import BallStructure, require_ballean
from .errors import ContractError, InputError


def path_labels(bs: BallStructure, a: int) -> np.ndarray:
    """Component label of every point under the symmetrized radius-``a`` step relation.

    Labels are assigned in order of each component's smallest member, so
    label ``k`` is the ``k``-th block in ``partition_at`` order.
    """
    a = bs.check_radius(a)
    step = bs.members[a] | bs.members[a].T
    labels = np.full(bs.size, -1, dtype=np.int64)
    current = 0
    for start in range(bs.size):
        if labels[start] >= 0:
            continue
        labels[start] = current
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(step[u] & (labels < 0)):
                labels[v] = current
                queue.append(int(v))
        current += 1
    return labels


def _closure_matrix(labels: np.ndarray) -> np.ndarray:
    return labels[:, None] == labels[None, :]


def path_ball(bs: BallStructure, x: int, a: int) -> frozenset[int]:
    """Points joined to ``x`` by a finite chain of radius-``a`` steps."""
    x = bs.check_point(x)
    labels = path_labels(bs, a)
    return frozenset(np.flatnonzero(labels == labels[x]).tolist())


@dataclass(frozen=True)
class PathClosure:
    base: BallStructure
    labels: np.ndarray  # shape (m, n)

    @classmethod
    def of(cls, bs: BallStructure) -> PathClosure:
        labels = np.stack([path_labels(bs, a) for a in range(bs.num_radii)])
        labels.flags.writeable = False
        return cls(bs, labels)

    def closed_ball(self, x: int, a: int) -> frozenset[int]:
        x, a = self.base.check_point(x), self.base.check_radius(a)
        row = self.labels[a]
        return frozenset(np.flatnonzero(row == row[x]).tolist())

    def members(self) -> np.ndarray:
        return np.stack([_closure_matrix(row) for row in self.labels])


def cellularization(bs: BallStructure, *, check: bool = True) -> BallStructure:
    """Replace every ball by its path closure; radii and support are kept."""
    if check:
        require_ballean(bs, InputError)
    return BallStructure(bs.support, bs.radii, PathClosure.of(bs).members())


def noncellular_witness(bs: BallStructure, a: int) -> tuple[int, int] | None:
    """First ``(x, y)`` with ``y`` path-connected to ``x`` at radius ``a`` but outside ``B(x, a)``."""
    closed = _closure_matrix(path_labels(bs, a))
    bad = np.argwhere(closed & ~bs.members[a])
    return None if not len(bad) else (int(bad[0, 0]), int(bad[0, 1]))


def is_cellular_at(bs: BallStructure, a: int) -> bool:
    return noncellular_witness(bs, a) is None


def is_cellular(bs: BallStructure) -> bool:
    return all(is_cellular_at(bs, a) for a in range(bs.num_radii))


def partition_at(bs: BallStructure, a: int) -> list[list[int]]:
    """Blocks of the radius-``a`` balls, ordered by smallest member."""
    witness = noncellular_witness(bs, a)
    if witness is not None:
        x, y = witness
        raise ContractError(
            f"radius {bs.radii[a]!r} is not cellular: {bs.support[y]!r} is path-connected "
            f"to {bs.support[x]!r} but outside its ball",
            {"radius": bs.radii[a], "point": bs.support[x], "other": bs.support[y]},
        )
    labels = path_labels(bs, a)
    blocks: list[list[int]] = [[] for _ in range(int(labels.max()) + 1)]
    for x, k in enumerate(labels):
        blocks[k].append(x)
    return blocks
