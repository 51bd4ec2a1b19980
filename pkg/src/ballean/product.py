"""Direct products of pointed finite sets and their ball structures.

Elements of a factor of size ``k`` are ``0..k-1``.  Product points are
coordinate tuples; the support is listed in lexicographic order with
coordinate 0 varying fastest, so ``index = c0 + s0 * (c1 + s1 * (c2 + ...))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ballcore import BallStructure
from .errors import InputError, ResourceError

DEFAULT_MAX_SUPPORT = 4096


@dataclass(frozen=True)
class Factor:
    size: int
    basepoint: int = 0

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 1:
            raise InputError(f"factor size must be a positive integer, got {self.size!r}")
        if not isinstance(self.basepoint, int) or not 0 <= self.basepoint < self.size:
            raise InputError(f"basepoint {self.basepoint!r} is not an element of a factor of size {self.size}")


@dataclass(frozen=True)
class PointedFamily:
    factors: tuple[Factor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InputError("a pointed family needs at least one factor")

    @classmethod
    def from_sizes(cls, sizes: Iterable[int], basepoints: Iterable[int] | None = None) -> PointedFamily:
        sizes = list(sizes)
        bases = list(basepoints) if basepoints is not None else [0] * len(sizes)
        if len(bases) != len(sizes):
            raise InputError("one basepoint per factor is required")
        return cls(tuple(Factor(s, b) for s, b in zip(sizes, bases)))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    @property
    def basepoint(self) -> tuple[int, ...]:
        return tuple(f.basepoint for f in self.factors)

    @property
    def total(self) -> int:
        return prod(self.sizes)

    def __len__(self) -> int:
        return len(self.factors)

    def to_json(self) -> dict:
        return {"factors": [{"size": f.size, "basepoint": f.basepoint} for f in self.factors]}

    @classmethod
    def from_json(cls, doc: Mapping) -> PointedFamily:
        try:
            return cls(tuple(Factor(int(f["size"]), int(f.get("basepoint", 0))) for f in doc["factors"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed pointed family: {exc}") from None


def product_index(pf: PointedFamily, coords: Sequence[int]) -> int:
    if len(coords) != len(pf):
        raise InputError(f"expected {len(pf)} coordinates, got {len(coords)}")
    idx = 0
    for c, s in zip(reversed(coords), reversed(pf.sizes)):
        if not 0 <= c < s:
            raise InputError(f"coordinate {c} out of range for a factor of size {s}")
        idx = idx * s + c
    return idx


def product_coords(pf: PointedFamily, index: int) -> tuple[int, ...]:
    if not 0 <= index < pf.total:
        raise InputError(f"product index {index} out of range")
    coords = []
    for s in pf.sizes:
        index, c = divmod(index, s)
        coords.append(c)
    return tuple(coords)


def point_name(coords: Sequence[int]) -> str:
    return ",".join(map(str, coords))


def _coordinate_table(pf: PointedFamily) -> np.ndarray:
    """``table[i, k]`` is coordinate ``k`` of the ``i``-th product point."""
    idx = np.arange(pf.total)
    cols = []
    for s in pf.sizes:
        idx, c = np.divmod(idx, s)
        cols.append(c)
    return np.stack(cols, axis=1)


def _agreement_fibers(table: np.ndarray, start: int) -> np.ndarray:
    """``same[f, g]`` iff ``f`` and ``g`` agree at every coordinate ``>= start``."""
    tail = table[:, start:]
    return (tail[:, None, :] == tail[None, :, :]).all(axis=2)


def build_product_ballean(
    pf: PointedFamily,
    *,
    inclusive: bool = False,
    max_support: int = DEFAULT_MAX_SUPPORT,
) -> BallStructure:
    """Ball structure on the direct product.

    By default ``g`` lies in the radius-``k`` ball of ``f`` iff they agree at
    every coordinate ``> k``: radius-``k`` balls are copies of the product of
    factors ``0..k``, radii are ``0..len(pf)-1`` and the top ball is the whole
    product.  This is the target of ``decompose``.

    With ``inclusive=True`` agreement is required at every coordinate ``>= k``
    and a virtual top radius ``len(pf)`` (no constraint) is appended, so
    radius-0 balls are singletons.  This equals the default structure on the
    family with a singleton factor prepended.
    """
    total = pf.total
    if total > max_support:
        raise ResourceError(f"product has {total} points, above the bound {max_support}")
    table = _coordinate_table(pf)
    gamma = len(pf)
    starts = range(0, gamma + 1) if inclusive else range(1, gamma + 1)
    members = np.stack([_agreement_fibers(table, s) for s in starts])
    support = [point_name(row) for row in table.tolist()]
    return BallStructure(support, [str(k) for k in range(len(members))], members)


def product_partition(pf: PointedFamily, level: int) -> list[list[int]]:
    """Fibres of the projection onto coordinates ``>= level``; ``level == len(pf)`` is one block."""
    if not 0 <= level <= len(pf):
        raise InputError(f"level {level} out of range 0..{len(pf)}")
    table = _coordinate_table(pf)
    blocks: dict[tuple, list[int]] = {}
    for i, row in enumerate(table[:, level:].tolist()):
        blocks.setdefault(tuple(row), []).append(i)
    return sorted(blocks.values())
