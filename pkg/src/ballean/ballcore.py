"""Finite ball structures and the ballean axioms.

A ball structure is stored extensionally as a boolean array ``members`` of
shape ``(m, n, n)`` with ``members[a, x, y]`` true iff point ``y`` lies in the
ball of radius ``a`` around ``x``.  Points and radii are addressed by index;
their names only matter for serialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractError, InputError

# entries of a float32 batch product above which subset tests fall back to a loop
_BATCH_LIMIT = 1 << 24


class BallStructure:
    """An immutable finite ball structure ``(X, P, B)``."""

    __slots__ = ("support", "radii", "_members", "_point_index", "_radius_index")

    def __init__(self, support: Sequence[str], radii: Sequence[str], members):
        support = tuple(str(s) for s in support)
        radii = tuple(str(r) for r in radii)
        if not support:
            raise InputError("support must be non-empty")
        if not radii:
            raise InputError("radii must be non-empty")
        if len(set(support)) != len(support):
            raise InputError("support names must be unique")
        if len(set(radii)) != len(radii):
            raise InputError("radius names must be unique")
        arr = np.array(members, dtype=bool)
        n, m = len(support), len(radii)
        if arr.shape != (m, n, n):
            raise InputError(f"ball array has shape {arr.shape}, expected {(m, n, n)}")
        diag = arr[:, np.arange(n), np.arange(n)]
        if not diag.all():
            a, x = map(int, np.argwhere(~diag)[0])
            raise InputError(
                f"point {support[x]!r} is missing from its own ball of radius {radii[a]!r}",
                {"point": support[x], "radius": radii[a]},
            )
        arr.flags.writeable = False
        self.support = support
        self.radii = radii
        self._members = arr
        self._point_index = {s: i for i, s in enumerate(support)}
        self._radius_index = {r: i for i, r in enumerate(radii)}

    @classmethod
    def from_sets(
        cls,
        support: Sequence[str],
        radii: Sequence[str],
        balls: Sequence[Sequence[Iterable[int]]],
    ) -> BallStructure:
        """Build from ``balls[a][x]``, an iterable of member indices."""
        n, m = len(support), len(radii)
        if len(balls) != m or any(len(row) != n for row in balls):
            raise InputError("ball map must be given for every (radius, point) pair")
        arr = np.zeros((m, n, n), dtype=bool)
        for a, row in enumerate(balls):
            for x, members in enumerate(row):
                for y in members:
                    if not 0 <= y < n:
                        raise InputError(f"ball member {y} out of range 0..{n - 1}")
                    arr[a, x, y] = True
        return cls(support, radii, arr)

    @property
    def members(self) -> np.ndarray:
        """Read-only membership array of shape ``(m, n, n)``."""
        return self._members

    @property
    def size(self) -> int:
        return len(self.support)

    @property
    def num_radii(self) -> int:
        return len(self.radii)

    def check_point(self, x: int) -> int:
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.size:
            raise InputError(f"point index {x!r} out of range 0..{self.size - 1}")
        return int(x)

    def check_radius(self, a: int) -> int:
        if not isinstance(a, (int, np.integer)) or not 0 <= a < self.num_radii:
            raise InputError(f"radius index {a!r} out of range 0..{self.num_radii - 1}")
        return int(a)

    def point_index(self, name: str) -> int:
        try:
            return self._point_index[name]
        except KeyError:
            raise InputError(f"unknown point {name!r}") from None

    def radius_index(self, name: str) -> int:
        try:
            return self._radius_index[name]
        except KeyError:
            raise InputError(f"unknown radius {name!r}") from None

    def ball(self, x: int, a: int) -> frozenset[int]:
        x, a = self.check_point(x), self.check_radius(a)
        return frozenset(np.flatnonzero(self._members[a, x]).tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BallStructure):
            return NotImplemented
        return (
            self.support == other.support
            and self.radii == other.radii
            and np.array_equal(self._members, other._members)
        )

    def __hash__(self) -> int:
        return hash((self.support, self.radii, self._members.tobytes()))

    def __repr__(self) -> str:
        return f"BallStructure(n={self.size}, radii={list(self.radii)})"

    def to_json(self) -> dict:
        balls = {
            p: {
                r: [self.support[y] for y in np.flatnonzero(self._members[a, x])]
                for a, r in enumerate(self.radii)
            }
            for x, p in enumerate(self.support)
        }
        return {"support": list(self.support), "radii": list(self.radii), "balls": balls}

    @classmethod
    def from_json(cls, doc: Mapping) -> BallStructure:
        try:
            support = [str(s) for s in doc["support"]]
            radii = [str(r) for r in doc["radii"]]
            balls = doc["balls"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"ball structure document is missing {exc}") from None
        if len(set(support)) != len(support) or len(set(radii)) != len(radii):
            raise InputError("support and radius names must be unique")
        index = {s: i for i, s in enumerate(support)}
        arr = np.zeros((len(radii), len(support), len(support)), dtype=bool)
        for x, p in enumerate(support):
            row = balls.get(p) if isinstance(balls, Mapping) else None
            if not isinstance(row, Mapping):
                raise InputError(f"no balls given for point {p!r}")
            for a, r in enumerate(radii):
                if r not in row:
                    raise InputError(f"no ball given for point {p!r} at radius {r!r}")
                for name in row[r]:
                    if str(name) not in index:
                        raise InputError(f"ball of {p!r} at {r!r} names unknown point {name!r}")
                    arr[a, x, index[str(name)]] = True
        return cls(support, radii, arr)


def dual_ball(bs: BallStructure, x: int, a: int) -> frozenset[int]:
    """Centres whose radius-``a`` ball contains ``x``."""
    x, a = bs.check_point(x), bs.check_radius(a)
    return frozenset(np.flatnonzero(bs.members[a, :, x]).tolist())


def _subset_mask(bs: BallStructure, subset: Iterable[int]) -> np.ndarray:
    mask = np.zeros(bs.size, dtype=bool)
    for y in subset:
        mask[bs.check_point(y)] = True
    return mask


def set_ball(bs: BallStructure, subset: Iterable[int], a: int, *, dual: bool = False) -> frozenset[int]:
    """Union of the radius-``a`` balls (or dual balls) around the members of ``subset``."""
    a = bs.check_radius(a)
    mask = _subset_mask(bs, subset)
    rel = bs.members[a].T if dual else bs.members[a]
    return frozenset(np.flatnonzero(rel[mask].any(axis=0)).tolist())


def not_subset_table(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """``out[i, j]`` is true iff relation ``left[i]`` is not contained in ``right[j]``."""
    p, q = len(left), len(right)
    cells = left[0].size if p else 0
    if (p + q) * cells <= _BATCH_LIMIT:
        lhs = left.reshape(p, -1).astype(np.float32)
        rhs = (~right).reshape(q, -1).astype(np.float32)
        return (lhs @ rhs.T) > 0
    out = np.empty((p, q), dtype=bool)
    for i in range(p):
        out[i] = (left[i] & ~right).reshape(q, -1).any(axis=1)
    return out


def compose_relation(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Boolean relational product: ``y`` reachable by one step of ``first`` then ``second``."""
    return (first.astype(np.float32) @ second.astype(np.float32)) > 0


@dataclass(frozen=True)
class Violation:
    """A concrete axiom failure.

    ``point``/``other`` is the lexicographically first pair at which no single
    candidate radius can accommodate every pair seen so far.
    """

    axiom: str
    radii: tuple[int, ...]
    point: int
    other: int

    def to_json(self, bs: BallStructure) -> dict:
        return {
            "axiom": self.axiom,
            "radii": [bs.radii[a] for a in self.radii],
            "point": bs.support[self.point],
            "other": bs.support[self.other],
        }


@dataclass(frozen=True)
class AxiomReport:
    containment_ok: bool
    symmetry_ok: bool
    composition_ok: bool
    forward_witnesses: tuple[int | None, ...]
    backward_witnesses: tuple[int | None, ...]
    composition_witnesses: tuple[tuple[int | None, ...], ...]
    counterexamples: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return self.containment_ok and self.symmetry_ok and self.composition_ok

    def to_json(self, bs: BallStructure) -> dict:
        def name(a):
            return None if a is None else bs.radii[a]

        return {
            "ok": self.ok,
            "containment_ok": self.containment_ok,
            "symmetry_ok": self.symmetry_ok,
            "composition_ok": self.composition_ok,
            "symmetry_witnesses": {
                "forward": [name(a) for a in self.forward_witnesses],
                "backward": [name(a) for a in self.backward_witnesses],
            },
            "composition_witnesses": [[name(g) for g in row] for row in self.composition_witnesses],
            "counterexamples": [v.to_json(bs) for v in self.counterexamples],
        }


def _first_witness(bad_row: np.ndarray) -> int | None:
    good = np.flatnonzero(~bad_row)
    return int(good[0]) if good.size else None


def _blocking_pair(needed: np.ndarray, allowed: np.ndarray) -> tuple[int, int]:
    """First pair (lex order) of ``needed`` after which no candidate survives.

    ``allowed[x, y, c]`` tells whether candidate ``c`` accommodates pair ``(x, y)``.
    """
    pairs = np.argwhere(needed)
    surviving = np.logical_and.accumulate(allowed[pairs[:, 0], pairs[:, 1]], axis=0)
    k = int(np.flatnonzero(~surviving.any(axis=1))[0])
    return int(pairs[k, 0]), int(pairs[k, 1])


def validate(bs: BallStructure) -> AxiomReport:
    """Exhaustively check containment, symmetry and composition.

    Witnesses are radius indices that work uniformly in ``x``; the smallest
    index is reported.  Nothing is raised for a failed axiom.
    """
    M = bs.members
    m, n = bs.num_radii, bs.size
    counterexamples: list[Violation] = []

    diag = M[:, np.arange(n), np.arange(n)]
    for a, x in np.argwhere(~diag):
        counterexamples.append(Violation("containment", (int(a),), int(x), int(x)))
    containment_ok = bool(diag.all())

    dual = M.transpose(0, 2, 1)
    # B(x, a) within B*(x, a')
    fwd_bad = not_subset_table(M, dual)
    # B*(x, b) within B(x, b')
    bwd_bad = not_subset_table(dual, M)
    fwd = tuple(_first_witness(row) for row in fwd_bad)
    bwd = tuple(_first_witness(row) for row in bwd_bad)
    for a, w in enumerate(fwd):
        if w is None:
            x, y = _blocking_pair(M[a], M.transpose(2, 1, 0))
            counterexamples.append(Violation("symmetry", (a,), x, y))
    for b, w in enumerate(bwd):
        if w is None:
            x, y = _blocking_pair(dual[b], M.transpose(1, 2, 0))
            counterexamples.append(Violation("symmetry-dual", (b,), x, y))

    comp_rows = []
    for a in range(m):
        composed = np.stack([compose_relation(M[a], M[b]) for b in range(m)])
        bad = not_subset_table(composed, M)
        row = tuple(_first_witness(r) for r in bad)
        for b, g in enumerate(row):
            if g is None:
                x, y = _blocking_pair(composed[b], M.transpose(1, 2, 0))
                counterexamples.append(Violation("composition", (a, b), x, y))
        comp_rows.append(row)

    return AxiomReport(
        containment_ok=containment_ok,
        symmetry_ok=None not in fwd and None not in bwd,
        composition_ok=all(None not in row for row in comp_rows),
        forward_witnesses=fwd,
        backward_witnesses=bwd,
        composition_witnesses=tuple(comp_rows),
        counterexamples=tuple(counterexamples),
    )


def preorder_matrix(bs: BallStructure) -> np.ndarray:
    """``leq[a, b]`` iff every radius-``a`` ball lies in the matching radius-``b`` ball."""
    return ~not_subset_table(bs.members, bs.members)


def radii_leq(bs: BallStructure, a: int, b: int) -> bool:
    a, b = bs.check_radius(a), bs.check_radius(b)
    M = bs.members
    return not bool((M[a] & ~M[b]).any())


def cofinality(bs: BallStructure) -> tuple[int, tuple[int, ...]]:
    """Least number of radii dominating every radius, with one such family.

    In a finite preorder a cofinal family must meet every maximal class, and
    one representative per maximal class suffices; the smallest index of each
    class is returned.
    """
    leq = preorder_matrix(bs)
    equiv = leq & leq.T
    maximal = [a for a in range(bs.num_radii) if not (leq[a] & ~leq[:, a]).any()]
    reps = sorted({int(np.flatnonzero(equiv[a])[0]) for a in maximal})
    return len(reps), tuple(reps)


def is_connected(bs: BallStructure) -> bool:
    return bool(bs.members.any(axis=0).all())


def is_chain(bs: BallStructure) -> bool:
    """True iff radii are nested in index order: ``B(x, a) <= B(x, a + 1)``."""
    M = bs.members
    return not bool((M[:-1] & ~M[1:]).any())


def dedup_radii(bs: BallStructure) -> BallStructure:
    """Drop every radius whose ball map repeats an earlier radius."""
    keep: list[int] = []
    for a in range(bs.num_radii):
        if not any(np.array_equal(bs.members[a], bs.members[k]) for k in keep):
            keep.append(a)
    if len(keep) == bs.num_radii:
        return bs
    return BallStructure(bs.support, [bs.radii[a] for a in keep], bs.members[keep])


@dataclass(frozen=True)
class Asymorphism:
    """A bijection between supports with radius bounds in both directions."""

    forward: tuple[int, ...]
    forward_bound: tuple[int, ...]
    backward_bound: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "forward", tuple(int(v) for v in self.forward))
        object.__setattr__(self, "forward_bound", tuple(int(v) for v in self.forward_bound))
        object.__setattr__(self, "backward_bound", tuple(int(v) for v in self.backward_bound))
        if sorted(self.forward) != list(range(len(self.forward))):
            raise InputError("forward map is not a bijection onto 0..n-1")

    @classmethod
    def identity(cls, bs: BallStructure) -> Asymorphism:
        ids = tuple(range(bs.num_radii))
        return cls(tuple(range(bs.size)), ids, ids)

    def inverse(self) -> Asymorphism:
        inv = [0] * len(self.forward)
        for x, y in enumerate(self.forward):
            inv[y] = x
        return Asymorphism(tuple(inv), self.backward_bound, self.forward_bound)

    def then(self, other: Asymorphism) -> Asymorphism:
        """``other`` after ``self``, with composed radius bounds."""
        if len(other.forward) != len(self.forward):
            raise InputError("cannot compose maps between supports of different sizes")
        return Asymorphism(
            tuple(other.forward[y] for y in self.forward),
            tuple(other.forward_bound[b] for b in self.forward_bound),
            tuple(self.backward_bound[b] for b in other.backward_bound),
        )


@dataclass(frozen=True)
class AsymorphismCheck:
    ok: bool
    direction: str | None = None
    point: int | None = None
    radius: int | None = None
    other: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def transport(members: np.ndarray, forward: Sequence[int]) -> np.ndarray:
    """Image of a membership array under a bijection of the support."""
    fwd = np.asarray(forward)
    inv = np.empty_like(fwd)
    inv[fwd] = np.arange(len(fwd))
    return members[:, inv][:, :, inv]


def _check_bounds(name, bound, n_src, n_dst):
    if len(bound) != n_src or any(not 0 <= b < n_dst for b in bound):
        raise InputError(f"{name} must map each of {n_src} radii to an index below {n_dst}")


def verify_asymorphism(src: BallStructure, dst: BallStructure, a: Asymorphism) -> AsymorphismCheck:
    """Check ``f(B1(x, r)) <= B2(f(x), fb(r))`` and the inverse inclusion exhaustively.

    A failure reports the first ``(x, r, y)`` in source (resp. target) terms.
    """
    if src.size != dst.size or len(a.forward) != src.size:
        raise InputError("forward map is not a bijection between the two supports")
    _check_bounds("forward_bound", a.forward_bound, src.num_radii, dst.num_radii)
    _check_bounds("backward_bound", a.backward_bound, dst.num_radii, src.num_radii)
    inv = a.inverse()
    for direction, s, d, f, bound in (
        ("forward", src, dst, a.forward, a.forward_bound),
        ("backward", dst, src, inv.forward, a.backward_bound),
    ):
        image = transport(s.members, f)
        target = d.members[list(bound)]
        fwd = np.asarray(f)
        # bad[r, x, y]: y in B(x, r) but f(y) outside B(f(x), bound(r))
        bad = (image & ~target)[:, fwd][:, :, fwd]
        if bad.any():
            r, x, y = min(map(tuple, np.argwhere(bad)), key=lambda t: (t[1], t[0], t[2]))
            return AsymorphismCheck(False, direction, int(x), int(r), int(y))
    return AsymorphismCheck(True)


def preserves_balls(src: BallStructure, dst: BallStructure, forward: Sequence[int]) -> bool:
    """Exact ball-image equality ``f(B1(x, r)) == B2(f(x), r)`` for every ``x`` and ``r``."""
    if src.size != dst.size or src.num_radii != dst.num_radii:
        return False
    if sorted(forward) != list(range(src.size)):
        raise InputError("forward map is not a bijection")
    return bool(np.array_equal(transport(src.members, forward), dst.members))


def require_ballean(bs: BallStructure, error: type = ContractError) -> AxiomReport:
    report = validate(bs)
    if not report.ok:
        raise error(
            "structure is not a ballean",
            {"report": report.to_json(bs)},
        )
    return report
