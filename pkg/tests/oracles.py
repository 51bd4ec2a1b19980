"""Brute-force reference checks written straight from the definitions.

These use plain Python sets and nested loops only, so they share no code
path with the vectorized implementations they check.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product


def balls_of(bs):
    """``balls[a][x]`` as Python sets."""
    return [[set(bs.ball(x, a)) for x in range(bs.size)] for a in range(bs.num_radii)]


def dual(balls, a, x):
    return {y for y in range(len(balls[a])) if x in balls[a][y]}


def axiom_witnesses(balls):
    """Smallest uniform witnesses for both symmetry clauses and composition (None if absent)."""
    m, n = len(balls), len(balls[0])
    fwd = []
    for a in range(m):
        fwd.append(next((a2 for a2 in range(m) if all(balls[a][x] <= dual(balls, a2, x) for x in range(n))), None))
    bwd = []
    for b in range(m):
        bwd.append(next((b2 for b2 in range(m) if all(dual(balls, b, x) <= balls[b2][x] for x in range(n))), None))
    comp = []
    for a in range(m):
        row = []
        for b in range(m):
            composed = [set().union(*(balls[b][y] for y in balls[a][x])) for x in range(n)]
            row.append(next((g for g in range(m) if all(composed[x] <= balls[g][x] for x in range(n))), None))
        comp.append(tuple(row))
    return tuple(fwd), tuple(bwd), tuple(comp)


def closure(balls, a):
    """Path classes at radius ``a`` by iterating set expansion to a fixed point."""
    n = len(balls[a])
    result = []
    for x in range(n):
        reach = {x}
        while True:
            grown = set(reach)
            for u in reach:
                grown |= balls[a][u]
                grown |= {v for v in range(n) if u in balls[a][v]}
            if grown == reach:
                break
            reach = grown
        result.append(reach)
    return result


def strong_triangle_violation(dist):
    n = len(dist)
    for x, y, z in product(range(n), repeat=3):
        if dist[x][y] > max(dist[x][z], dist[z][y]):
            return (x, y, z)
    return None


def is_metric(dist):
    n = len(dist)
    for x, y, z in product(range(n), repeat=3):
        if dist[x][y] > dist[x][z] + dist[z][y]:
            return False
    return all(dist[x][y] == dist[y][x] and (dist[x][y] > 0) == (x != y) for x in range(n) for y in range(n))


def cosets(table, subgroup):
    return [{table[g][h] for h in subgroup} for g in range(len(table))]


def exact_images(src_balls, dst_balls, f):
    """``f(B(x, a)) == B(f(x), a)`` for every x and a."""
    return all(
        {f[y] for y in src_balls[a][x]} == dst_balls[a][f[x]]
        for a in range(len(src_balls))
        for x in range(len(src_balls[0]))
    )


def is_asymorphism(src_balls, dst_balls, f, fb, bb):
    n = len(f)
    inv = [0] * n
    for x, y in enumerate(f):
        inv[y] = x
    ok_fwd = all({f[y] for y in src_balls[a][x]} <= dst_balls[fb[a]][f[x]] for a in range(len(src_balls)) for x in range(n))
    ok_bwd = all({inv[y] for y in dst_balls[a][x]} <= src_balls[bb[a]][inv[x]] for a in range(len(dst_balls)) for x in range(n))
    return ok_fwd and ok_bwd


def frac_matrix(rows):
    return [[Fraction(v) for v in row] for row in rows]
