"""Acceptance criteria, each run at its stated size, tolerance and time limit."""

import io
import json
import random
import time
from contextlib import contextmanager, redirect_stderr, redirect_stdout
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from ballean.ballcore import BallStructure, validate, verify_asymorphism
from ballean.cellular import cellularization, is_cellular, partition_at
from ballean.cli import main
from ballean.decompose import BranchingProfile, check_homogeneity, decompose
from ballean.errors import ContractError
from ballean.groupball import (
    SubgroupChain,
    abelian_group,
    asymorphism_between,
    chain_profile,
    chain_with_profile,
    cyclic_group,
    group_ballean,
)
from ballean.metrics import FiniteMetricSpace, is_ultrametric, metric_ballean, random_ultrametric, ultrametrize
from ballean.product import build_product_ballean, product_index

from . import oracles
from .cli_cases import CASES
from .strategies import random_ball_structure, random_chain_structure, random_family, random_hierarchy, random_metric

HERE = Path(__file__).parent


@contextmanager
def time_limit(request, seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    request.node.elapsed = elapsed
    assert elapsed < seconds, f"took {elapsed:.2f}s, limit {seconds}s"


def oracle_flags(bs):
    fwd, bwd, comp = oracles.axiom_witnesses(oracles.balls_of(bs))
    symmetry = None not in fwd and None not in bwd
    composition = all(None not in row for row in comp)
    return (fwd, bwd, comp), symmetry, composition


@pytest.mark.criterion(1, "axiom soundness")
def test_axiom_soundness(request):
    rng = random.Random(1001)
    with time_limit(request, 10):
        for _ in range(200):
            report = validate(metric_ballean(random_metric(rng, rng.randint(1, 20))))
            assert report.containment_ok and report.symmetry_ok and report.composition_ok and report.ok
        broken = 0
        for _ in range(50):
            bs = metric_ballean(random_metric(rng, rng.randint(3, 8)))
            members = bs.members.copy()
            a = rng.randrange(bs.num_radii)
            x, y = rng.sample(range(bs.size), 2)
            members[a, x, y] = not members[a, x, y]
            mutated = BallStructure(bs.support, bs.radii, members)
            witnesses, symmetry, composition = oracle_flags(mutated)
            report = validate(mutated)
            assert (report.forward_witnesses, report.backward_witnesses, report.composition_witnesses) == witnesses
            assert report.symmetry_ok == symmetry
            assert report.composition_ok == composition
            assert report.ok == (symmetry and composition)
            broken += not (symmetry and composition)
        assert broken > 0


@pytest.mark.criterion(2, "cellularization laws")
def test_cellularization_laws(request):
    rng = random.Random(2002)
    with time_limit(request, 10):
        for _ in range(200):
            n, m = rng.randint(1, 15), rng.randint(1, 4)
            bs = random_ball_structure(rng, n, m, density=rng.choice([0.05, 0.15, 0.3]))
            cell = cellularization(bs, check=False)
            assert cellularization(cell, check=False) == cell
            assert not (bs.members & ~cell.members).any()
            balls = oracles.balls_of(bs)
            for a in range(m):
                assert [cell.ball(x, a) for x in range(n)] == oracles.closure(balls, a)
                blocks = partition_at(cell, a)
                assert sorted(x for b in blocks for x in b) == list(range(n))
                for block in blocks:
                    assert all(cell.ball(x, a) == set(block) for x in block)


def non_ultrametric(rng, n):
    while True:
        ms = random_metric(rng, n)
        if oracles.strong_triangle_violation(ms.dist) is not None:
            return ms


@pytest.mark.criterion(3, "ultrametric spaces are cellular")
def test_ultrametrics_cellular(request):
    rng = random.Random(3003)
    with time_limit(request, 10):
        for _ in range(100):
            ms = random_ultrametric(rng.randrange(2**32), rng.randint(1, 25), rng.randint(1, 5))
            assert oracles.strong_triangle_violation(ms.dist) is None
            assert is_cellular(metric_ballean(ms))
        for _ in range(100):
            ms = non_ultrametric(rng, rng.randint(3, 25))
            assert not is_ultrametric(ms)
            with pytest.raises(ContractError):
                ultrametrize(metric_ballean(ms))


def hierarchy_profile(rng):
    while True:
        mu = rng.choice([1, 2, 3])
        kappas = [rng.randint(2, 4) for _ in range(rng.randint(0, 4))]
        if mu * int(np.prod(kappas)) <= 324:
            return mu, kappas


@pytest.mark.criterion(4, "homogeneous hierarchies decompose exactly")
def test_decomposition_soundness(request):
    rng = random.Random(4004)
    with time_limit(request, 30):
        for _ in range(100):
            mu, kappas = hierarchy_profile(rng)
            bs = random_hierarchy(rng, mu, kappas)
            x0 = rng.randrange(bs.size)
            family, a = decompose(bs, x0)
            assert family.sizes == (mu, *kappas)
            target = build_product_ballean(family)
            assert a.forward[x0] == product_index(family, family.basepoint)
            assert verify_asymorphism(bs, target, a).ok
            assert oracles.exact_images(oracles.balls_of(bs), oracles.balls_of(target), a.forward)


@pytest.mark.criterion(5, "product fixed point")
def test_product_fixed_point(request):
    rng = random.Random(5005)
    with time_limit(request, 10):
        for _ in range(50):
            pf = random_family(rng, 256)
            bs = build_product_ballean(pf)
            report = check_homogeneity(bs)
            assert report.ok and report.profile.sizes == pf.sizes
            family, _ = decompose(bs, product_index(pf, pf.basepoint))
            assert family.sizes == pf.sizes


def matched_profile(rng):
    while True:
        mu = rng.randint(1, 4)
        kappas = tuple(rng.randint(2, 4) for _ in range(rng.randint(0, 3)))
        if mu * int(np.prod(kappas)) <= 64:
            return BranchingProfile(mu, kappas)


@pytest.mark.criterion(6, "group chains with equal profiles are asymorphic")
def test_group_chains(request):
    rng = random.Random(6006)
    with time_limit(request, 20):
        z8 = SubgroupChain(cyclic_group(8), [[0, 4], [0, 2, 4, 6], range(8)])
        z2_3 = SubgroupChain(abelian_group([2, 2, 2]), [[0, 1], [0, 1, 2, 3], range(8)])
        assert chain_profile(z8) == chain_profile(z2_3) == BranchingProfile(2, (2, 2))
        a = asymorphism_between(z8, z2_3)
        g, h = group_ballean(z8), group_ballean(z2_3)
        assert sorted(a.forward) == list(range(8))
        assert verify_asymorphism(g, h, a).ok
        assert oracles.is_asymorphism(oracles.balls_of(g), oracles.balls_of(h), a.forward, a.forward_bound, a.backward_bound)
        for _ in range(30):
            profile = matched_profile(rng)
            sg = chain_with_profile(profile, rng.randrange(2**32))
            sh = chain_with_profile(profile, rng.randrange(2**32))
            assert sg.group.order <= 64
            a = asymorphism_between(sg, sh)
            g, h = group_ballean(sg), group_ballean(sh)
            assert verify_asymorphism(g, h, a).ok
            assert oracles.is_asymorphism(oracles.balls_of(g), oracles.balls_of(h), a.forward, a.forward_bound, a.backward_bound)


def partition_at_value(bs, value):
    """Partition of a metric ballean by the largest radius not above ``value``."""
    a = max(i for i, r in enumerate(bs.radii) if Fraction(r) <= value)
    return partition_at(bs, a)


@pytest.mark.criterion(7, "ultrametrize round trip")
def test_ultrametrize_round_trip(request):
    rng = random.Random(7007)
    with time_limit(request, 10):
        for _ in range(100):
            bs = random_chain_structure(rng, rng.randint(1, 25), rng.randint(1, 5))
            um, rmap = ultrametrize(bs)
            assert oracles.strong_triangle_violation(um.dist) is None
            back = metric_ballean(um)
            for a in range(bs.num_radii):
                assert partition_at(bs, a) == partition_at_value(back, rmap[a])


@pytest.mark.criterion(8, "CLI golden files")
def test_cli_golden(request, monkeypatch):
    monkeypatch.chdir(HERE / "fixtures")
    codes = {"contract-error": 1, "input-error": 2, "resource-error": 3}
    with time_limit(request, 60):
        for name, (argv, expected_code) in sorted(CASES.items()):
            out, err = io.StringIO(), io.StringIO()
            with redirect_stdout(out), redirect_stderr(err):
                code = main(argv)
            assert code == expected_code, name
            assert out.getvalue() == (HERE / "golden" / f"{name}.json").read_text(), name
            doc = json.loads(out.getvalue())
            if "error" in doc:
                assert codes[doc["error"]["status"]] == code
        assert {argv[0] if not argv[0].startswith("--") else argv[2] for argv, _ in CASES.values()} >= {
            "validate",
            "cellularize",
            "partition",
            "ultrametrize",
            "decompose",
            "asymorph",
            "gen-ultrametric",
            "gen-chain",
        }
