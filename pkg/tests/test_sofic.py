from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sofic_entropy.field import ResourceError
from sofic_entropy.group import FreeGroup, IntegerLattice, cyclic_group, symmetric_group
from sofic_entropy.sofic import (
    EXACT,
    WORD,
    Ladder,
    build_finite_regular,
    build_free_random,
    build_lattice_quotient,
    compose,
    defect_report,
    evaluate,
    good_set,
    invert,
)


def test_lattice_cycle():
    s = build_lattice_quotient(1, 8)
    assert s.kind == EXACT and s.d == 8
    assert s.generator_images[0].tolist() == [1, 2, 3, 4, 5, 6, 7, 0]


def test_lattice_rank_two():
    s = build_lattice_quotient(2, 3)
    assert s.d == 9
    for g in s.generator_images:
        assert not np.array_equal(g, np.arange(9))
        assert np.array_equal(g[g[g]], np.arange(9))


def test_lattice_window_defects_vanish():
    s = build_lattice_quotient(2, 5)
    window = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1)]
    rep = defect_report(s, window)
    assert rep.max_mult() == 0
    assert all(v == 0 for v in rep.sep_defect.values())


def test_lattice_resource_cap():
    with pytest.raises(ResourceError):
        build_lattice_quotient(3, 100, limit=10**5)
    with pytest.raises(ValueError):
        build_lattice_quotient(1, 1)


def test_finite_regular():
    z3 = build_finite_regular(cyclic_group(3))
    g = z3.generator_images[0]
    assert z3.d == 3 and sorted(g.tolist()) == [0, 1, 2] and all(g != np.arange(3))
    assert np.array_equal(g[g[g]], np.arange(3))
    z2 = build_finite_regular(cyclic_group(2))
    assert z2.generator_images[0].tolist() == [1, 0]
    s3 = symmetric_group(3)
    sig = build_finite_regular(s3)
    rep = defect_report(sig, range(6))
    assert rep.max_mult() == 0
    assert all(rep.sep_defect[(s, 0)] == 0 for s in range(1, 6))


def test_free_random_determinism_and_inverse():
    a = build_free_random(2, 100, seed=11)
    b = build_free_random(2, 100, seed=11)
    c = build_free_random(2, 100, seed=12)
    assert all(np.array_equal(x, y) for x, y in zip(a.generator_images, b.generator_images))
    assert not all(np.array_equal(x, y) for x, y in zip(a.generator_images, c.generator_images))
    G = FreeGroup(2)
    assert np.array_equal(evaluate(a, G.gen(0, -1)), invert(a.generator_images[0]))
    assert a.kind == WORD
    rep = defect_report(a, [G.gen(0), G.gen(1)])
    assert 0 <= rep.sep_defect[(G.gen(0), G.gen(1))] <= 1


def test_evaluate_conventions():
    s = build_lattice_quotient(2, 5)
    e1, e2 = s.generator_images
    assert np.array_equal(evaluate(s, (0, 0)), np.arange(25))
    assert np.array_equal(evaluate(s, (2, 3)), compose(e1, e1, e2, e2, e2))
    f = build_free_random(2, 30, seed=3)
    a, b = f.generator_images
    assert np.array_equal(evaluate(f, (1, 2, -1)), compose(a, b, invert(a)))


def test_lattice_word_extension_convention():
    # A lattice approximation without a torus side uses generator composition.
    base = build_lattice_quotient(2, 4)
    from sofic_entropy.sofic import SoficApprox

    s = SoficApprox(IntegerLattice(2), 16, base.generator_images, WORD)
    assert np.array_equal(evaluate(s, (2, 3)), evaluate(base, (2, 3)))


def test_small_torus_separation_failure():
    s = build_lattice_quotient(1, 10)
    rep = defect_report(s, [(0,), (10,)])
    assert rep.sep_defect[((0,), (10,))] == Fraction(1)


def test_word_extension_pair_is_exact():
    s = build_free_random(2, 50, seed=5)
    G = FreeGroup(2)
    a, b = G.gen(0), G.gen(1)
    rep = defect_report(s, [a, b, G.mul(a, b)])
    assert rep.mult_defect[(a, b)] == 0
    assert all(x.denominator in (1, 2, 5, 10, 25, 50) for x in rep.mult_defect.values())


def test_good_set_examples():
    assert good_set(build_lattice_quotient(1, 7), [(1,), (3,)]).complement_size == 0
    s = build_free_random(2, 50, seed=9)
    G = FreeGroup(2)
    assert good_set(s, G.generators()).complement_size == 0
    ab = G.mul(G.gen(0), G.gen(1))
    w = good_set(s, [ab])
    assert w.complement_size == 0 and w.members.tolist() == list(range(50))
    a, b = s.generator_images
    assert np.array_equal(evaluate(s, G.inv(ab)), invert(compose(a, b)))


def test_ladder_validation():
    with pytest.raises(ValueError):
        Ladder(())
    with pytest.raises(ValueError):
        Ladder((build_lattice_quotient(1, 5), build_lattice_quotient(1, 4)))
    with pytest.raises(ValueError):
        Ladder((build_lattice_quotient(1, 4), build_lattice_quotient(2, 3)))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8).map(FreeGroup.reduce),
    st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8).map(FreeGroup.reduce),
    st.integers(1, 40),
)
def test_free_inverse_and_product_convention(u, v, d):
    s = build_free_random(2, d, seed=1)
    G = FreeGroup(2)
    assert np.array_equal(evaluate(s, G.inv(u)), invert(evaluate(s, u)))
    # exact when no cancellation happens between u and v
    if not (u and v and u[-1] == -v[0]):
        assert np.array_equal(evaluate(s, G.mul(u, v)), compose(evaluate(s, u), evaluate(s, v)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(2, 6), st.data())
def test_lattice_homomorphism_and_separation(r, B, data):
    N = 2 * B + 1
    if N**r > 3000:
        N = 2 * B + 1
        r = 1
    s = build_lattice_quotient(r, N)
    vec = st.tuples(*[st.integers(-B, B)] * r)
    window = data.draw(st.lists(vec, min_size=1, max_size=5, unique=True))
    rep = defect_report(s, window)
    assert rep.max_mult() == 0
    assert rep.max_sep() == 0
