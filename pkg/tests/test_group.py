import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sofic_entropy.expr import parse_ring_expression as P
from sofic_entropy.field import FieldSpec
from sofic_entropy.group import (
    FinitePermGroup,
    FreeGroup,
    GroupMismatchError,
    GroupRingElem,
    GroupRingMatrix,
    IntegerLattice,
    cyclic_group,
    dihedral_group,
    matrix_star,
    ring_add,
    ring_mul,
    star,
    support,
    symmetric_group,
)

F2, F3 = FieldSpec(2), FieldSpec(3)
Z, Z2, FR2 = IntegerLattice(1), IntegerLattice(2), FreeGroup(2)


def test_free_reduction():
    ab = FR2.mul(FR2.gen(0), FR2.gen(1))
    binva = FR2.mul(FR2.gen(1, -1), FR2.gen(0))
    assert FR2.mul(ab, binva) == FR2.gen(0, 2)
    assert FR2.format(FR2.gen(0, 2)) == "a^2"


def test_lattice_product():
    assert Z2.mul((1, 2), (3, -1)) == (4, 1)


def test_cyclic_relation():
    g = cyclic_group(3)
    x = g.gen(0)
    assert g.mul(x, g.power(x, 2)) == g.identity()


def test_mixed_group_rejected():
    with pytest.raises(GroupMismatchError):
        ring_add(P("1+t", Z, F2), P("1+a", FR2, F2))
    with pytest.raises(GroupMismatchError):
        ring_mul(P("1+t", Z, F2), P("1+t", Z, F3))
    with pytest.raises(ValueError):
        FR2.check((3,))


def test_ring_mul_examples():
    assert ring_mul(P("1+t", Z, F2), P("1+t", Z, F2)) == P("1+t^2", Z, F2)
    assert ring_mul(P("1+a", FR2, F2), P("1+b", FR2, F2)) == P("1+a+b+ab", FR2, F2)
    assert (P("1+t", Z, F2) * GroupRingElem.zero(F2, Z)).is_zero()


def test_star_examples():
    assert star(P("1+t", Z, F2)) == P("1+t^-1", Z, F2)
    f = P("1+a+ab", FR2, F2)
    assert star(star(f)) == f
    row = GroupRingMatrix.from_rows([[P("1", Z, F2), P("t", Z, F2)]], F2, Z)
    col = matrix_star(row)
    assert (col.m, col.n) == (2, 1)
    assert col[0, 0] == P("1", Z, F2) and col[1, 0] == P("t^-1", Z, F2)


def test_support_examples():
    assert support(GroupRingElem.zero(F2, Z)) == frozenset()
    assert support(P("1+t", Z, F2)) == {(0,), (1,)}
    assert support(ring_mul(P("1+t", Z, F2), P("1+t", Z, F2))) == {(0,), (2,)}


def test_finite_groups():
    assert symmetric_group(3).order == 6
    assert dihedral_group(4).order == 8
    assert cyclic_group(6).order == 6
    s3 = symmetric_group(3)
    t = s3.table
    for a, b, c in itertools.product(range(6), repeat=3):
        assert t[t[a, b], c] == t[a, t[b, c]]
    with pytest.raises(ValueError):
        FinitePermGroup(3, ((0, 0, 1),))


def test_exhaustive_associativity_up_to_24():
    for g in (cyclic_group(7), dihedral_group(6), symmetric_group(4)):
        t = g.table
        n = g.order
        assert n <= 24
        for a in range(n):
            assert (t[t[a]] == t[a][t]).all()  # (ab)c == a(bc) for all b, c
            assert t[a, g.inv(a)] == g.identity()


# --- property tests ------------------------------------------------------

free_words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(FreeGroup.reduce)
lattice_vecs = st.tuples(st.integers(-4, 4), st.integers(-4, 4))


@settings(max_examples=100)
@given(free_words, free_words, free_words)
def test_free_associativity_and_inverse(a, b, c):
    assert FR2.mul(FR2.mul(a, b), c) == FR2.mul(a, FR2.mul(b, c))
    assert FR2.mul(a, FR2.inv(a)) == ()
    for x, y in zip(a, a[1:]):
        assert x != -y


@settings(max_examples=50)
@given(lattice_vecs, lattice_vecs, lattice_vecs)
def test_lattice_associativity(a, b, c):
    assert Z2.mul(Z2.mul(a, b), c) == Z2.mul(a, Z2.mul(b, c))


def _elems(group, elements, p):
    field = FieldSpec(p)
    return st.lists(st.tuples(elements, st.integers(0, p - 1)), max_size=4).map(
        lambda ts: GroupRingElem(field, group, tuple(ts))
    )


S3 = symmetric_group(3)
RINGS = [
    (FR2, free_words),
    (Z2, lattice_vecs),
    (S3, st.integers(0, 5)),
]


@pytest.mark.parametrize("group,elements", RINGS, ids=["free", "lattice", "S3"])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_star_anti_homomorphism(group, elements, data):
    p = data.draw(st.sampled_from([2, 3]))
    f = data.draw(_elems(group, elements, p))
    g = data.draw(_elems(group, elements, p))
    assert star(f * g) == star(g) * star(f)
    assert star(star(f)) == f
    assert (f + (-f)).is_zero()
    assert f * (g * f) == (f * g) * f


@settings(max_examples=60)
@given(_elems(FR2, free_words, 3))
def test_canonical_form_and_text_round_trip(f):
    assert P(str(f), FR2, F3) == f
    keys = [FR2.sort_key(s) for s, _ in f.terms]
    assert keys == sorted(keys)
    assert all(c != 0 for _, c in f.terms)
