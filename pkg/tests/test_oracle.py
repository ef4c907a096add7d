import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st


from sofic_entropy.entropy import free_module_patch, relative_estimate
from sofic_entropy.expr import parse_matrix
from sofic_entropy.field import FieldSpec, FqMatrix, subspace_dims
from sofic_entropy.group import IntegerLattice, cyclic_group, symmetric_group
from sofic_entropy.oracle import (
    FiniteActionModel,
    GuardError,
    MapSpaceConfig,
    brute_kernel_count,
    full_shift_model,
    map_space_entropy,
    max_separated,
    pairing_check,
    relation_generators,
    subgroup_closure_size,
)
from sofic_entropy.sofic import build_finite_regular, build_lattice_quotient

from conftest import circulant

F2 = FieldSpec(2)


def test_kernel_count_examples():
    assert brute_kernel_count(FqMatrix.identity(F2, 3)) == 1
    assert brute_kernel_count(FqMatrix.zeros(F2, 1, 4)) == 16
    assert brute_kernel_count(circulant({0: 1, 1: 1}, 6)) == 2


def test_kernel_count_guard():
    with pytest.raises(GuardError):
        brute_kernel_count(FqMatrix.zeros(F2, 1, 21))
    with pytest.raises(GuardError):
        brute_kernel_count(FqMatrix.zeros(FieldSpec(3), 1, 13))


def test_closure_examples():
    assert subgroup_closure_size(2, [], dim=3) == 1
    assert subgroup_closure_size(4, [[2]]) == 2
    assert subgroup_closure_size((4, 6), [[1, 2]]) == 12  # lcm of orders 4 and 3
    with pytest.raises(GuardError):
        subgroup_closure_size(2, np.eye(21, dtype=np.int64), guard=1 << 12)


def test_closure_of_relative_patch_generators():
    patch = free_module_patch(F2, IntegerLattice(1), 2)
    sigma = build_lattice_quotient(1, 4)
    gens = relation_generators(patch, sigma, [(1,)])
    assert subgroup_closure_size(2, gens, dim=20) == 16
    assert relative_estimate(patch, sigma, [(1,)]).dim_s == 4


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 6), st.data())
def test_closure_matches_span(p, n, data):
    k = data.draw(st.integers(0, 4))
    gens = np.array(data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=k, max_size=k)), dtype=np.int64).reshape(k, n)
    dim = subspace_dims(FieldSpec(p), gens, np.zeros((0, n), np.int64), n)[0]
    assert subgroup_closure_size(p, gens, dim=n) == p**dim


def test_map_space_z2_full_shift():
    g = cyclic_group(2)
    model = full_shift_model(g, 2)
    assert model.size == 4 and model.dynamically_generating()
    res = map_space_entropy(model, build_finite_regular(g), MapSpaceConfig((0, 1), Fraction(0), Fraction(1, 2)))
    assert (res.map_count, res.n_eps) == (4, 4)
    assert res.estimate == pytest.approx(math.log(2))


def test_map_space_everything_admitted():
    g = cyclic_group(2)
    model = full_shift_model(g, 2)
    res = map_space_entropy(model, build_finite_regular(g), MapSpaceConfig((0, 1), Fraction(1), Fraction(2)))
    assert res.map_count == 16 and res.n_eps == 1 and res.estimate == 0


def test_map_space_trivial_space():
    g = cyclic_group(3)
    model = FiniteActionModel((1,), g, np.zeros((3, 1), dtype=np.int64))
    res = map_space_entropy(model, build_finite_regular(g), MapSpaceConfig((0, 1), Fraction(0), Fraction(1, 2)))
    assert res.n_eps == 1 and res.estimate == 0


def test_map_space_matches_kernel_estimate_z3():
    g = cyclic_group(3)
    model = full_shift_model(g, 2)
    res = map_space_entropy(model, build_finite_regular(g), MapSpaceConfig(tuple(range(3)), Fraction(0), Fraction(1, 2)))
    assert res.estimate == pytest.approx(math.log(2))


def test_action_model_rejects_non_homomorphism():
    g = cyclic_group(2)
    # swapping 0 with 1 in Z/3 does not fix 0
    with pytest.raises(ValueError):
        FiniteActionModel((3,), g, np.array([[0, 1, 2], [1, 0, 2]]))


def test_max_separated_small():
    dist = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    assert max_separated(dist, Fraction(1, 2)) == 2
    assert max_separated(np.ones((4, 4)) - np.eye(4), Fraction(1, 2)) == 4


def test_pairing_examples():
    g = cyclic_group(2)
    v = pairing_check(parse_matrix("1+s", g, F2))
    assert (v.module_size, v.kernel_count) == (2, 2) and v.ok
    v = pairing_check(parse_matrix("1", g, F2))
    assert (v.module_size, v.kernel_count) == (1, 1) and v.ok
    v = pairing_check(parse_matrix("0", g, F2))
    assert v.kernel_count == 4 == v.module_size and v.ok


def test_pairing_s3():
    g = symmetric_group(3)
    for text in ("1+s", "1+r+r^2", "1+s+r"):
        v = pairing_check(parse_matrix(text, g, FieldSpec(2)))
        assert v.ok and v.kernel_count * v.image_count == 2**6
