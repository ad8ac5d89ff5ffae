"""Ring construction, involution laws, form parameters, Lambda cosets."""

import pytest

from wittlab.rings import (
    RingError,
    lambda_bounds,
    make_form_parameter,
    make_ring,
    _check_conj_reverses,
)


def test_zmod4_identity_involution():
    R = make_ring({"kind": "zmod", "n": 4})
    assert R.size == 4
    assert list(R.conj) == [0, 1, 2, 3]
    assert R.add[3, 2] == 1 and R.mul[3, 3] == 1
    assert R.units == {1, 3}


def test_gf2():
    R = make_ring({"kind": "gf", "q": 2})
    assert R.size == 2
    assert list(R.conj) == [0, 1]


def test_gf4_frobenius_is_involution():
    R = make_ring({"kind": "gf", "q": 4, "conj": "frobenius"})
    # x -> x^2 fixes GF(2) and swaps the two primitive elements
    assert R.conj[0] == 0 and R.conj[R.one] == R.one
    prim = [a for a in range(4) if a not in (0, R.one)]
    assert sorted(int(R.conj[a]) for a in prim) == sorted(prim)
    assert _check_conj_reverses(R)


def test_gf8_frobenius_rejected():
    with pytest.raises(RingError):
        make_ring({"kind": "gf", "q": 8, "conj": "frobenius"})


def test_gf_non_prime_power_rejected():
    with pytest.raises(RingError):
        make_ring({"kind": "gf", "q": 6})


def test_group_ring_z2c2_conj_is_identity():
    # conj(g) = w1(g) g^-1 = g over C_2: the involution is the identity
    R = make_ring({"kind": "group_ring", "m": 2, "group": "C2", "w1": [1, 1]})
    assert R.size == 4
    assert list(R.conj) == list(range(4))
    assert _check_conj_reverses(R)


def test_group_ring_w1_must_be_homomorphism():
    with pytest.raises(RingError):
        make_ring({"kind": "group_ring", "m": 3, "group": "C3", "w1": [1, -1, 1]})


def test_group_ring_sign_character():
    R = make_ring({"kind": "group_ring", "m": 3, "group": "C2", "w1": [1, -1]})
    # conj(g) = -g for the generator g of C_2
    g = R.index_of_coords((0, 1))
    minus_g = R.index_of_coords((0, 2))
    assert R.conj[g] == minus_g
    assert _check_conj_reverses(R)


def test_noncommutative_group_ring_involution():
    R = make_ring({"kind": "group_ring", "m": 2, "group": "S3"})
    assert R.size == 64
    assert _check_conj_reverses(R)
    assert not all(R.mul[a, b] == R.mul[b, a] for a in range(8) for b in range(8))


def test_size_cap():
    with pytest.raises(RingError):
        make_ring({"kind": "zmod", "n": 300})


def test_lambda_bounds_z4():
    R = make_ring({"kind": "zmod", "n": 4})
    # eps = 3 = -1: Lambda_max is all of Z/4, Lambda_min = {r + r} = {0, 2}
    lam_min, lam_max = lambda_bounds(R, 3)
    assert lam_min == {0, 2}
    assert lam_max == {0, 1, 2, 3}


def test_lambda_bounds_gf2():
    R = make_ring({"kind": "gf", "q": 2})
    lam_min, lam_max = lambda_bounds(R, 1)
    assert lam_min == {0}
    assert lam_max == {0, 1}


def test_lambda_bounds_rejects_bad_epsilon():
    R = make_ring({"kind": "zmod", "n": 4})
    with pytest.raises(RingError):
        lambda_bounds(R, 2)  # not a unit


def test_make_form_parameter_closure():
    R = make_ring({"kind": "gf", "q": 2})
    p0 = make_form_parameter(R, 1, ())
    assert p0.lam == {0}
    p1 = make_form_parameter(R, 1, (1,))
    assert p1.lam == {0, 1}

    Z4 = make_ring({"kind": "zmod", "n": 4})
    p2 = make_form_parameter(Z4, 3, ())
    assert p2.lam == {0, 2}


def test_form_parameter_rejects_escape():
    # Z/4 with eps = 1: Lambda_max = {0, 2}; generator 1 escapes
    Z4 = make_ring({"kind": "zmod", "n": 4})
    with pytest.raises(RingError):
        make_form_parameter(Z4, 1, (1,))


def test_cosets():
    Z4 = make_ring({"kind": "zmod", "n": 4})
    p = make_form_parameter(Z4, 3, ())  # Lambda = {0, 2}
    assert p.coset(3) == p.coset(1)
    assert p.coset(0) != p.coset(1)
    assert p.coset_rep(3) == 1
    assert p.coset(0).is_zero()
    # coset equality consistent with addition: rep(a)+rep(b) ~ a+b
    for a in range(4):
        for b in range(4):
            s = int(Z4.add[a, b])
            assert p.coset_rep(int(Z4.add[p.coset_rep(a), p.coset_rep(b)])) == \
                p.coset_rep(s)


def test_form_parameter_sandwich_exhaustive():
    R = make_ring({"kind": "group_ring", "m": 3, "group": "C2", "w1": [1, -1]})
    eps = R.one
    lam_min, lam_max = lambda_bounds(R, eps)
    p = make_form_parameter(R, eps, ())
    for r in range(R.size):
        rc = int(R.conj[r])
        for a in p.lam:
            assert int(R.mul[R.mul[rc, a], r]) in p.lam


def test_all_supported_gf_sizes():
    for q in (2, 3, 4, 5, 7, 8, 9):
        R = make_ring({"kind": "gf", "q": q})
        assert R.size == q
        assert len(R.units) == q - 1
        assert _check_conj_reverses(R)
    for q in (4, 9):
        R = make_ring({"kind": "gf", "q": q, "conj": "frobenius"})
        fixed = sum(1 for a in range(q) if R.conj[a] == a)
        assert fixed == int(q ** 0.5)  # fixed field of the involution


def test_zmod_composite():
    R = make_ring({"kind": "zmod", "n": 12})
    assert R.size == 12
    assert len(R.units) == 4  # 1, 5, 7, 11


def test_group_ring_z4c2():
    R = make_ring({"kind": "group_ring", "m": 4, "group": "C2"})
    assert R.size == 16 and R.base_dim == 2
    assert _check_conj_reverses(R)


def test_w1_as_dict():
    R = make_ring({"kind": "group_ring", "m": 3, "group": "C2",
                   "w1": {"0": 1, "1": -1}})
    g = R.index_of_coords((0, 1))
    assert R.conj[g] == R.index_of_coords((0, 2))


def test_group_ring_q8():
    R = make_ring({"kind": "group_ring", "m": 2, "group": "Q8"})
    assert R.size == 256
    assert _check_conj_reverses(R)
