import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgsums import (
    Modulus,
    NotAUnit,
    dist_q,
    eq_exp,
    factorize,
    inverse_table,
    iter_unit_exponents,
    mod_inv,
    unit_group,
    unit_mask,
    unit_residues,
)

moduli = st.integers(min_value=2, max_value=600)


def test_factorize_examples():
    assert factorize(12) == [(2, 2), (3, 1)]
    assert factorize(97) == [(97, 1)]
    assert factorize(1024) == [(2, 10)]


def test_factorize_rejects_small():
    for bad in (1, 0, -5):
        with pytest.raises(ValueError):
            factorize(bad)


@given(n=st.integers(min_value=2, max_value=20000))
@settings(max_examples=120)
def test_factorize_reconstructs(n):
    fac = factorize(n)
    assert math.prod(p**e for p, e in fac) == n
    assert fac == sorted(fac)
    assert all(e >= 1 for _, e in fac)


@given(q=moduli)
@settings(max_examples=60)
def test_modulus_invariants(q):
    mod = Modulus.of(q)
    assert math.prod(p**e for p, e in mod.factors) == q
    phi = q
    for p, _ in mod.factors:
        phi = phi // p * (p - 1)
    assert mod.phi == phi
    assert mod.phi == len(unit_residues(mod))


def test_mod_inv_examples():
    assert mod_inv(2, 5) == 3
    assert mod_inv(1, 7) == 1
    with pytest.raises(NotAUnit) as err:
        mod_inv(2, 4)
    assert err.value.gcd == 2


@given(q=moduli, data=st.data())
@settings(max_examples=100)
def test_mod_inv_involution(q, data):
    mod = Modulus.of(q)
    units = unit_residues(mod)
    x = int(units[data.draw(st.integers(0, len(units) - 1))])
    xb = mod_inv(x, mod)
    assert 1 <= xb <= q - 1
    assert x * xb % q == 1
    assert mod_inv(xb, mod) == x


def test_eq_exp_examples():
    assert eq_exp(0, 7) == 1 + 0j
    assert abs(eq_exp(3, 6) - (-1)) < 1e-15
    assert abs(eq_exp(1, 4) - 1j) < 1e-15


@given(q=moduli, z=st.integers(-10**9, 10**9))
@settings(max_examples=150)
def test_eq_exp_periodic_and_unimodular(q, z):
    v = eq_exp(z, q)
    assert eq_exp(z + q, q) == v  # identical after exact reduction
    assert abs(abs(v) - 1.0) <= 2 * np.finfo(float).eps


def test_additive_orthogonality_grid():
    # sum_t e_q(m t) is exactly q when q | m and tiny otherwise; residues
    # m mod q cover every |m| <= 2q because reduction is exact.
    worst = 0.0
    for q in range(2, 501):
        t = np.arange(q)
        for m in range(q):
            s = np.sum(np.exp(2j * np.pi * (m * t % q) / q))
            if m == 0:
                assert s == q
            else:
                worst = max(worst, abs(s))
    assert worst <= 500 * 2**-40


def test_eq_exp_large_m_matches_reduced():
    for q in (7, 12, 100):
        for m in (q + 3, 2 * q - 1, -q - 3):
            for t in range(q):
                assert eq_exp(m * t, q) == eq_exp((m % q) * t % q, q)


@given(q=moduli, u=st.integers(-10**6, 10**6))
@settings(max_examples=150)
def test_dist_symmetry_and_period(q, u):
    d = dist_q(u, q)
    assert 0 <= 2 * d <= q
    assert d == dist_q(-u, q) == dist_q(u + q, q)


def test_dist_examples():
    assert dist_q(3, 10) == 3
    assert dist_q(9, 10) == 1
    assert dist_q(5, 10) == 5


def test_unit_group_examples():
    g5 = unit_group(5)
    assert len(g5.components) == 1
    (comp,) = g5.components
    assert comp.orders == (4,)
    g = comp.generators[0]
    assert sorted(pow(g, k, 5) for k in range(4)) == [1, 2, 3, 4]

    g8 = unit_group(8)
    (comp8,) = g8.components
    assert comp8.generators == (7, 3)
    assert comp8.orders == (2, 2)

    g2 = unit_group(2)
    assert g2.components[0].generators == ()


def test_unit_exponents_bijection_small_grid():
    for q in range(2, 1001):
        seen = [x for x, _ in iter_unit_exponents(q)]
        assert sorted(seen) == [int(u) for u in unit_residues(q)]
        assert len(seen) == Modulus.of(q).phi


def test_inverse_table_and_mask():
    for q in (2, 9, 16, 30, 97, 256):
        inv = inverse_table(q)
        mask = unit_mask(q)
        for x in range(q):
            if mask[x]:
                assert x * int(inv[x]) % q == 1
            else:
                assert inv[x] == 0
