import numpy as np
import pytest

from qfp.errors import ParameterError
from qfp.gf2k import PRIMITIVE_POLY, GF2k


def _slow_mul(a: int, b: int, k: int, poly: int) -> int:
    """Carry-less multiply then reduce modulo the field polynomial."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
    for shift in range(2 * k - 2, k - 1, -1):
        if (r >> shift) & 1:
            r ^= poly << (shift - k)
    return r


def _is_primitive(poly: int, k: int) -> bool:
    if k == 1:  # GF(2): trivial group, x + 1 is the only degree-1 modulus
        return poly == 0b11
    order = (1 << k) - 1
    n, factors = order, set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors.add(d)
            n //= d
        d += 1
    if n > 1:
        factors.add(n)

    def gf_pow(a, e):
        r = 1
        while e:
            if e & 1:
                r = _slow_mul(r, a, k, poly)
            a = _slow_mul(a, a, k, poly)
            e >>= 1
        return r

    return gf_pow(2, order) == 1 and all(gf_pow(2, order // p) != 1 for p in factors)


@pytest.mark.parametrize("k", sorted(PRIMITIVE_POLY))
def test_fixed_polynomials_are_primitive(k):
    assert _is_primitive(PRIMITIVE_POLY[k], k)


@pytest.mark.parametrize("k", [2, 3, 4, 8])
def test_fixed_polynomials_are_lexicographically_first(k):
    for candidate in range((1 << k) + 1, PRIMITIVE_POLY[k], 2):
        assert not _is_primitive(candidate, k)


@pytest.mark.parametrize("k", [2, 3, 8, 11])
def test_table_mul_matches_slow_mul(k):
    gf = GF2k(k)
    rng = np.random.Generator(np.random.PCG64(3))
    q = 1 << k
    for _ in range(300):
        a, b = int(rng.integers(0, q)), int(rng.integers(0, q))
        assert gf.mul(a, b) == _slow_mul(a, b, k, gf.poly)


def test_field_axioms_sampled():
    gf = GF2k(8)
    rng = np.random.Generator(np.random.PCG64(5))
    for _ in range(200):
        a, b, c = (int(v) for v in rng.integers(0, 256, 3))
        assert gf.mul(a, b) == gf.mul(b, a)
        assert gf.mul(a, gf.mul(b, c)) == gf.mul(gf.mul(a, b), c)
        assert gf.mul(a, b ^ c) == gf.mul(a, b) ^ gf.mul(a, c)
        assert gf.mul(a, 1) == a
        assert gf.mul(a, 0) == 0


def test_generator_has_full_order():
    gf = GF2k(6)
    seen = {gf.pow_generator(e) for e in range(gf.order)}
    assert len(seen) == gf.order
    assert 0 not in seen


def test_mul_vec_matches_scalar():
    gf = GF2k(5)
    rng = np.random.Generator(np.random.PCG64(11))
    a = rng.integers(0, 32, 100)
    b = rng.integers(0, 32, 100)
    vec = gf.mul_vec(a, b)
    for i in range(100):
        assert vec[i] == gf.mul(int(a[i]), int(b[i]))


def test_eval_poly_at_powers_matches_horner():
    gf = GF2k(4)
    coeffs = np.array([3, 0, 7, 9])
    vals = gf.eval_poly_at_powers(coeffs)
    for j in range(gf.order):
        point = gf.pow_generator(j)
        acc = 0
        for c in coeffs[::-1]:
            acc = gf.mul(acc, point) ^ int(c)
        assert vals[j] == acc


def test_k_out_of_range():
    with pytest.raises(ParameterError):
        GF2k(17)
