"""Walsh transforms, even-parity probability, Fourier values, parity bound."""

import itertools

import numpy as np
import pytest

from nlbd.errors import ArityMismatch
from nlbd.fourier import (
    FourierSpectrum,
    ParityBound,
    PmOutputFunction,
    even_parity_prob,
    nonadaptive_value_fourier,
    parity_bound,
    spectrum_csv,
    walsh_transform,
    walsh_transform_direct,
    weight_table,
)
from nlbd.xorboxes import MultipartiteXorBox, XorGame, simulate_nonadaptive_xor

CHSH = XorGame.chsh()


def random_function(rng, m):
    return PmOutputFunction(m, tuple(rng.choice([-1, 1], size=1 << m)))


def test_parity_function_spectrum():
    for m in (1, 2, 3):
        sp = walsh_transform(PmOutputFunction.parity(m))
        expect = np.zeros(1 << m)
        expect[-1] = 1.0  # z = all ones
        assert np.allclose(sp.coeff, expect, atol=1e-15)


def test_constant_function_spectrum():
    sp = walsh_transform(PmOutputFunction.constant(3))
    expect = np.zeros(8)
    expect[0] = 1.0
    assert np.allclose(sp.coeff, expect, atol=1e-15)


def test_majority_spectrum():
    # m=3 majority: output 0 (value +1) iff the string has >= 2 zeros.
    table = []
    for s in range(8):
        zeros = 3 - bin(s).count("1")
        table.append(+1 if zeros >= 2 else -1)
    sp = walsh_transform(PmOutputFunction(3, tuple(table)))
    w = weight_table(3)
    for z in range(8):
        if w[z] == 1:
            assert sp.coeff[z] == pytest.approx(0.5, abs=1e-15)
        elif w[z] == 3:
            assert sp.coeff[z] == pytest.approx(-0.5, abs=1e-15)
        else:
            assert sp.coeff[z] == pytest.approx(0.0, abs=1e-15)


def test_butterfly_matches_direct():
    rng = np.random.default_rng(31)
    for m in (1, 2, 3, 4):
        for _ in range(10):
            f = random_function(rng, m)
            fast = walsh_transform(f).array()
            slow = walsh_transform_direct(f).array()
            assert np.allclose(fast, slow, atol=1e-12)


def test_parseval_exhaustive_m2():
    for bits in itertools.product([0, 1], repeat=4):
        f = PmOutputFunction.from_bits(2, bits)
        assert walsh_transform(f).parseval_defect() < 1e-12


def test_parseval_random_m3_m4():
    rng = np.random.default_rng(32)
    for m in (3, 4):
        for _ in range(200):
            assert walsh_transform(random_function(rng, m)).parseval_defect() < 1e-12


def test_even_parity_prob_parity_players():
    rng = np.random.default_rng(33)
    for n in (2, 3):
        for m in (1, 2, 3):
            sp = walsh_transform(PmOutputFunction.parity(m))
            for _ in range(5):
                delta = float(rng.uniform(-1, 1))
                r = even_parity_prob([sp] * n, delta)
                # Only z = all-ones survives; prod of coefficients is 1.
                assert r == pytest.approx((1 + delta**m * (1 if n % 2 == 0 else 1)) / 2, abs=1e-12)


def test_even_parity_prob_delta_zero():
    rng = np.random.default_rng(34)
    fs = [random_function(rng, 2) for _ in range(2)]
    sps = [walsh_transform(f) for f in fs]
    r = even_parity_prob(sps, 0.0)
    expect = (1 + sps[0].coeff[0] * sps[1].coeff[0]) / 2
    assert r == pytest.approx(expect, abs=1e-12)


def brute_even_parity_prob(functions, delta):
    """Direct enumeration over all joint outcome tuples of m copies, n players."""
    n = len(functions)
    m = functions[0].m
    bits = [f.bits() for f in functions]
    total = 0.0
    for outcome in range(1 << (n * m)):
        prob = 1.0
        out_parity = 0
        strings = [0] * n
        for c in range(m):
            copy_parity = 0
            for j in range(n):
                bit = (outcome >> (c * n + j)) & 1
                copy_parity ^= bit
                strings[j] |= bit << (m - 1 - c)
            prob *= (1 + delta) / (1 << n) if copy_parity == 0 else (1 - delta) / (1 << n)
        for j in range(n):
            out_parity ^= int(bits[j][strings[j]])
        if out_parity == 0:
            total += prob
    return total


def test_even_parity_prob_matches_enumeration():
    rng = np.random.default_rng(35)
    for n, m in ((2, 2), (2, 3), (3, 2)):
        for _ in range(5):
            fs = [random_function(rng, m) for _ in range(n)]
            delta = float(rng.uniform(-1, 1))
            fourier = even_parity_prob([walsh_transform(f) for f in fs], delta)
            direct = brute_even_parity_prob(fs, delta)
            assert fourier == pytest.approx(direct, abs=1e-9)


def test_arity_mismatch_rejected():
    sp2 = walsh_transform(PmOutputFunction.parity(2))
    sp3 = walsh_transform(PmOutputFunction.parity(3))
    with pytest.raises(ArityMismatch):
        even_parity_prob([sp2, sp3], 0.5)
    with pytest.raises(ArityMismatch):
        nonadaptive_value_fourier([sp2], CHSH, (1, 1, 1, 0))
    with pytest.raises(ArityMismatch):
        nonadaptive_value_fourier([sp2, sp2], CHSH, (1, 1, 1))


def test_value_fourier_parity_spectra_is_lemma_value():
    rng = np.random.default_rng(36)
    for n in (2, 3):
        game = CHSH if n == 2 else XorGame.from_predicate(3, lambda b: all(b))
        for m in (1, 2, 3):
            sp = walsh_transform(PmOutputFunction.parity(m))
            delta = rng.uniform(-1, 1, size=1 << n)
            v = nonadaptive_value_fourier([sp] * n, game, delta)
            expect = float(game.signs() @ delta**m)
            assert v == pytest.approx(expect, abs=1e-12)


def test_value_fourier_constant_spectra():
    sp = walsh_transform(PmOutputFunction.constant(2))
    delta = (0.3, -0.2, 0.9, 0.1)
    v = nonadaptive_value_fourier([sp, sp], CHSH, delta)
    assert v == pytest.approx(2.0, abs=1e-12)  # sum of (-1)^f(x)


def test_value_fourier_matches_simulation():
    rng = np.random.default_rng(37)
    for n, m in ((2, 2), (2, 3), (3, 2), (3, 3)):
        game = CHSH if n == 2 else XorGame.from_predicate(3, lambda b: all(b))
        for _ in range(8):
            fs = [random_function(rng, m) for _ in range(n)]
            delta = tuple(rng.uniform(-1, 1, size=1 << n))
            box = MultipartiteXorBox(game, delta)
            tables = [[f.bits(), f.bits()] for f in fs]
            sim_value, _ = simulate_nonadaptive_xor(box, tables, m)
            fourier = nonadaptive_value_fourier([walsh_transform(f) for f in fs], game, delta)
            assert fourier == pytest.approx(sim_value, abs=1e-9)


def test_parity_bound_correlated():
    b = parity_bound(CHSH, (1, 1, 1, 0.3), 2)
    assert b == ParityBound(pytest.approx(3 - 0.09), 2)


def test_parity_bound_isotropic_prefers_single_copy():
    for delta in (0.2, 0.6, 1.0):
        b = parity_bound(CHSH, (delta, delta, delta, -delta), 2)
        assert b.k == 1
        assert b.value == pytest.approx(4 * delta)


def test_parity_bound_m1():
    rng = np.random.default_rng(38)
    d = tuple(rng.uniform(-1, 1, size=4))
    b = parity_bound(CHSH, d, 1)
    assert b.value == pytest.approx(abs(float(CHSH.signs() @ np.array(d))))
    assert b.k == 1


def test_spectrum_csv_shape():
    sp = walsh_transform(PmOutputFunction.parity(2))
    lines = spectrum_csv(sp).strip().splitlines()
    assert lines[0] == "z,coeff"
    assert len(lines) == 5
    assert lines[-1].startswith("11,")
