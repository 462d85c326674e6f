"""Tests for rewriting adaptive two-copy wirings as parity over tailored boxes."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from nlbd.boxes import box_from_correlators, make_named_box, validate_box
from nlbd.equivalence import (
    AffineFactor,
    DeltaPolynomial,
    affine_factorize,
    build_equivalent_boxes,
    factor_affine_target,
    interpolate_qxy,
)
from nlbd.errors import InvalidConstructedBox, NoRealFactorization, RangeInfeasible
from nlbd.wirings import (
    AdaptiveTwoCopyProtocol,
    apply_adaptive,
    apply_nonadaptive,
    bs_output_box,
    bs_wiring,
    identity_wiring,
    parity_as_adaptive,
    parity_protocol,
)


def one_parameter_box(delta):
    return box_from_correlators(make_named_box("isotropic", delta=delta))


def adaptive_output(proto, delta):
    box = one_parameter_box(delta)
    return apply_adaptive(box, box, proto)


def test_polynomial_evaluation_and_degree():
    p = DeltaPolynomial((1.0, 2.0, 3.0))
    assert p(0.0) == 1.0
    assert p(0.5) == 1.0 + 1.0 + 0.75
    assert p.degree == 2
    assert DeltaPolynomial((0.5, 1.0, 1e-15)).degree == 1
    assert DeltaPolynomial((0.25,)).degree == 0
    with pytest.raises(ValueError):
        DeltaPolynomial(())


def test_interpolated_identity_wiring_probabilities():
    # Returning box 1 unchanged: p(00|xy) = (1 + delta)/4 except on input 11,
    # where the one-parameter family has correlator -delta.
    for row in (0, 1, 2):
        q = interpolate_qxy(identity_wiring(), row)
        assert q.coeffs == pytest.approx((0.25, 0.25, 0.0), abs=1e-15)
    q = interpolate_qxy(identity_wiring(), 3)
    assert q.coeffs == pytest.approx((0.25, -0.25, 0.0), abs=1e-15)


def test_interpolated_parity_wiring_is_quadratic():
    q = interpolate_qxy(parity_as_adaptive(), 0)
    assert q.coeffs == pytest.approx((0.25, 0.0, 0.25), abs=1e-15)


def test_interpolated_bs_wiring_input_11():
    q = interpolate_qxy(bs_wiring(), (1, 1))
    assert q.coeffs == pytest.approx((0.25, -0.125, -0.125), abs=1e-15)
    for delta in (0.0, 0.25, 0.8, 1.0):
        assert 4.0 * q(delta) - 1.0 == pytest.approx(
            -(delta + delta * delta) / 2.0, abs=1e-12
        )


def test_interpolation_matches_simulation_at_fresh_points():
    protos = [
        identity_wiring(),
        parity_as_adaptive(),
        bs_wiring(),
        AdaptiveTwoCopyProtocol.decode(0xA6A3A4),
    ]
    deltas = np.linspace(0.037, 0.963, 10)
    for proto in protos:
        polys = [interpolate_qxy(proto, row) for row in range(4)]
        for delta in deltas:
            out = adaptive_output(proto, float(delta))
            for row in range(4):
                assert polys[row](float(delta)) == pytest.approx(
                    float(out.p[row, 0]), abs=1e-9
                )


def test_joint_input_forms_are_interchangeable():
    proto = bs_wiring()
    by_row = interpolate_qxy(proto, 3).coeffs
    assert interpolate_qxy(proto, (1, 1)).coeffs == by_row
    assert interpolate_qxy(proto, "11").coeffs == by_row
    for bad in ("2", "111", (0, 2), (1,), 5, -1):
        with pytest.raises(ValueError):
            interpolate_qxy(proto, bad)


def test_factorize_bs_target():
    # 4q - 1 = delta(1 + delta)/2: the affine factor with the larger root
    # comes first and soaks up the scale its cap allows.
    q = DeltaPolynomial((0.25, 0.125, 0.125))
    factors = affine_factorize(q)
    assert factors == (AffineFactor(1.0, 0.0), AffineFactor(0.5, 0.5))


def test_factorize_double_root():
    q = DeltaPolynomial((0.25, 0.0, 0.25))  # 4q - 1 = delta^2
    assert affine_factorize(q) == (AffineFactor(1.0, 0.0), AffineFactor(1.0, 0.0))


def test_factorize_complex_roots_is_reported():
    q = DeltaPolynomial((3.0 / 8.0, 0.0, 1.0 / 8.0))  # 4q - 1 = (1 + delta^2)/2
    with pytest.raises(NoRealFactorization):
        affine_factorize(q)


def test_factorize_degree_one_target():
    # 4q - 1 = delta: one affine factor plus a constant factor of 1.
    factors = affine_factorize(DeltaPolynomial((0.25, 0.25)))
    assert factors == (AffineFactor(1.0, 0.0), AffineFactor(0.0, 1.0))
    # Negative leading coefficient rides on the affine factor, not the constant.
    factors = affine_factorize(DeltaPolynomial((0.25, -0.25)))
    assert factors == (AffineFactor(-1.0, 0.0), AffineFactor(0.0, 1.0))


def test_factorize_constant_and_zero_targets():
    half = math.sqrt(0.5)
    factors = factor_affine_target(DeltaPolynomial((0.5,)))
    assert [f.c1 for f in factors] == [0.0, 0.0]
    assert [f.c0 for f in factors] == pytest.approx([half, half])
    negated = factor_affine_target(DeltaPolynomial((-0.5,)))
    assert [f.c0 for f in negated] == pytest.approx([-half, half])
    assert factor_affine_target(DeltaPolynomial((0.0, 0.0, 0.0))) == (
        AffineFactor(0.0, 0.0),
        AffineFactor(0.0, 0.0),
    )
    with pytest.raises(RangeInfeasible):
        factor_affine_target(DeltaPolynomial((1.5,)))


def test_factorize_scale_split_clamps_to_caps():
    # 2*delta*(delta - 1/2): the equal split sqrt(2) exceeds the root-0 cap of 1,
    # so that factor clamps and the root-1/2 factor carries the rest.
    factors = factor_affine_target(DeltaPolynomial((0.0, -1.0, 2.0)))
    assert factors == (AffineFactor(2.0, -1.0), AffineFactor(1.0, 0.0))
    flipped = factor_affine_target(DeltaPolynomial((0.0, 1.0, -2.0)))
    assert flipped == (AffineFactor(2.0, -1.0), AffineFactor(-1.0, 0.0))
    grid = np.linspace(0.0, 1.0, 21)
    for factor in (*factors, *flipped):
        assert max(abs(factor(float(d))) for d in grid) <= 1.0 + 1e-12


def test_factorize_infeasible_quadratic():
    # 3*(delta - 2)*(delta + 1): both caps are 1/2, their product 1/4 < 3.
    with pytest.raises(RangeInfeasible):
        factor_affine_target(DeltaPolynomial((-6.0, -3.0, 3.0)))


def test_factorize_degree_above_count():
    cubic = DeltaPolynomial((0.0, 0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        factor_affine_target(cubic, count=2)
    assert factor_affine_target(cubic, count=3) == (AffineFactor(1.0, 0.0),) * 3


def test_factor_products_match_targets_randomly():
    rng = random.Random(20260816)
    for _ in range(40):
        lead = rng.uniform(-1.2, 1.2)
        if abs(lead) < 1e-3:
            continue
        r1 = rng.uniform(-1.5, 2.5)
        r2 = rng.uniform(-1.5, 2.5)
        target = DeltaPolynomial((lead * r1 * r2, -lead * (r1 + r2), lead))
        cap1 = 1.0 / max(abs(r1), abs(1.0 - r1))
        cap2 = 1.0 / max(abs(r2), abs(1.0 - r2))
        if cap1 * cap2 < abs(lead) - 1e-9:
            with pytest.raises(RangeInfeasible):
                factor_affine_target(target)
            continue
        factors = factor_affine_target(target)
        product = [
            factors[0].c0 * factors[1].c0,
            factors[0].c0 * factors[1].c1 + factors[0].c1 * factors[1].c0,
            factors[0].c1 * factors[1].c1,
        ]
        assert product == pytest.approx(target.coeffs, abs=1e-9)
        for factor in factors:
            assert max(abs(factor(0.0)), abs(factor(1.0))) <= 1.0 + 1e-9


def test_bs_construction_matches_reference_pair():
    result = build_equivalent_boxes(bs_wiring())
    assert result.certificate.max_deviation <= 1e-9
    assert result.certificate.p00_deviation <= result.certificate.max_deviation
    assert result.factorization.max_product_drift() <= 1e-9

    first, second = result.boxes
    assert first.correlator == (AffineFactor(1.0, 0.0),) * 4
    assert second.correlator[:3] == (AffineFactor(1.0, 0.0),) * 3
    assert second.correlator[3] == AffineFactor(-0.5, -0.5)
    for box in result.boxes:
        assert box.marginal_a == (AffineFactor(0.0, 0.0),) * 2
        assert box.marginal_b == (AffineFactor(0.0, 0.0),) * 2

    # The second box, written out at delta = 0.6: rows 00-10 as for the
    # one-parameter family, row 11 with expected value -(1 + delta)/2.
    concrete = second.box_at(0.6)
    plain = np.array([1.6, 0.4, 0.4, 1.6]) / 4.0
    flipped = np.array([1.0 - 0.8, 1.0 + 0.8, 1.0 + 0.8, 1.0 - 0.8]) / 4.0
    for row in range(3):
        assert concrete.p[row] == pytest.approx(plain, abs=1e-12)
    assert concrete.p[3] == pytest.approx(flipped, abs=1e-12)

    parity = parity_protocol(2, 2)
    for delta in (0.0, 0.3, 0.7, 1.0):
        rebuilt = apply_nonadaptive([b.box_at(delta) for b in result.boxes], parity)
        assert np.max(np.abs(rebuilt.p - bs_output_box(delta).p)) <= 1e-9


def test_identity_construction_returns_original_and_deterministic_box():
    result = build_equivalent_boxes(identity_wiring())
    assert result.certificate.max_deviation <= 1e-9
    first, second = result.boxes
    for delta in (0.0, 0.4, 1.0):
        assert np.max(np.abs(first.box_at(delta).p - one_parameter_box(delta).p)) <= 1e-12
    # Factor lists: the original box times the deterministic even-parity box.
    assert first.correlator == (
        AffineFactor(1.0, 0.0),
        AffineFactor(1.0, 0.0),
        AffineFactor(1.0, 0.0),
        AffineFactor(-1.0, 0.0),
    )
    assert second.correlator == (AffineFactor(0.0, 1.0),) * 4
    even = second.box_at(0.3)
    assert even.p == pytest.approx(
        np.array([[0.5, 0.0, 0.0, 0.5]] * 4), abs=1e-15
    )


def test_parity_as_adaptive_construction_is_exact():
    # Parity squares every correlator, so both constructed boxes carry the
    # factor delta on every input (correlator +delta on input 11, unlike the
    # original one-parameter family at -delta); the product still matches.
    result = build_equivalent_boxes(parity_as_adaptive())
    assert result.certificate.max_deviation == 0.0
    assert result.certificate.p00_deviation == 0.0
    first, second = result.boxes
    assert first == second
    assert first.correlator == (AffineFactor(1.0, 0.0),) * 4


def test_constant_output_wiring_carries_marginals():
    # Force Alice's final output to 0: her marginal bias is the constant 1,
    # which must be split across both constructed boxes for the full
    # distribution to match.
    ident_b2 = (0, 0, 1, 1)
    xor_out = (0, 1, 1, 0, 0, 1, 1, 0)
    proto = AdaptiveTwoCopyProtocol(ident_b2, (0,) * 8, ident_b2, xor_out)
    result = build_equivalent_boxes(proto)
    assert result.certificate.max_deviation <= 1e-12
    for box in result.boxes:
        assert box.marginal_a == (AffineFactor(0.0, 1.0),) * 2
        assert box.marginal_b == (AffineFactor(0.0, 0.0),) * 2
        assert box.correlator == (AffineFactor(0.0, 0.0),) * 4
        assert validate_box(box.box_at(0.5)).valid


def test_failure_kinds_on_frozen_wirings():
    # Encodings drawn from random.Random(7); each is the first of its kind.
    with pytest.raises(NoRealFactorization):
        build_equivalent_boxes(AdaptiveTwoCopyProtocol.decode(0x52E6B4))
    with pytest.raises(RangeInfeasible):
        build_equivalent_boxes(AdaptiveTwoCopyProtocol.decode(0x269E0D))
    with pytest.raises(InvalidConstructedBox):
        build_equivalent_boxes(AdaptiveTwoCopyProtocol.decode(0x0C5C7F))
    ok = build_equivalent_boxes(AdaptiveTwoCopyProtocol.decode(0xA6A3A4))
    assert ok.certificate.max_deviation <= 1e-9


def test_random_wirings_end_to_end():
    rng = random.Random(7)
    counts = {"ok": 0, "noreal": 0, "range": 0, "invalid": 0}
    for _ in range(50):
        proto = AdaptiveTwoCopyProtocol.decode(rng.getrandbits(24))
        try:
            result = build_equivalent_boxes(proto)
        except NoRealFactorization:
            counts["noreal"] += 1
        except RangeInfeasible:
            counts["range"] += 1
        except InvalidConstructedBox:
            counts["invalid"] += 1
        else:
            counts["ok"] += 1
            assert result.certificate.max_deviation <= 1e-9
            assert result.certificate.p00_deviation <= result.certificate.max_deviation
            assert result.factorization.max_product_drift() <= 1e-9
    assert sum(counts.values()) == 50
    # Seed-pinned split; every outcome kind occurs, successes reconstruct exactly.
    assert counts == {"ok": 6, "noreal": 12, "range": 16, "invalid": 16}
