"""Rewriting adaptive two-copy wirings as parity over two tailored boxes.

An adaptive two-copy wiring applied to two identical one-parameter boxes
produces output probabilities that are quadratics in the noise parameter.
This module recovers those quadratics exactly by interpolation, splits each
into affine factors bounded on the physical parameter range, and assembles
two (generally nonidentical) boxes whose two-copy parity wiring reproduces
the adaptive output.  A numeric certificate reports the worst-case
reconstruction error, both for the full distribution and for the even-even
output probabilities alone.

The even-even probability q_xy pins only one entry per input: its product
target is 4*q_xy - 1.  Matching the whole distribution in addition needs the
adaptive output's marginal-bias polynomials split the same way, because the
parity wiring multiplies marginal biases exactly as it multiplies
correlators.  Both factorizations are canonical (see factor_affine_target),
so the constructed pair is deterministic; failures (complex roots, range
infeasibility, an invalid assembled box) are reported as typed errors, never
patched over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .boxes import (
    BipartiteBox,
    CorrelatorForm,
    box_from_correlators,
    correlators_from_box,
    make_named_box,
    validate_box,
)
from .errors import InvalidConstructedBox, NoRealFactorization, RangeInfeasible
from .wirings import (
    AdaptiveTwoCopyProtocol,
    apply_adaptive,
    apply_nonadaptive,
    parity_protocol,
)

__all__ = [
    "AffineFactor",
    "AffineFactorization",
    "DeltaPolynomial",
    "EquivalenceCertificate",
    "EquivalenceResult",
    "EquivalentBox",
    "affine_factorize",
    "build_equivalent_boxes",
    "factor_affine_target",
    "interpolate_qxy",
]

COEFF_TOL = 1e-12
PRODUCT_TOL = 1e-9
RANGE_TOL = 1e-9
# Interpolation nodes: three points determine a quadratic; 0, 1/2, 1 keep
# every arithmetic step dyadic, so the fit is exact in floats.
SAMPLE_DELTAS = (0.0, 0.5, 1.0)
CERTIFICATE_DELTAS = tuple(step / 10.0 for step in range(11))


@dataclass(frozen=True)
class DeltaPolynomial:
    """Real polynomial in the noise parameter; coefficients constant-first."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        d = len(self.coeffs) - 1
        while d > 0 and abs(self.coeffs[d]) <= COEFF_TOL:
            d -= 1
        return d

    def __call__(self, delta: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * float(delta) + c
        return acc


class AffineFactor(NamedTuple):
    """Affine expected-value entry c1 * delta + c0 of one constructed box."""

    c1: float
    c0: float

    def __call__(self, delta: float) -> float:
        return self.c1 * float(delta) + self.c0


def _quadratic_through(v0: float, vh: float, v1: float) -> DeltaPolynomial:
    """Exact quadratic through samples at 0, 1/2, and 1."""
    c2 = 2.0 * (v0 - 2.0 * vh + v1)
    c1 = v1 - v0 - c2
    return DeltaPolynomial((v0, c1, c2))


def _product_coefficients(factors: Sequence[AffineFactor]) -> tuple[float, ...]:
    coeffs = [1.0]
    for f in factors:
        expanded = [0.0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            expanded[i] += c * f.c0
            expanded[i + 1] += c * f.c1
        coeffs = expanded
    return tuple(coeffs)


def _spread(total: float, caps: Sequence[float]) -> list[float]:
    """Scale magnitudes multiplying to total, each at most its cap.

    Equal geometric split; factors whose cap falls below the current share
    are clamped to it and the remainder is re-split over the rest.  The
    caller guarantees feasibility (prod(caps) >= total), which implies the
    loop always terminates via the no-clamp branch.
    """
    scales = [0.0] * len(caps)
    free = list(range(len(caps)))
    remaining = total
    while free:
        share = remaining ** (1.0 / len(free))
        tight = [i for i in free if caps[i] < share]
        if not tight:
            for i in free:
                scales[i] = share
            break
        for i in tight:
            scales[i] = caps[i]
            remaining /= caps[i]
        free = [i for i in free if caps[i] >= share]
    return scales


def factor_affine_target(
    target: DeltaPolynomial, count: int = 2
) -> tuple[AffineFactor, ...]:
    """Split target into count affine factors, each mapping [0, 1] into [-1, 1].

    Canonical form: affine factors ordered by descending root, constant
    factors last; the leading-coefficient magnitude is spread over the
    factors by equal geometric split with per-factor caps (clamp the capped
    ones, re-split the rest); a negative leading coefficient is carried by
    the affine factor with the smallest root, or by the first constant
    factor when the target is constant.  The zero polynomial becomes
    all-zero factors.

    Raises NoRealFactorization when the target has complex roots and
    RangeInfeasible when no scaling keeps every factor inside [-1, 1].
    """
    coeffs = [0.0 if abs(c) <= COEFF_TOL else float(c) for c in target.coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs.pop()
    degree = len(coeffs) - 1
    if degree > count:
        raise ValueError(
            f"degree-{degree} target cannot split into {count} affine factors"
        )
    if coeffs == [0.0]:
        return tuple(AffineFactor(0.0, 0.0) for _ in range(count))

    lead = coeffs[-1]
    if degree == 0:
        roots: list[float] = []
    elif degree == 1:
        roots = [-coeffs[0] / coeffs[1]]
    elif degree == 2:
        c0, c1, c2 = coeffs
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < -COEFF_TOL:
            raise NoRealFactorization(
                f"target with coefficients {tuple(coeffs)} has complex roots "
                f"(discriminant {disc:.3g})"
            )
        s = math.sqrt(max(disc, 0.0))
        roots = [(-c1 + s) / (2.0 * c2), (-c1 - s) / (2.0 * c2)]
    else:
        found = np.roots(coeffs[::-1])  # companion-matrix eigenvalues
        if np.any(np.abs(found.imag) > 1e-7):
            raise NoRealFactorization(
                f"target with coefficients {tuple(coeffs)} has complex roots "
                f"{found[np.abs(found.imag) > 1e-7]}"
            )
        roots = [float(r) for r in found.real]
    roots.sort(reverse=True)

    # |(delta - r)| on [0, 1] peaks at an endpoint, so the largest scale that
    # keeps a factor inside [-1, 1] is 1/max(|r|, |1 - r|); constants cap at 1.
    caps = [1.0 / max(abs(r), abs(1.0 - r)) for r in roots]
    caps += [1.0] * (count - degree)
    total = abs(lead)
    if math.prod(caps) < total - RANGE_TOL:
        raise RangeInfeasible(
            f"leading coefficient {lead:.6g} exceeds the achievable product of "
            f"range caps {math.prod(caps):.6g}"
        )

    scales = _spread(total, caps)
    factors = [AffineFactor(s, -s * r) for s, r in zip(scales, roots)]
    factors += [AffineFactor(0.0, s) for s in scales[degree:]]
    if lead < 0.0:
        flip = degree - 1 if degree > 0 else 0
        chosen = factors[flip]
        factors[flip] = AffineFactor(-chosen.c1, -chosen.c0)

    product = _product_coefficients(factors)
    padded = coeffs + [0.0] * (len(product) - len(coeffs))
    drift = max(abs(p - t) for p, t in zip(product, padded))
    assert drift <= PRODUCT_TOL, f"factor product drifted from the target by {drift:.3g}"
    return tuple(factors)


def _even_output_target(q: DeltaPolynomial) -> DeltaPolynomial:
    """The product target 4*q - 1 of an even-even output probability polynomial."""
    return DeltaPolynomial(
        (4.0 * q.coeffs[0] - 1.0,) + tuple(4.0 * c for c in q.coeffs[1:])
    )


def affine_factorize(q: DeltaPolynomial, count: int = 2) -> tuple[AffineFactor, ...]:
    """Factor the even-output target 4*q - 1 into per-copy expected values.

    q is the probability polynomial for joint outcome 00 on one input; the
    parity wiring over boxes whose expected values on that input are the
    returned factors reproduces q there, since the product of the factors
    equals 4*q(delta) - 1 for every delta.
    """
    return factor_affine_target(_even_output_target(q), count)


@dataclass(frozen=True)
class AffineFactorization:
    """Affine factor lists for all four joint inputs of a two-copy wiring.

    targets[row] is the polynomial 4*q_row - 1 and entries[row] its factors,
    rows in input order 00, 01, 10, 11.
    """

    targets: tuple[DeltaPolynomial, ...]
    entries: tuple[tuple[AffineFactor, ...], ...]

    def max_product_drift(self) -> float:
        """Largest coefficientwise gap between a factor product and its target."""
        worst = 0.0
        for target, factors in zip(self.targets, self.entries):
            product = _product_coefficients(factors)
            padded = tuple(target.coeffs) + (0.0,) * (len(product) - len(target.coeffs))
            worst = max(worst, max(abs(p - t) for p, t in zip(product, padded)))
        return worst


def _input_row(xy) -> int:
    """Normalize a joint input given as a row index, an (x, y) pair, or '01'-style bits."""
    if isinstance(xy, str):
        if len(xy) == 2 and set(xy) <= {"0", "1"}:
            return int(xy, 2)
        raise ValueError(f"joint input string must be two bits, got {xy!r}")
    if isinstance(xy, (tuple, list)):
        if len(xy) == 2 and all(bit in (0, 1) for bit in xy):
            return (int(xy[0]) << 1) | int(xy[1])
        raise ValueError(f"joint input pair must be two bits, got {xy!r}")
    row = int(xy)
    if not 0 <= row <= 3:
        raise ValueError(f"joint input row must be in 0..3, got {xy!r}")
    return row


def _one_parameter_box(delta: float) -> BipartiteBox:
    return box_from_correlators(make_named_box("isotropic", delta=delta))


def _adaptive_output(proto: AdaptiveTwoCopyProtocol, delta: float) -> BipartiteBox:
    box = _one_parameter_box(delta)
    return apply_adaptive(box, box, proto)


def interpolate_qxy(proto: AdaptiveTwoCopyProtocol, xy) -> DeltaPolynomial:
    """Recover p(ab=00|xy) of the adaptive wiring on identical one-parameter boxes.

    Every output probability of a two-copy wiring is a quadratic in the noise
    parameter (each copy contributes one affine entry per term), so sampling
    the exact simulator at delta in {0, 1/2, 1} determines it exactly.
    """
    row = _input_row(xy)
    v0, vh, v1 = (float(_adaptive_output(proto, d).p[row, 0]) for d in SAMPLE_DELTAS)
    return _quadratic_through(v0, vh, v1)


def _clip_entry(value: float) -> float:
    if abs(value) > 1.0 + 1e-6:
        raise InvalidConstructedBox(f"affine entry {value:.6g} leaves [-1, 1]")
    return min(1.0, max(-1.0, value))


@dataclass(frozen=True)
class EquivalentBox:
    """One box of the constructed pair; every entry is affine in the parameter.

    marginal_a / marginal_b hold the per-input expected-value factors of the
    two players' outputs, correlator the per-joint-input factors, both in
    input order.
    """

    marginal_a: tuple[AffineFactor, AffineFactor]
    marginal_b: tuple[AffineFactor, AffineFactor]
    correlator: tuple[AffineFactor, AffineFactor, AffineFactor, AffineFactor]

    def correlator_form(self, delta: float) -> CorrelatorForm:
        values = [
            factor(delta)
            for factor in (*self.marginal_a, *self.marginal_b, *self.correlator)
        ]
        return CorrelatorForm(*(_clip_entry(v) for v in values))

    def box_at(self, delta: float) -> BipartiteBox:
        """The concrete box at one parameter value (may fail validation)."""
        return box_from_correlators(self.correlator_form(delta))


class EquivalenceCertificate(NamedTuple):
    """Worst-case gap between the parity reconstruction and the adaptive output."""

    max_deviation: float
    p00_deviation: float


@dataclass(frozen=True)
class EquivalenceResult:
    """Constructed box pair, per-input factorization, and reconstruction errors."""

    boxes: tuple[EquivalentBox, EquivalentBox]
    factorization: AffineFactorization
    certificate: EquivalenceCertificate


_FIELD_NAMES = ("alpha", "beta", "gamma", "omega", "d1", "d2", "d3", "eps")


def build_equivalent_boxes(proto: AdaptiveTwoCopyProtocol) -> EquivalenceResult:
    """Rewrite an adaptive two-copy wiring as parity over two tailored boxes.

    Factors the four even-output targets 4*q_xy - 1 (reported in
    .factorization) and, for the distribution-level construction, the eight
    marginal-bias and correlator polynomials of the adaptive output.  The
    two boxes take the first and second factor of every family; the
    certificate holds the worst entrywise and even-even-probability
    deviations between their parity wiring and the adaptive output over
    delta in {0, 0.1, ..., 1}.

    Raises NoRealFactorization or RangeInfeasible when a family cannot be
    split into bounded affine factors, InvalidConstructedBox when the factor
    assignment fails box validation at some sampled delta.
    """
    targets = tuple(
        _even_output_target(interpolate_qxy(proto, row)) for row in range(4)
    )
    entries = tuple(factor_affine_target(t) for t in targets)
    factorization = AffineFactorization(targets=targets, entries=entries)

    forms = [correlators_from_box(_adaptive_output(proto, d)) for d in SAMPLE_DELTAS]
    split = {
        name: factor_affine_target(
            _quadratic_through(*(form.as_dict()[name] for form in forms))
        )
        for name in _FIELD_NAMES
    }
    boxes = tuple(
        EquivalentBox(
            marginal_a=(split["alpha"][i], split["beta"][i]),
            marginal_b=(split["gamma"][i], split["omega"][i]),
            correlator=(split["d1"][i], split["d2"][i], split["d3"][i], split["eps"][i]),
        )
        for i in (0, 1)
    )

    parity = parity_protocol(2, 2)
    max_dev = 0.0
    p00_dev = 0.0
    for delta in CERTIFICATE_DELTAS:
        concrete = []
        for built in boxes:
            candidate = built.box_at(delta)
            report = validate_box(candidate)
            if not report.valid:
                raise InvalidConstructedBox(
                    f"constructed box invalid at delta={delta:g}: {report.violations}"
                )
            concrete.append(candidate)
        rebuilt = apply_nonadaptive(concrete, parity)
        reference = _adaptive_output(proto, delta)
        gap = np.abs(rebuilt.p - reference.p)
        max_dev = max(max_dev, float(gap.max()))
        p00_dev = max(p00_dev, float(gap[:, 0].max()))

    return EquivalenceResult(
        boxes=boxes,
        factorization=factorization,
        certificate=EquivalenceCertificate(max_dev, p00_dev),
    )
