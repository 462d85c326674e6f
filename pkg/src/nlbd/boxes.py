"""Bipartite no-signalling boxes in probability and correlator/marginal form.

Conventions used throughout the package:

* Inputs and outputs are bits. Joint inputs ``xy`` and joint outputs ``ab``
  are always ordered ``00, 01, 10, 11``.
* A box is the 4x4 row-stochastic array ``p[xy, ab] = p(ab | xy)``.
* The correlator form carries the four local marginal biases and the four
  correlators of a box:

  - ``alpha = E(x=0)``, ``beta = E(x=1)``: Alice's marginal bias
    ``E_x = p(a=0|x) - p(a=1|x)``,
  - ``gamma = E(y=0)``, ``omega = E(y=1)``: same for Bob,
  - ``d1, d2, d3, eps``: correlators ``E_xy = E[(-1)^(a xor b)]`` on inputs
    ``00, 01, 10, 11``.

  The two forms are linked by the exact decomposition

  ``p(ab|xy) = (1 + (-1)^a E_x + (-1)^b E_y + (-1)^(a xor b) E_xy) / 4``

  which row-normalizes identically for any parameter values; validity
  (entrywise nonnegativity) is a separate, explicit check.
* The CHSH value of a box is ``V = d1 + d2 + d3 - eps``, i.e. the XOR-game
  value for the AND predicate, where a positive correlator is a bias toward
  equal outputs. The PR box ``(d1,d2,d3,eps) = (1,1,1,-1)`` attains V = 4.

Construction is total: building a box or a correlator form never validates.
Every operation that consumes a box as a probability object validates first
(callers that want report-style behavior use :func:`validate_box` directly).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBox, UnknownKind

INPUT_ORDER = ("00", "01", "10", "11")
OUTPUT_ORDER = ("00", "01", "10", "11")

# Default tolerances: 1e-9 for validity checks, 1e-12 for algebraic identities.
VALIDITY_TOL = 1e-9
ALGEBRA_TOL = 1e-12


@dataclass(frozen=True)
class CorrelatorForm:
    """Marginal biases and correlators of a bipartite box.

    Fields are plain reals in [-1, 1]. A CorrelatorForm may describe an
    invalid box (some induced probability negative); use
    :func:`validate_box` on the induced box to check.
    """

    alpha: float
    beta: float
    gamma: float
    omega: float
    d1: float
    d2: float
    d3: float
    eps: float

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            v = float(value)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"CorrelatorForm field {name}={v} outside [-1, 1]")

    def as_dict(self) -> dict[str, float]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "omega": self.omega,
            "d1": self.d1,
            "d2": self.d2,
            "d3": self.d3,
            "eps": self.eps,
        }

    def marginals_a(self) -> np.ndarray:
        """Alice's marginal bias per input x, shape (2,)."""
        return np.array([self.alpha, self.beta], dtype=float)

    def marginals_b(self) -> np.ndarray:
        """Bob's marginal bias per input y, shape (2,)."""
        return np.array([self.gamma, self.omega], dtype=float)

    def correlators(self) -> np.ndarray:
        """Correlators per joint input in INPUT_ORDER, shape (4,)."""
        return np.array([self.d1, self.d2, self.d3, self.eps], dtype=float)


class BipartiteBox:
    """A 4x4 conditional distribution p(ab|xy), the ground-truth representation.

    Rows are joint inputs, columns joint outputs, both in order 00,01,10,11.
    The array is copied and frozen at construction; instances are safe to
    share across threads.
    """

    __slots__ = ("p",)

    def __init__(self, p: np.ndarray) -> None:
        arr = np.array(p, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError(f"box array must be 4x4, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("BipartiteBox is immutable")

    def __repr__(self) -> str:
        rows = "; ".join(
            f"{xy}->({', '.join(f'{v:.6g}' for v in self.p[i])})"
            for i, xy in enumerate(INPUT_ORDER)
        )
        return f"BipartiteBox({rows})"

    def __eq__(self, other) -> bool:
        return isinstance(other, BipartiteBox) and np.array_equal(self.p, other.p)

    def __hash__(self) -> int:
        return hash(self.p.tobytes())


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_box: valid iff violations is empty.

    Each violation is a (constraint-name, magnitude) pair; magnitude is the
    size of the worst breach of that constraint.
    """

    valid: bool
    violations: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        assert self.valid == (len(self.violations) == 0)


# Sign tables for the decomposition: SIGN_A[ab] = (-1)^a etc.
_SIGN_A = np.array([+1, +1, -1, -1], dtype=float)
_SIGN_B = np.array([+1, -1, +1, -1], dtype=float)
_SIGN_AB = _SIGN_A * _SIGN_B


def box_from_correlators(c: CorrelatorForm) -> BipartiteBox:
    """Build the box induced by a correlator form via the exact decomposition.

    Total: the result may have negative entries; callers validate.
    """
    ea = c.marginals_a()  # indexed by x
    eb = c.marginals_b()  # indexed by y
    exy = c.correlators()  # indexed by joint input
    p = np.empty((4, 4))
    for row in range(4):
        x, y = row >> 1, row & 1
        p[row] = (1.0 + _SIGN_A * ea[x] + _SIGN_B * eb[y] + _SIGN_AB * exy[row]) / 4.0
    return BipartiteBox(p)


def correlators_from_box(b: BipartiteBox, tol: float = VALIDITY_TOL) -> CorrelatorForm:
    """Exact inverse of box_from_correlators; validates the box first.

    Raises InvalidBox when validation fails. Marginals are read off the
    no-signalling-averaged rows so the roundtrip is exact to 1e-12 even in
    the presence of tolerance-level noise.
    """
    report = validate_box(b, tol)
    if not report.valid:
        raise InvalidBox(f"cannot extract correlators: {report.violations}")
    p = b.p
    # Alice's marginal bias per x: average over Bob's input (equal by no-signalling).
    ea = [
        float(np.mean([p[(x << 1) | y] @ _SIGN_A for y in (0, 1)])) for x in (0, 1)
    ]
    eb = [
        float(np.mean([p[(x << 1) | y] @ _SIGN_B for x in (0, 1)])) for y in (0, 1)
    ]
    exy = [float(p[row] @ _SIGN_AB) for row in range(4)]
    clip = lambda v: float(min(1.0, max(-1.0, v)))  # noqa: E731  guard tol-level overshoot
    return CorrelatorForm(
        alpha=clip(ea[0]),
        beta=clip(ea[1]),
        gamma=clip(eb[0]),
        omega=clip(eb[1]),
        d1=clip(exy[0]),
        d2=clip(exy[1]),
        d3=clip(exy[2]),
        eps=clip(exy[3]),
    )


def validate_box(b: BipartiteBox, tol: float = VALIDITY_TOL) -> ValidationReport:
    """Report every violated box constraint with its magnitude.

    Checks, in order: entrywise nonnegativity (>= -tol), row normalization
    (sum 1 within tol), and no-signalling in both directions (each player's
    output marginal independent of the other player's input, within tol).
    """
    p = b.p
    violations: list[tuple[str, float]] = []

    neg = float(-(p.min()))
    if neg > tol:
        violations.append(("negativity", neg))

    norm = float(np.abs(p.sum(axis=1) - 1.0).max())
    if norm > tol:
        violations.append(("normalization", norm))

    # Alice's marginal p(a|x) must not depend on y: compare y=0 vs y=1 rows.
    # p(a=0|xy) = p[row,0] + p[row,1]; p(a=1|xy) = p[row,2] + p[row,3].
    sig_a = 0.0
    for x in (0, 1):
        r0, r1 = p[(x << 1) | 0], p[(x << 1) | 1]
        sig_a = max(sig_a, abs((r0[0] + r0[1]) - (r1[0] + r1[1])))
        sig_a = max(sig_a, abs((r0[2] + r0[3]) - (r1[2] + r1[3])))
    if sig_a > tol:
        violations.append(("no-signalling-to-alice", float(sig_a)))

    sig_b = 0.0
    for y in (0, 1):
        r0, r1 = p[(0 << 1) | y], p[(1 << 1) | y]
        sig_b = max(sig_b, abs((r0[0] + r0[2]) - (r1[0] + r1[2])))
        sig_b = max(sig_b, abs((r0[1] + r0[3]) - (r1[1] + r1[3])))
    if sig_b > tol:
        violations.append(("no-signalling-to-bob", float(sig_b)))

    return ValidationReport(valid=not violations, violations=tuple(violations))


def chsh_value(c: CorrelatorForm) -> float:
    """CHSH value V = d1 + d2 + d3 - eps. Independent of the marginals."""
    return c.d1 + c.d2 + c.d3 - c.eps


def chsh_value_of_box(b: BipartiteBox, tol: float = VALIDITY_TOL) -> float:
    """CHSH value computed from a probability box (validates first)."""
    return chsh_value(correlators_from_box(b, tol))


def make_named_box(kind: str, **params: float) -> CorrelatorForm:
    """Construct one of the named box families.

    kind and parameters:

    * ``isotropic(delta)``: trivial marginals, correlators
      ``(delta, delta, delta, -delta)``; value 4*delta.
    * ``correlated(alpha, eps)``: all four marginals ``alpha``, correlators
      ``(1, 1, 1, eps)``. The binding validity constraint for ``alpha >= 0``
      is ``p(11|11) = (1 - 2 alpha + eps)/4 >= 0``, i.e. ``eps >= 2 alpha - 1``.
    * ``symmetric(alpha, beta, delta, eps)``: marginals
      ``alpha = gamma``, ``beta = omega``, correlators
      ``(delta, delta, delta, eps)``.
    * ``general(alpha, beta, gamma, omega, d1, d2, d3, eps)``: all eight.

    Raises UnknownKind for anything else. Construction never validates.
    """
    try:
        if kind == "isotropic":
            d = float(params.pop("delta"))
            _reject_extra(kind, params)
            return CorrelatorForm(0.0, 0.0, 0.0, 0.0, d, d, d, -d)
        if kind == "correlated":
            a = float(params.pop("alpha"))
            e = float(params.pop("eps"))
            _reject_extra(kind, params)
            return CorrelatorForm(a, a, a, a, 1.0, 1.0, 1.0, e)
        if kind == "symmetric":
            a = float(params.pop("alpha"))
            b = float(params.pop("beta"))
            d = float(params.pop("delta"))
            e = float(params.pop("eps"))
            _reject_extra(kind, params)
            return CorrelatorForm(a, b, a, b, d, d, d, e)
        if kind == "general":
            return CorrelatorForm(
                float(params.pop("alpha")),
                float(params.pop("beta")),
                float(params.pop("gamma")),
                float(params.pop("omega")),
                float(params.pop("d1")),
                float(params.pop("d2")),
                float(params.pop("d3")),
                float(params.pop("eps")),
            )
    except KeyError as missing:
        raise UnknownKind(f"{kind} box is missing parameter {missing}") from None
    raise UnknownKind(f"unknown box kind {kind!r}")


def _reject_extra(kind: str, leftover: dict[str, float]) -> None:
    if leftover:
        raise UnknownKind(f"{kind} box got unexpected parameters {sorted(leftover)}")
