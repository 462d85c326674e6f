"""Distillation wirings: non-adaptive and adaptive two-copy protocols.

A non-adaptive protocol for n players over m box copies queries every copy
with the player's original input bit and maps her m outcome bits to one
output bit through a per-input boolean table. The canonical integer encoding
packs the table bits player-major, then input-bit-major, then outcome index
ascending: the bit for (player j, own input v, outcome string s) sits at
position ``(j*2 + v) * 2^m + s``. Outcome strings are indexed with the first
copy's bit most significant.

An adaptive two-copy protocol queries box 1 with the original inputs; each
player computes her box-2 input from (own input, own box-1 output) and her
final output from (own input, box-1 output, box-2 output). Encoding per
player: 12 bits, box-2 input map at bits 0-3 (index ``v*2 + o1``), output
map at bits 4-11 (index ``v*4 + o1*2 + o2``); Alice occupies bits 0-11,
Bob bits 12-23.

Application is by exact enumeration of every intermediate outcome, so the
results are oracle-grade: apply_nonadaptive sums all 4^m joint outcomes per
input, apply_adaptive the 16 intermediate outcome combinations. Both assert
that the output passes box validation (local wirings cannot create
signalling).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boxes import BipartiteBox, CorrelatorForm, box_from_correlators, validate_box
from .errors import ArityMismatch, FormatError, InvalidBox


@dataclass(frozen=True)
class NonAdaptiveProtocol:
    """Per-player, per-own-input boolean output tables over m outcome bits.

    tables[j][v][s] is player j's output bit on outcome string s when her
    input bit is v.
    """

    n: int
    m: int
    tables: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        if self.n < 2 or self.m < 1:
            raise ValueError(f"need n >= 2, m >= 1; got n={self.n}, m={self.m}")
        if len(self.tables) != self.n:
            raise ValueError(f"need one table pair per player, got {len(self.tables)}")
        for pair in self.tables:
            if len(pair) != 2 or any(len(t) != 1 << self.m for t in pair):
                raise ValueError(f"each player needs two tables of 2^{self.m} bits")
            if any(bit not in (0, 1) for t in pair for bit in t):
                raise ValueError("table entries must be bits")

    @property
    def encoding_bits(self) -> int:
        return self.n * 2 * (1 << self.m)

    def encode(self) -> int:
        """Canonical packed-integer encoding (tie-break key for searches)."""
        packed = 0
        block = 1 << self.m
        for j in range(self.n):
            for v in (0, 1):
                offset = (j * 2 + v) * block
                for s, bit in enumerate(self.tables[j][v]):
                    packed |= bit << (offset + s)
        return packed

    @classmethod
    def decode(cls, n: int, m: int, packed: int) -> "NonAdaptiveProtocol":
        block = 1 << m
        if packed < 0 or packed >> (n * 2 * block):
            raise FormatError(f"encoding out of range for n={n}, m={m}: {packed}")
        tables = []
        for j in range(n):
            pair = []
            for v in (0, 1):
                offset = (j * 2 + v) * block
                pair.append(tuple((packed >> (offset + s)) & 1 for s in range(block)))
            tables.append((pair[0], pair[1]))
        return cls(n, m, tuple(tables))

    def is_input_free(self) -> bool:
        return all(pair[0] == pair[1] for pair in self.tables)


def parity_protocol(n: int, m: int) -> NonAdaptiveProtocol:
    """Every player outputs the XOR of her m outcome bits, input-independent."""
    table = tuple(bin(s).count("1") % 2 for s in range(1 << m))
    return NonAdaptiveProtocol(n, m, tuple(((table, table),) * n))


def or_protocol() -> NonAdaptiveProtocol:
    """Two players, two copies; each outputs the OR of her two bits."""
    table = tuple(1 if s else 0 for s in range(4))
    return NonAdaptiveProtocol(2, 2, ((table, table), (table, table)))


@dataclass(frozen=True)
class AdaptiveTwoCopyProtocol:
    """One-round adaptive wiring over two bipartite boxes.

    Per player: box2map[v*2 + o1] is the box-2 input bit, outmap[v*4 + o1*2
    + o2] the final output bit.
    """

    box2map_a: tuple[int, int, int, int]
    outmap_a: tuple[int, int, int, int, int, int, int, int]
    box2map_b: tuple[int, int, int, int]
    outmap_b: tuple[int, int, int, int, int, int, int, int]

    def __post_init__(self) -> None:
        for name in ("box2map_a", "box2map_b"):
            if any(bit not in (0, 1) for bit in getattr(self, name)):
                raise ValueError(f"{name} entries must be bits")
        for name in ("outmap_a", "outmap_b"):
            if any(bit not in (0, 1) for bit in getattr(self, name)):
                raise ValueError(f"{name} entries must be bits")

    def encode(self) -> int:
        return _encode_player(self.box2map_a, self.outmap_a) | (
            _encode_player(self.box2map_b, self.outmap_b) << 12
        )

    @classmethod
    def decode(cls, packed: int) -> "AdaptiveTwoCopyProtocol":
        if packed < 0 or packed >> 24:
            raise FormatError(f"adaptive encoding out of range: {packed}")
        b2a, outa = _decode_player(packed & 0xFFF)
        b2b, outb = _decode_player(packed >> 12)
        return cls(b2a, outa, b2b, outb)


def _encode_player(box2map: Sequence[int], outmap: Sequence[int]) -> int:
    block = 0
    for i, bit in enumerate(box2map):
        block |= bit << i
    for i, bit in enumerate(outmap):
        block |= bit << (4 + i)
    return block


def _decode_player(block: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    box2map = tuple((block >> i) & 1 for i in range(4))
    outmap = tuple((block >> (4 + i)) & 1 for i in range(8))
    return box2map, outmap


def identity_wiring() -> AdaptiveTwoCopyProtocol:
    """Box-2 input = own input, final output = box-1 output: returns box 1."""
    ident_b2 = (0, 0, 1, 1)  # u(v, o1) = v
    ident_out = (0, 0, 1, 1, 0, 0, 1, 1)  # F(v, o1, o2) = o1
    return AdaptiveTwoCopyProtocol(ident_b2, ident_out, ident_b2, ident_out)


def parity_as_adaptive() -> AdaptiveTwoCopyProtocol:
    """Box-2 input = own input, output = XOR of both box outputs."""
    ident_b2 = (0, 0, 1, 1)
    xor_out = (0, 1, 1, 0, 0, 1, 1, 0)  # F(v, o1, o2) = o1 xor o2
    return AdaptiveTwoCopyProtocol(ident_b2, xor_out, ident_b2, xor_out)


def bs_wiring() -> AdaptiveTwoCopyProtocol:
    """The two-copy wiring that distills isotropic boxes.

    Box-2 input = own input AND box-1 output; final output = XOR of both box
    outputs. On isotropic boxes it produces bs_output_box(delta).
    """
    and_b2 = (0, 0, 0, 1)  # u(v, o1) = v and o1
    xor_out = (0, 1, 1, 0, 0, 1, 1, 0)
    return AdaptiveTwoCopyProtocol(and_b2, xor_out, and_b2, xor_out)


@dataclass(frozen=True)
class AllcockParams:
    """Free marginal-like parameters (a, b, c, d) of the adaptive closed form.

    The closed form only uses the combination b - a + 2 d; no identification
    of a, b, c, d with the box marginals is asserted anywhere (the reference
    tables are consistent with more than one reading; see reproduce_tables,
    which reports the fitted combination per table row).
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"AllcockParams.{name}={v} outside [-1, 1]")

    @property
    def combination(self) -> float:
        return self.b - self.a + 2.0 * self.d


@dataclass(frozen=True)
class ClosedFormValues:
    """The three closed-form protocol values for a symmetric box."""

    v_or: float
    v_a: float
    v_orand: float


def _validated(b: BipartiteBox, tol: float = 1e-9) -> BipartiteBox:
    report = validate_box(b, tol)
    if not report.valid:
        raise InvalidBox(f"input box fails validation: {report.violations}")
    return b


def apply_nonadaptive(
    boxes: "BipartiteBox | Sequence[BipartiteBox]",
    proto: NonAdaptiveProtocol,
    tol: float = 1e-9,
) -> BipartiteBox:
    """Wire m (not necessarily identical) bipartite boxes non-adaptively.

    Every copy is queried with the original input pair; outcome weights are
    the exact products over copies, summed over all 4^m joint outcomes.
    """
    if proto.n != 2:
        raise ArityMismatch("bipartite wiring needs an n=2 protocol")
    if isinstance(boxes, BipartiteBox):
        box_list = [boxes] * proto.m
    else:
        box_list = list(boxes)
    if len(box_list) != proto.m:
        raise ArityMismatch(f"protocol expects {proto.m} boxes, got {len(box_list)}")
    for b in box_list:
        _validated(b, tol)

    size = 1 << proto.m
    g = [np.array(proto.tables[0][v], dtype=np.int64) for v in (0, 1)]
    h = [np.array(proto.tables[1][v], dtype=np.int64) for v in (0, 1)]
    out = np.zeros((4, 4))
    for row in range(4):
        x, y = row >> 1, row & 1
        # weight[sA, sB] = prod_c p_c(ac bc | xy), copies major-to-minor.
        weight = np.ones((1, 1))
        for b in box_list:
            pc = b.p[row].reshape(2, 2)  # pc[a, b]
            weight = np.einsum("AB,ab->AaBb", weight, pc).reshape(
                weight.shape[0] * 2, weight.shape[1] * 2
            )
        ga, hb = g[x], h[y]
        for a in (0, 1):
            mask_a = ga == a
            for bo in (0, 1):
                mask_b = hb == bo
                out[row, (a << 1) | bo] = weight[np.ix_(mask_a, mask_b)].sum()
        assert weight.shape == (size, size)
    result = BipartiteBox(out)
    report = validate_box(result, max(tol, 1e-9))
    assert report.valid, f"non-adaptive wiring produced an invalid box: {report.violations}"
    return result


def apply_adaptive(
    box1: BipartiteBox,
    box2: BipartiteBox,
    proto: AdaptiveTwoCopyProtocol,
    tol: float = 1e-9,
) -> BipartiteBox:
    """Wire two boxes adaptively, summing the 16 intermediate outcomes exactly."""
    _validated(box1, tol)
    _validated(box2, tol)
    out = np.zeros((4, 4))
    for row in range(4):
        x, y = row >> 1, row & 1
        for a1 in (0, 1):
            for b1 in (0, 1):
                w1 = box1.p[row, (a1 << 1) | b1]
                if w1 == 0.0:
                    continue
                u = proto.box2map_a[x * 2 + a1]
                v = proto.box2map_b[y * 2 + b1]
                row2 = (u << 1) | v
                for a2 in (0, 1):
                    for b2 in (0, 1):
                        w2 = box2.p[row2, (a2 << 1) | b2]
                        a = proto.outmap_a[x * 4 + a1 * 2 + a2]
                        b = proto.outmap_b[y * 4 + b1 * 2 + b2]
                        out[row, (a << 1) | b] += w1 * w2
    result = BipartiteBox(out)
    report = validate_box(result, max(tol, 1e-9))
    assert report.valid, f"adaptive wiring produced an invalid box: {report.violations}"
    return result


def bs_output_box(delta: float) -> BipartiteBox:
    """The distillate of bs_wiring on two isotropic boxes, as a literal matrix.

    Rows 00, 01, 10: (1+d^2, 1-d^2, 1-d^2, 1+d^2)/4; row 11:
    ((2-d^2-d)/2, (2+d^2+d)/2, (2+d^2+d)/2, (2-d^2-d)/2)/4.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    d2 = delta * delta
    plain = np.array([1 + d2, 1 - d2, 1 - d2, 1 + d2]) / 4.0
    last = np.array(
        [(2 - d2 - delta) / 2, (2 + d2 + delta) / 2, (2 + d2 + delta) / 2, (2 - d2 - delta) / 2]
    ) / 4.0
    return BipartiteBox(np.vstack([plain, plain, plain, last]))


def closed_form_values(
    alpha: float, beta: float, delta: float, eps: float, allcock: AllcockParams = AllcockParams()
) -> ClosedFormValues:
    """Evaluate the three closed-form two-copy values for a symmetric box.

    The box has marginals alpha (input 0) and beta (input 1) on both sides
    and correlators (delta, delta, delta, eps). The formulas are evaluated
    verbatim; they are meaningful on the symmetric family only.
    """
    x = allcock.combination
    v_or = (
        0.25 * (3 * delta**2 - eps**2)
        + 0.5 * (3 * delta - eps)
        + (beta + 2 * delta - 2) * alpha
        + (delta - eps) * beta
        - 0.5 * (alpha**2 + beta**2 - 1)
    )
    v_a = 0.25 * (
        11 * delta**2 + 2 * delta - 2 * eps * delta - 2 * eps - eps**2 + x * (delta - eps)
    )
    v_orand = (
        2 * alpha**2 + 0.25 * eps**2 - 0.5 * eps - 0.75 * delta**2 + 1.5 * delta - 0.5
    )
    return ClosedFormValues(v_or=v_or, v_a=v_a, v_orand=v_orand)


def apply_nonadaptive_xor(boxes, proto: NonAdaptiveProtocol) -> tuple[float, np.ndarray]:
    """n-player variant: wire parity-bias boxes, return (game value, biases).

    Thin adapter over the exact enumeration oracle in xorboxes; the protocol
    supplies the per-player, per-input output tables.
    """
    from .xorboxes import MultipartiteXorBox, simulate_nonadaptive_xor

    probe = boxes if isinstance(boxes, MultipartiteXorBox) else boxes[0]
    if probe.n != proto.n:
        raise ArityMismatch(f"protocol has n={proto.n}, boxes have n={probe.n}")
    tables = [
        [np.array(proto.tables[j][v], dtype=np.int64) for v in (0, 1)]
        for j in range(proto.n)
    ]
    return simulate_nonadaptive_xor(boxes, tables, proto.m)


def symmetric_box(alpha: float, beta: float, delta: float, eps: float) -> CorrelatorForm:
    """Correlator form of the symmetric family (alpha=gamma, beta=omega, d1=d2=d3)."""
    return CorrelatorForm(alpha, beta, alpha, beta, delta, delta, delta, eps)


def or_value_simulated(alpha: float, beta: float, delta: float, eps: float) -> float:
    """Simulated OR-protocol value on a symmetric box (exact enumeration)."""
    from .boxes import chsh_value_of_box

    box = box_from_correlators(symmetric_box(alpha, beta, delta, eps))
    return chsh_value_of_box(apply_nonadaptive(box, or_protocol()))
