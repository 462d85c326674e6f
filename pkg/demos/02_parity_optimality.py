#!/usr/bin/env python3
"""Parity distillation of trivial-marginal boxes, and why it is optimal.

For boxes whose single-player outputs are unbiased, an XOR-game box is
fully described by one even-parity bias delta_x per input. Wiring m
independent copies with the parity protocol (each player outputs the XOR
of her m box outputs) multiplies the biases: the distilled box has biases
delta_x^m, so the game value is sum_x (-1)^f(x) delta_x^m, in closed form.

No input-free non-adaptive protocol does better. Writing each player's
output table in the character basis turns the protocol value into a
weighted sum of the parity values over k = 0..m copies (k = 0 is the
box-free constant strategy); Parseval caps the weights, so the best value
is max_k |T_k| whenever that dominates |T_0|. The exhaustive search
reproduces this bound exactly.
"""

import numpy as np

from nlbd import (
    MultipartiteXorBox,
    XorGame,
    enumerate_nonadaptive_max,
    parity_bound,
    parity_distill_value,
    simulate_parity,
    xor_value,
)

chsh = XorGame.chsh()
iso = MultipartiteXorBox(chsh, (0.9, 0.9, 0.9, -0.9))
print("== parity on the isotropic box, closed form vs enumeration ==")
print("m   closed form     enumeration")
for m in (1, 2, 3, 4):
    closed = parity_distill_value(iso, m)
    enumerated = xor_value(simulate_parity(iso, m))
    print(f"{m}   {closed:<14.10g}  {enumerated:.10g}")
print("(the value only degrades: |delta| <= 1 makes delta^m shrink,")
print(" which is why parity never distills an isotropic box)")

print()
print("== the parity bound is attained by the exhaustive search ==")
rng = np.random.default_rng(42)
print("n  m  bound (k)        search max       protocols")
for n, m in ((2, 2), (2, 3), (3, 2)):
    while True:
        game = XorGame(n, tuple(int(b) for b in rng.integers(0, 2, size=1 << n)))
        delta = tuple(float(d) for d in rng.uniform(-1, 1, size=1 << n))
        box = MultipartiteXorBox(game, delta)
        bound = parity_bound(game, delta, m)
        if bound.value >= abs(float(game.signs().sum())):
            break  # distillation regime: the bound dominates box-free play
    result = enumerate_nonadaptive_max(box, m)
    print(
        f"{n}  {m}  {bound.value:<12.10g} ({bound.k})  "
        f"{result.best_value:<15.10g}  {result.protocols_examined}"
    )

print()
print("== a three-player example ==")
majority = XorGame.from_predicate(3, lambda bits: int(sum(bits) >= 2))
aligned = MultipartiteXorBox(majority, tuple(0.95 if f == 0 else -0.95 for f in majority.f))
print(f"game truth table: {majority.f}")
print(f"undistilled value: {xor_value(aligned):.10g}")
for m in (2, 3, 4):
    print(f"parity over {m} copies: {parity_distill_value(aligned, m):.10g}")
print("(this game is balanced, so even copy counts cancel the aligned")
print(" biases and odd ones keep them; the bound tracks the best k)")
print(f"parity bound over m <= 4: {parity_bound(majority, aligned.delta, 4)}")
