#!/usr/bin/env python3
"""Where the OR wiring beats parity: boxes with nontrivial marginals.

Parity distillation ignores single-player marginals, and on boxes that
have them it pays a price. On the correlated family (all marginals
alpha, correlators (1, 1, 1, eps)) the two-copy parity value is stuck
near the undistilled value, while the OR wiring (both players output
the OR of their two box outputs) converts marginal bias into game value.

This demo locates the advantage region with a grid scan, checks the
closed forms against exact simulation, and shows a symmetric-family
point whose distilled value crosses the threshold 4*sqrt(2/3) above
which every bipartite box makes communication complexity trivial.
"""

import math

from nlbd import (
    CC_COLLAPSE_THRESHOLD,
    apply_nonadaptive,
    box_from_correlators,
    chsh_value_of_box,
    closed_form_values,
    format_table_report,
    make_named_box,
    or_protocol,
    parity_protocol,
    region_scan,
    reproduce_tables,
    symmetric_box,
)

print("== two wirings on the correlated box (alpha=0.5, eps=0.01) ==")
form = make_named_box("correlated", alpha=0.5, eps=0.01)
box = box_from_correlators(form)
v = chsh_value_of_box(box)
v_parity = chsh_value_of_box(apply_nonadaptive(box, parity_protocol(2, 2)))
v_or = chsh_value_of_box(apply_nonadaptive(box, or_protocol()))
print(f"undistilled value:  {v:.6f}")
print(f"parity, two copies: {v_parity:.6f}   (barely moves)")
print(f"OR, two copies:     {v_or:.6f}   (genuine distillation)")
closed = closed_form_values(0.5, 0.5, 1.0, 0.01)
print(f"closed form for OR: {closed.v_or:.6f}   (matches the simulation)")

print()
print("== where each wiring wins (eps = 0.01, delta = 1) ==")
scan = region_scan({"alpha": (0.0, 0.5, 0.01), "eps": 0.01, "delta": 1.0})
winner = scan.column("winner")
valid = scan.column("valid")
alphas = scan.column("alpha")
or_cells = (winner == "OR") & valid
parity_cells = (winner == "PARITY") & valid
print(f"grid points: {len(alphas)}  (PARITY wins {int(parity_cells.sum())}, "
      f"OR wins {int(or_cells.sum())})")
print(f"OR takes over at alpha = {float(alphas[or_cells].min()):.2f}")

print()
print("== the OR window in eps at alpha = 0.35 ==")
scan = region_scan({"alpha": 0.35, "eps": (-0.40, 0.40, 0.005), "delta": 1.0})
or_cells = (scan.column("winner") == "OR") & scan.column("valid")
eps = scan.column("eps")[or_cells]
print(f"OR wins for eps in [{float(eps.min()):.3f}, {float(eps.max()):.3f}]")
print(f"lower edge is the validity boundary eps >= 2*alpha - 1 = {2 * 0.35 - 1:.2f}:")
print("below it the correlated box stops being a probability table.")

print()
print("== reference values for the correlated family ==")
print(format_table_report(reproduce_tables(2)))

print()
print("== a published parity column that does not recompute ==")
report = reproduce_tables(3)
print(f"table 3: {len(report.mismatches)} of {len(report.checks)} checks differ, "
      f"all in the V_parity column:")
for check in report.mismatches:
    row = report.printed_rows[check.row]
    delta, eps = float(row[1]), float(row[2])
    formula = 3 * delta**2 - eps**2
    print(f"  row {check.row}: printed {check.printed}  recomputed {check.computed:.4f}"
          f"  = 3*delta^2 - eps^2 = {formula:.4f}")
print("the recomputed column agrees with the independent closed form,")
print("so the exact simulation is self-consistent on every row.")

print()
print("== crossing the communication-complexity threshold ==")
witness = symmetric_box(0.42, 0.42, 0.99, -0.16)
wbox = box_from_correlators(witness)
v = chsh_value_of_box(wbox)
v_or = chsh_value_of_box(apply_nonadaptive(wbox, or_protocol()))
print(f"symmetric box (alpha=beta=0.42, delta=0.99, eps=-0.16)")
print(f"undistilled value: {v:.4f}  (below threshold)")
print(f"OR, two copies:    {v_or:.6f}")
print(f"threshold:         {CC_COLLAPSE_THRESHOLD:.6f}  (= 4*sqrt(2/3) = "
      f"{4 * math.sqrt(2 / 3):.6f})")
print(f"distilled box collapses communication complexity: {v_or > CC_COLLAPSE_THRESHOLD}")
