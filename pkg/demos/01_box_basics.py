#!/usr/bin/env python3
"""Boxes in two representations, validation, and the file format.

A bipartite no-signalling box is a conditional distribution p(ab|xy) over
one output bit per player given one input bit per player. The package
stores it either as a 4x4 probability table (rows indexed by the joint
input xy, columns by the joint output ab) or as eight expectations: two
marginal biases per player and one correlator per joint input. The two
representations convert exactly in both directions.
"""

from nlbd import (
    box_from_correlators,
    chsh_value_of_box,
    correlators_from_box,
    format_box_correlators,
    format_box_matrix,
    make_named_box,
    parse_box_text,
    validate_box,
)

print("== named families ==")
for label, form in [
    ("extremal (wins every round)", make_named_box("isotropic", delta=1.0)),
    ("isotropic delta=0.9", make_named_box("isotropic", delta=0.9)),
    ("correlated alpha=0.5 eps=0.01", make_named_box("correlated", alpha=0.5, eps=0.01)),
    ("symmetric (0.42, 0.42, 0.99, -0.16)",
     make_named_box("symmetric", alpha=0.42, beta=0.42, delta=0.99, eps=-0.16)),
]:
    box = box_from_correlators(form)
    report = validate_box(box)
    print(f"{label}: valid={report.valid}  V={chsh_value_of_box(box):.6g}")

print()
print("== probability table of the correlated box ==")
correlated = box_from_correlators(make_named_box("correlated", alpha=0.5, eps=0.01))
print(format_box_matrix(correlated), end="")

print()
print("== exact round-trip ==")
back = correlators_from_box(correlated)
print("correlators recovered from the table:")
print(format_box_correlators(back), end="")

print()
print("== not every correlator combination is a box ==")
negative = box_from_correlators(make_named_box("correlated", alpha=0.5, eps=-0.1))
report = validate_box(negative)
print(f"alpha=0.5, eps=-0.1: valid={report.valid}, violations={report.violations}")
print(f"worst entry: {negative.p.min():.6g}")

print()
print("== the file format round-trips ==")
text = format_box_matrix(correlated)
reparsed = parse_box_text(text)
print(f"reparsed CHSH value: {chsh_value_of_box(reparsed):.12g}")
