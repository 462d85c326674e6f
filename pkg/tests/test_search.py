"""Exhaustive-search, region-scan, and reference-table tests.

The searches are exact, so most expectations here are equalities at float
tolerance: closed-form values for named protocols, the proven input-free
characterization max_k |T_k|, and frozen reference numbers.
"""

import io
import math

import numpy as np
import pytest

from nlbd.boxes import box_from_correlators, chsh_value_of_box, make_named_box
from nlbd.errors import BudgetExceeded, InvalidBox, UnknownKind
from nlbd.fourier import parity_bound
from nlbd.search import (
    CC_COLLAPSE_THRESHOLD,
    CSV_HEADER,
    adaptive_search_max,
    enumerate_nonadaptive_max,
    format_table_report,
    region_scan,
    reproduce_tables,
)
from nlbd.wirings import (
    AdaptiveTwoCopyProtocol,
    AllcockParams,
    NonAdaptiveProtocol,
    apply_adaptive,
    apply_nonadaptive,
    bs_output_box,
    closed_form_values,
    symmetric_box,
)
from nlbd.xorboxes import MultipartiteXorBox, XorGame


def random_symmetric_params(rng):
    """Rejection-sample (alpha, beta, delta, eps) giving a valid box."""
    while True:
        alpha, beta = rng.uniform(-1, 1, 2)
        delta, eps = rng.uniform(-1, 1, 2)
        entries = [
            1 + 2 * alpha + delta, 1 - delta, 1 - 2 * alpha + delta,
            1 + alpha + beta + delta, 1 + alpha - beta - delta,
            1 - alpha + beta - delta, 1 - alpha - beta + delta,
            1 + 2 * beta + eps, 1 - eps, 1 - 2 * beta + eps,
        ]
        if min(entries) >= 0.0:
            return alpha, beta, delta, eps


def random_valid_box(rng):
    return box_from_correlators(symmetric_box(*random_symmetric_params(rng)))


def test_collapse_threshold_value():
    assert CC_COLLAPSE_THRESHOLD == pytest.approx(4 * math.sqrt(2 / 3), abs=1e-15)
    assert CC_COLLAPSE_THRESHOLD == pytest.approx(3.265986323710904, abs=1e-12)


def test_parity_is_input_free_optimum_on_chsh_deltas():
    xb = MultipartiteXorBox(XorGame.chsh(), (1.0, 1.0, 1.0, 0.3))
    r = enumerate_nonadaptive_max(xb, 2)
    assert r.best_value == pytest.approx(2.91, abs=1e-12)
    # the only achievers are parity on both sides and its double flip;
    # parity has the smaller packed encoding
    assert r.best_protocol == 0x6666
    assert r.protocols_examined == 256
    assert r.class_name == "nonadaptive-input-free"
    assert (r.n, r.m) == (2, 2)


def test_or_value_is_the_input_free_optimum_on_correlated_box():
    box = box_from_correlators(make_named_box("correlated", alpha=0.5, eps=0.01))
    r = enumerate_nonadaptive_max(box, 2)
    assert r.best_value == pytest.approx(3.239975, abs=1e-9)
    # canonical achiever is NOR on both sides (OR with both outputs
    # flipped, which preserves every correlator)
    assert r.best_protocol == 0x1111
    proto = NonAdaptiveProtocol.decode(2, 2, r.best_protocol)
    assert proto.is_input_free()
    assert chsh_value_of_box(apply_nonadaptive(box, proto)) == pytest.approx(
        r.best_value, abs=1e-12
    )


def test_single_copy_search_recovers_box_value():
    box = box_from_correlators(make_named_box("correlated", alpha=0.5, eps=0.01))
    r = enumerate_nonadaptive_max(box, 1)
    # identity and double-flip both give the box's own value 2.99; the
    # flip pair packs smaller
    assert r.best_value == pytest.approx(2.99, abs=1e-12)
    assert r.best_protocol == 0x55


def test_input_free_optimum_is_max_abs_tk():
    """Proven characterization: best over input-free protocols = max_k |T_k|.

    T_k = sum_x (-1)^f(x) delta_x^k, 0 <= k <= m (k = 0 is the constant
    protocol, k >= 1 parity over k of the m copies, up to output flips).
    """
    rng = np.random.default_rng(11)
    for n, m, trials in ((2, 1, 30), (2, 2, 30), (2, 3, 10), (3, 1, 10), (3, 2, 10)):
        game = XorGame.chsh() if n == 2 else XorGame.from_predicate(
            3, lambda bits: (bits[0] & bits[1]) ^ bits[2]
        )
        for _ in range(trials):
            d = rng.uniform(-1, 1, 1 << n)
            xb = MultipartiteXorBox(game, tuple(d))
            signs = game.signs()
            expect = max(abs(float(signs @ d**k)) for k in range(m + 1))
            r = enumerate_nonadaptive_max(xb, m)
            assert r.best_value == pytest.approx(expect, abs=1e-9), (n, m, d)


def test_parity_bound_attained_in_distillation_regime():
    """Where |T_1| exceeds |T_0|, the class optimum equals the k>=1 bound."""
    rng = np.random.default_rng(23)
    game = XorGame.chsh()
    for _ in range(40):
        u = rng.uniform(0.55, 1.0, 4)
        d = tuple(s * ui for s, ui in zip((1, 1, 1, -1), u))
        xb = MultipartiteXorBox(game, d)
        bound = parity_bound(game, d, 2)
        r = enumerate_nonadaptive_max(xb, 2)
        assert r.best_value <= bound.value + 1e-9
        assert r.best_value == pytest.approx(bound.value, abs=1e-9)


def test_input_dependent_at_least_input_free():
    rng = np.random.default_rng(5)
    for _ in range(15):
        box = random_valid_box(rng)
        free = enumerate_nonadaptive_max(box, 2)
        dep = enumerate_nonadaptive_max(box, 2, input_dependent=True)
        assert dep.best_value >= free.best_value - 1e-12
        assert dep.class_name == "nonadaptive-input-dep"
        assert dep.protocols_examined == 65536


def test_input_dependent_packing_and_replay():
    box = box_from_correlators(symmetric_box(0.05, 0.05, 0.9, 0.1))
    r = enumerate_nonadaptive_max(box, 3, input_dependent=True)
    assert r.protocols_examined == 1 << 32
    proto = NonAdaptiveProtocol.decode(2, 3, r.best_protocol)
    assert chsh_value_of_box(apply_nonadaptive(box, proto)) == pytest.approx(
        r.best_value, abs=1e-9
    )
    # this box gains nothing over using copy 1 as-is
    assert r.best_value == pytest.approx(3 * 0.9 - 0.1, abs=1e-12)


def test_exact_mode_certifies_float_search():
    rng = np.random.default_rng(17)
    for m in (1, 2):
        for _ in range(5):
            box = random_valid_box(rng)
            floatr = enumerate_nonadaptive_max(box, m)
            exactr = enumerate_nonadaptive_max(box, m, exact=True)
            assert exactr.best_exact is not None
            assert float(exactr.best_exact) == exactr.best_value
            assert exactr.best_value == pytest.approx(floatr.best_value, abs=1e-12)
            assert exactr.best_protocol == floatr.best_protocol


def test_exact_mode_rejects_unsupported_classes():
    box = box_from_correlators(make_named_box("isotropic", delta=1.0))
    with pytest.raises(ValueError):
        enumerate_nonadaptive_max(box, 3, exact=True)
    with pytest.raises(ValueError):
        enumerate_nonadaptive_max(box, 2, input_dependent=True, exact=True)


def test_search_budgets():
    box = box_from_correlators(make_named_box("isotropic", delta=1.0))
    with pytest.raises(BudgetExceeded):
        enumerate_nonadaptive_max(box, 4)
    xb4 = MultipartiteXorBox(
        XorGame.from_predicate(4, lambda bits: all(bits)), (0.5,) * 16
    )
    with pytest.raises(BudgetExceeded):
        enumerate_nonadaptive_max(xb4, 2)
    xb3 = MultipartiteXorBox(
        XorGame.from_predicate(3, lambda bits: all(bits)), (0.5,) * 8
    )
    with pytest.raises(BudgetExceeded):
        enumerate_nonadaptive_max(xb3, 1, input_dependent=True)


def test_search_rejects_invalid_box():
    bad = box_from_correlators(symmetric_box(0.3, 0.1, 0.9, -0.2))
    with pytest.raises(InvalidBox):
        enumerate_nonadaptive_max(bad, 2)
    with pytest.raises(InvalidBox):
        adaptive_search_max(bad)


def test_adaptive_search_reference_boxes():
    expectations = (
        (1.0, -0.70, 3.8275),
        (0.92, -0.22, 2.9867),
        (0.917, -0.22, 2.9710),  # plain identity is the class optimum here
    )
    for delta, eps, value in expectations:
        box = box_from_correlators(symmetric_box(0.0, 0.0, delta, eps))
        r = adaptive_search_max(box)
        assert r.best_value == pytest.approx(value, abs=1e-9), (delta, eps)
        assert r.class_name == "adaptive2"
        assert r.protocols_examined == 4096 * 4096
        proto = AdaptiveTwoCopyProtocol.decode(r.best_protocol)
        assert chsh_value_of_box(apply_adaptive(box, box, proto)) == pytest.approx(
            r.best_value, abs=1e-9
        )


def test_adaptive_search_dominates_named_wirings():
    rng = np.random.default_rng(3)
    for _ in range(6):
        box = random_valid_box(rng)
        r = adaptive_search_max(box)
        assert r.best_value >= chsh_value_of_box(box) - 1e-12
    for delta in (0.75, 0.9):
        box = box_from_correlators(make_named_box("isotropic", delta=delta))
        r = adaptive_search_max(box)
        assert r.best_value >= chsh_value_of_box(bs_output_box(delta)) - 1e-12


def test_adaptive_uniform_box_reaches_only_local_bound():
    # constant wirings output deterministically, so the best value over the
    # class on the uniform box is the local bound 2, achieved at encoding 0
    box = box_from_correlators(symmetric_box(0.0, 0.0, 0.0, 0.0))
    r = adaptive_search_max(box)
    assert r.best_value == pytest.approx(2.0, abs=1e-12)
    assert r.best_protocol == 0


def test_searches_deterministic_across_threads():
    box = box_from_correlators(symmetric_box(0.05, 0.05, 0.9, 0.1))
    base_dep = enumerate_nonadaptive_max(box, 3, input_dependent=True, threads=1)
    base_free = enumerate_nonadaptive_max(box, 3, threads=1)
    base_ad = adaptive_search_max(box, threads=1)
    for threads in (4, 8):
        dep = enumerate_nonadaptive_max(box, 3, input_dependent=True, threads=threads)
        free = enumerate_nonadaptive_max(box, 3, threads=threads)
        ad = adaptive_search_max(box, threads=threads)
        assert (dep.best_value, dep.best_protocol) == (
            base_dep.best_value, base_dep.best_protocol)
        assert (free.best_value, free.best_protocol) == (
            base_free.best_value, base_free.best_protocol)
        assert (ad.best_value, ad.best_protocol) == (
            base_ad.best_value, base_ad.best_protocol)


def test_region_scan_or_window_at_alpha_half():
    scan = region_scan({"alpha": 0.5, "delta": 1.0, "eps": (-0.10, 0.40, 0.0005)})
    eps = scan.column("eps")
    mask = (scan.column("winner") == "OR") & scan.column("valid")
    assert abs(eps[mask].min() - 0.0) < 1e-9
    assert abs(eps[mask].max() - 1 / 3) < 1e-3
    # below the validity bound eps = 2 alpha - 1 = 0 every cell is invalid
    assert not scan.column("valid")[eps < -1e-9].any()


def test_region_scan_parity_wins_on_trivial_marginals():
    scan = region_scan({"alpha": 0.0, "delta": 1.0, "eps": (-0.495, 0.895, 0.01)})
    eps = scan.column("eps")
    winner = scan.column("winner")
    assert scan.column("valid").all()
    assert (winner[eps > 0] == "PARITY").all()
    assert (winner[eps < 0] == "none").all()


def test_region_scan_columns_match_closed_forms():
    rng = np.random.default_rng(29)
    scan = region_scan(
        {
            "alpha": (0.0, 0.2, 0.05),
            "beta": (0.0, 0.3, 0.1),
            "delta": (0.5, 0.9, 0.2),
            "eps": (-0.2, 0.2, 0.1),
        }
    )
    assert len(scan) == 5 * 4 * 3 * 5
    idx = rng.integers(0, len(scan), 40)
    for i in idx:
        row = scan[int(i)]
        forms = closed_form_values(row.alpha, row.beta, row.delta, row.eps)
        assert row.V_OR == pytest.approx(forms.v_or, abs=1e-12)
        assert row.V == pytest.approx(3 * row.delta - row.eps, abs=1e-12)
        assert row.V_parity == pytest.approx(
            3 * row.delta**2 - row.eps**2, abs=1e-12
        )
        # default free-parameter combination is -2 alpha
        with_default = closed_form_values(
            row.alpha, row.beta, row.delta, row.eps, AllcockParams(a=2 * row.alpha)
        )
        assert row.V_A_fit == pytest.approx(with_default.v_a, abs=1e-12)


def test_region_scan_allcock_parameter_forms():
    grid = {"alpha": (0.2, 0.4, 0.1), "delta": 0.9, "eps": 0.05}
    fixed = AllcockParams(a=0.1, b=0.3, d=-0.05)
    scan_fixed = region_scan(grid, allcock=fixed)
    for row in scan_fixed:
        assert row.V_A_fit == pytest.approx(
            closed_form_values(row.alpha, row.beta, row.delta, row.eps, fixed).v_a,
            abs=1e-12,
        )
    scan_callable = region_scan(
        grid, allcock=lambda a, b, d, e: AllcockParams(b=a / 2)
    )
    for row in scan_callable:
        assert row.V_A_fit == pytest.approx(
            closed_form_values(
                row.alpha, row.beta, row.delta, row.eps, AllcockParams(b=row.alpha / 2)
            ).v_a,
            abs=1e-12,
        )


def test_region_scan_collapse_flag_requires_validity():
    scan = region_scan({"alpha": 0.5, "delta": 1.0, "eps": -0.1})
    row = scan[0]
    assert not row.valid and row.V_OR > CC_COLLAPSE_THRESHOLD
    assert not row.collapses_cc
    scan2 = region_scan({"alpha": 0.42, "delta": 0.99, "eps": -0.16})
    row2 = scan2[0]
    assert row2.valid and row2.V_OR > CC_COLLAPSE_THRESHOLD
    assert row2.collapses_cc
    assert row2.winner == "OR"


def test_region_scan_winner_can_be_adaptive_label():
    scan = region_scan(
        {"alpha": 0.26, "delta": 1.0, "eps": 0.01}, protocols=("PARITY", "OR", "A")
    )
    assert scan[0].winner == "A"


def test_region_scan_csv_format():
    scan = region_scan({"alpha": 0.5, "delta": 1.0, "eps": (0.0, 0.01, 0.005)})
    text = scan.to_csv()
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + len(scan)
    fields = lines[1].split(",")
    assert len(fields) == 11
    assert fields[4] in ("true", "false") and fields[10] in ("true", "false")
    buf = io.StringIO()
    scan.write_csv(buf)
    assert buf.getvalue() == text


def test_region_scan_errors():
    with pytest.raises(UnknownKind):
        region_scan({"alpha": 0.5, "delta": 1.0, "eps": 0.0}, protocols=("XOR",))
    with pytest.raises(ValueError):
        region_scan({"alpha": 0.5, "eps": 0.0})
    with pytest.raises(BudgetExceeded):
        region_scan(
            {"alpha": (0.0, 1.0, 1e-4), "delta": 1.0, "eps": (-1.0, 1.0, 1e-4)}
        )


def test_region_scan_deterministic_across_threads():
    grid = {"alpha": (0.25, 0.75, 0.002), "delta": 1.0, "eps": (-0.5, 0.5, 0.002)}
    base = region_scan(grid, threads=1)
    for threads in (4, 8):
        scan = region_scan(grid, threads=threads)
        for name in ("V", "V_parity", "V_OR", "V_A_fit"):
            assert (scan.column(name) == base.column(name)).all()
        for name in ("valid", "winner", "collapses_cc"):
            assert (scan.column(name) == base.column(name)).all()


def test_reference_table_one():
    rep = reproduce_tables(1)
    assert len(rep.checks) == 12
    assert rep.mismatches == ()
    assert rep.fitted_combinations[0] == pytest.approx(0.02, abs=1e-9)
    assert rep.fitted_combinations[1] == pytest.approx(0.0, abs=1e-9)


def test_reference_table_two():
    rep = reproduce_tables(2)
    assert len(rep.checks) == 36
    assert rep.mismatches == ()
    for comb, row in zip(rep.fitted_combinations, rep.printed_rows):
        # fitted combination tracks -2 alpha up to the printing precision:
        # a V_A rounding of 1e-4 moves the fit by 4e-4/(delta - eps)
        assert comb == pytest.approx(-2 * float(row[2]), abs=5e-4)


def test_reference_table_three_flags_only_the_parity_column():
    rep = reproduce_tables(3)
    assert [(c.row, c.column) for c in rep.mismatches] == [
        (i, "V_parity") for i in range(7)
    ]
    for check in rep.checks:
        if check.column != "V_parity":
            assert check.matches, check
    for comb, row in zip(rep.fitted_combinations, rep.printed_rows):
        assert comb == pytest.approx(-2 * float(row[0]), abs=1e-9)
    report = format_table_report(rep)
    assert report.count("[DIFF]") == 7
    assert "mismatches: 7" in report


def test_reference_table_audit_adds_search_column():
    rep = reproduce_tables(1, audit_adaptive=True)
    values = [row["V_search"] for row in rep.computed_rows]
    assert values[1] == pytest.approx(3.8275, abs=1e-9)
    assert values[3] == pytest.approx(2.9867, abs=1e-9)
    assert values[5] == pytest.approx(2.9710, abs=1e-9)
    # identical boxes share one search, the free parameters do not matter
    assert values[0] == values[1]
    report = format_table_report(rep)
    assert "adaptive-class search maximum" in report


def test_reference_table_unknown_index():
    with pytest.raises(UnknownKind):
        reproduce_tables(4)
