"""Combinatorial structure: rectangles, monochromatic slices, separability."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ifcomp.info_core import (
    FunctionTable,
    JointPmf,
    and_function,
    binary_entropy,
    constant_function,
    dsbs,
    product_function,
    xor_function,
)
from ifcomp.structure_analysis import (
    Rectangle,
    classify_slices,
    han_kobayashi_condition,
    is_column_monochromatic,
    is_monochromatic,
    is_rectangle,
    is_row_monochromatic,
    no_nontrivial_column_rectangles,
    one_message_lower_bound,
    slice_structure_report,
    support,
    verify_w_decomposition,
)
from ifcomp.sum_rate import AuxChain, chain_joint


def test_support_and_rectangles():
    pmf = dsbs(0.3)
    cells = support(pmf)
    assert cells == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert is_rectangle(cells)
    assert is_rectangle(set())
    assert is_rectangle({(0, 0)})
    assert not is_rectangle({(0, 0), (1, 1)})
    assert not is_rectangle({(0, 0), (0, 1), (1, 0)})


def test_monochromatic_checks_on_and():
    f = and_function()
    full = Rectangle(frozenset({0, 1}), frozenset({0, 1}))
    assert not is_row_monochromatic(full, f)
    assert not is_column_monochromatic(full, f)
    assert not is_monochromatic(full, f)
    # fixing x = 0 kills the AND: constant in y, so the x side can compute it
    row0 = Rectangle(frozenset({0}), frozenset({0, 1}))
    assert is_row_monochromatic(row0, f)
    assert is_monochromatic(row0, f)
    # fixing y = 1 leaves AND = x: the y side cannot compute it from y alone
    col1 = Rectangle(frozenset({0, 1}), frozenset({1}))
    assert not is_column_monochromatic(col1, f)
    assert is_row_monochromatic(col1, f)  # single-cell rows


def test_separability_conditions():
    assert han_kobayashi_condition(and_function())
    assert han_kobayashi_condition(xor_function())
    assert not han_kobayashi_condition(constant_function((2, 2)))
    assert no_nontrivial_column_rectangles(product_function(4))
    # identity in x: every column separates, and the column rectangle
    # {0,1} x {y} is never monochromatic
    ident = FunctionTable((2, 2), 2, [0, 0, 1, 1])
    assert han_kobayashi_condition(ident)
    assert no_nontrivial_column_rectangles(ident)
    # a function ignoring x fails both
    ydep = FunctionTable((2, 2), 2, [0, 1, 0, 1])
    assert not han_kobayashi_condition(ydep)
    assert not no_nontrivial_column_rectangles(ydep)


def test_one_message_lower_bound_values():
    pmf = dsbs(0.3)
    ident = FunctionTable((2, 2), 2, [0, 0, 1, 1])
    assert one_message_lower_bound(pmf, ident) == pytest.approx(
        binary_entropy(0.3), abs=1e-12)
    # not applicable when the separation condition fails
    assert one_message_lower_bound(pmf, constant_function((2, 2))) is None
    # not applicable without full support
    sparse = JointPmf((2, 2), [0.5, 0.0, 0.0, 0.5])
    assert one_message_lower_bound(sparse, ident) is None


def test_classify_slices_tags():
    pmf = JointPmf((2, 2), [0.5, 0.0, 0.0, 0.5])
    out = classify_slices(pmf)
    assert list(out) == [()]
    assert out[()].tag == "other"
    assert not out[()].exact
    full = classify_slices(dsbs(0.3))[()]
    assert full.tag == "full"
    assert full.exact


def test_report_flags_infeasible_zero_message_slice():
    rep = slice_structure_report(dsbs(0.3), and_function(), and_function())
    assert rep["status"] == "ok"
    checks = {v["check"] for v in rep["violations"]}
    assert "monochromatic" in checks


def test_report_accepts_feasible_chain_slices():
    # one bit from A resolving x exactly: slices are columns of the support,
    # monochromatic for an f_B that only needs x
    tab = np.zeros((2, 2))
    tab[0, 0] = tab[1, 1] = 1.0
    chain = AuxChain(1, "A", [tab])
    joint = chain_joint(dsbs(0.3), chain)
    ident = FunctionTable((2, 2), 2, [0, 0, 1, 1])
    rep = slice_structure_report(joint, constant_function((2, 2)), ident)
    assert rep["status"] == "ok"
    assert rep["violations"] == []
    tags = {cls.tag for cls in rep["classes"].values()}
    assert tags == {"row_like"}


def test_report_requires_full_support():
    sparse = JointPmf((2, 2), [0.5, 0.0, 0.0, 0.5])
    rep = slice_structure_report(sparse, and_function(), and_function())
    assert rep["status"] == "hypothesis_not_met"
    assert rep["violations"] == []


def test_w_decomposition_on_dsbs():
    # Y = X xor W with W ~ Ber(p) independent of X realizes the dsbs
    p = 0.3
    from ifcomp.info_core import bernoulli_product
    psi = xor_function()
    eta = xor_function()
    w_pmf = bernoulli_product([0.5, p])
    rep = verify_w_decomposition(dsbs(p), psi, eta, w_pmf)
    assert rep["valid"]
    assert rep["joint_match"] and rep["eta_inverts"] and rep["entropy_match"]


def test_w_decomposition_rejects_wrong_noise_level():
    from ifcomp.info_core import bernoulli_product
    rep = verify_w_decomposition(
        dsbs(0.3), xor_function(), xor_function(), bernoulli_product([0.5, 0.2]))
    assert not rep["valid"]
    assert not rep["joint_match"]


# -- property tests ---------------------------------------------------------

cells_strategy = st.sets(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=0, max_size=12)


@settings(max_examples=80, deadline=None)
@given(cells_strategy, st.permutations(range(4)), st.permutations(range(4)))
def test_rectangle_check_is_relabel_invariant(cells, row_perm, col_perm):
    relabeled = {(row_perm[x], col_perm[y]) for x, y in cells}
    assert is_rectangle(cells) == is_rectangle(relabeled)


@settings(max_examples=80, deadline=None)
@given(cells_strategy)
def test_rectangle_iff_equals_own_product(cells):
    want = bool(cells) and cells == {
        (x, y) for x in {c[0] for c in cells} for y in {c[1] for c in cells}}
    if not cells:
        want = True
    assert is_rectangle(cells) == want


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.randoms(use_true_random=False))
def test_monochromatic_implies_both_directions(nx, ny, rng):
    values = [rng.randrange(3) for _ in range(nx * ny)]
    f = FunctionTable((nx, ny), 3, values)
    rect = Rectangle(
        frozenset(x for x in range(nx) if rng.random() < 0.6) or frozenset({0}),
        frozenset(y for y in range(ny) if rng.random() < 0.6) or frozenset({0}))
    if is_monochromatic(rect, f):
        assert is_row_monochromatic(rect, f)
        assert is_column_monochromatic(rect, f)
