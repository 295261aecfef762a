"""Entropy machinery, pmf containers, and function tables."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ifcomp.info_core import (
    DomainError,
    FunctionTable,
    JointPmf,
    and_function,
    bernoulli_product,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    constant_function,
    dsbs,
    entropy,
    mutual_information,
    product_function,
    with_function_axis,
    xor_function,
)

# h2 at the parameters the rest of the suite leans on, computed once from
# -p*log2(p) - (1-p)*log2(1-p) with mpmath at 50 digits and frozen here.
H2_FROZEN = {
    0.1: 0.4689955935892812,
    0.25: 0.8112781244591328,
    0.3: 0.8812908992306927,
    0.45: 0.9927744539878083,
    0.5: 1.0,
}


def test_binary_entropy_frozen_values():
    for p, want in H2_FROZEN.items():
        assert binary_entropy(p) == pytest.approx(want, abs=1e-15)


def test_binary_entropy_edges_and_symmetry():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    for p in (0.05, 0.2, 0.37):
        assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-15)


def test_joint_pmf_validates():
    with pytest.raises(DomainError):
        JointPmf((2, 2), [0.5, 0.5, 0.5, 0.5])  # sums to 2
    with pytest.raises(DomainError):
        JointPmf((2, 2), [0.9, 0.2, -0.05, -0.05])  # negative mass


def test_dsbs_marginals_and_crossover():
    pmf = dsbs(0.3)
    m0 = pmf.marginal((0,)).table
    m1 = pmf.marginal((1,)).table
    np.testing.assert_allclose(m0, [0.5, 0.5])
    np.testing.assert_allclose(m1, [0.5, 0.5])
    assert entropy(pmf, (0, 1)) == pytest.approx(1 + binary_entropy(0.3), abs=1e-12)
    assert conditional_entropy(pmf, (0,), (1,)) == pytest.approx(
        binary_entropy(0.3), abs=1e-12)


def test_bernoulli_product_is_independent():
    pmf = bernoulli_product([0.3, 0.6])
    assert mutual_information(pmf, (0,), (1,)) == pytest.approx(0.0, abs=1e-12)
    assert entropy(pmf, (0,)) == pytest.approx(binary_entropy(0.3), abs=1e-12)
    assert entropy(pmf, (1,)) == pytest.approx(binary_entropy(0.6), abs=1e-12)


def test_function_table_shapes_and_eval():
    f = and_function()
    assert f.domain_axes == (2, 2)
    assert [int(v) for v in f.values.reshape(-1)] == [0, 0, 0, 1]
    g = xor_function()
    assert [int(v) for v in g.values.reshape(-1)] == [0, 1, 1, 0]
    h = product_function(3)
    assert h.domain_axes == (3, 2)
    assert h.range_size == 4
    assert [int(v) for v in h.values.reshape(-1)] == [0, 1, 0, 2, 0, 3]


def test_function_table_range_check():
    with pytest.raises(DomainError):
        FunctionTable((2, 2), 2, [0, 0, 0, 2])  # value outside range


def test_with_function_axis_entropy_matches_direct():
    pmf = dsbs(0.3)
    ext = with_function_axis(pmf, and_function(), (0, 1))
    # P(AND=1) is the (1,1) mass of the dsbs, (1-p)/2
    assert entropy(ext, (2,)) == pytest.approx(binary_entropy(0.35), abs=1e-12)
    # the function axis is determined by its arguments
    assert conditional_entropy(ext, (2,), (0, 1)) == pytest.approx(0.0, abs=1e-12)


def test_json_round_trip():
    pmf = dsbs(0.2)
    back = JointPmf.from_json(pmf.to_json())
    assert back.axes == pmf.axes
    np.testing.assert_allclose(back.table, pmf.table)
    f = product_function(4)
    g = FunctionTable.from_json(f.to_json())
    assert g.domain_axes == f.domain_axes
    assert g.range_size == f.range_size
    assert np.array_equal(g.values, f.values)


# -- property tests ---------------------------------------------------------

pmf_22 = st.lists(
    st.floats(min_value=1e-3, max_value=1.0), min_size=4, max_size=4
).map(lambda w: JointPmf((2, 2), np.asarray(w) / np.sum(w)))


@settings(max_examples=60, deadline=None)
@given(pmf_22)
def test_chain_rule(pmf):
    lhs = entropy(pmf, (0, 1))
    rhs = entropy(pmf, (0,)) + conditional_entropy(pmf, (1,), (0,))
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(pmf_22)
def test_information_quantities_nonnegative(pmf):
    assert mutual_information(pmf, (0,), (1,)) >= -1e-12
    assert conditional_entropy(pmf, (0,), (1,)) >= -1e-12
    assert entropy(pmf, (0, 1)) >= -1e-12


@settings(max_examples=60, deadline=None)
@given(pmf_22)
def test_conditioning_reduces_entropy(pmf):
    assert conditional_entropy(pmf, (0,), (1,)) <= entropy(pmf, (0,)) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1e-6, max_value=0.5))
def test_dsbs_identities_on_grid(p):
    pmf = dsbs(p)
    h = binary_entropy(p)
    assert conditional_entropy(pmf, (0,), (1,)) == pytest.approx(h, abs=1e-10)
    assert conditional_entropy(pmf, (1,), (0,)) == pytest.approx(h, abs=1e-10)
    assert mutual_information(pmf, (0,), (1,)) == pytest.approx(1 - h, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(pmf_22)
def test_function_axis_is_determined_by_arguments(pmf):
    ext = with_function_axis(pmf, xor_function(), (0, 1))
    assert conditional_entropy(ext, (2,), (0, 1)) == pytest.approx(0.0, abs=1e-10)
    # and it cannot carry more information about X than X itself has
    assert conditional_mutual_information(ext, (0,), (2,), (1,)) <= (
        conditional_entropy(ext, (0,), (1,)) + 1e-10)


def test_constant_function_entropy_zero():
    pmf = dsbs(0.3)
    ext = with_function_axis(pmf, constant_function((2, 2)), (0, 1))
    assert entropy(ext, (2,)) == pytest.approx(0.0, abs=1e-14)
