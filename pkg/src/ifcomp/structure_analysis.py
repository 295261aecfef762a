"""Support sets, monochromatic rectangles, and structural feasibility conditions.

The two-terminal objects analyzed here live on a product alphabet X x Y. A set
of cells is a rectangle when it equals the product of its projections. A
rectangle is row-wise monochromatic for f when f is constant on each row
{x} x S_Y, and column-wise monochromatic when constant on each column
S_X x {y}. Slices of an auxiliary-chain joint are rectangles whenever the
source joint has full support, and feasible chains leave every slice
monochromatic in the direction the corresponding terminal must decode.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .info_core import (
    Bits,
    CapacityError,
    DomainError,
    FunctionTable,
    JointPmf,
    conditional_entropy,
    entropy,
    mutual_information,
)

# Cells at or below this are treated as float dust, not support.
SUPPORT_EPS = 1e-12


@dataclass(frozen=True)
class Rectangle:
    """A product set sx x sy of source symbols; either side may be empty."""

    sx: frozenset
    sy: frozenset

    @property
    def cells(self):
        return {(x, y) for x in self.sx for y in self.sy}


@dataclass(frozen=True)
class SliceClass:
    """Classification of one chain slice: its bounding rectangle and a tag.

    tag is one of empty, singleton, row_like, column_like, full, other, decided
    purely by the projection cardinalities. exact records whether the slice
    actually equals the rectangle (it always does under full-support sources).
    """

    tag: str
    rect: Rectangle
    exact: bool


def support(pmf: JointPmf) -> set:
    """Index tuples where the pmf is strictly positive (above float dust)."""
    cells = np.argwhere(pmf.table > SUPPORT_EPS)
    return {tuple(int(v) for v in c) for c in cells}


def is_rectangle(cells) -> bool:
    """True iff the cell set equals the product of its two projections."""
    cells = set(cells)
    if not cells:
        return True
    sx = {c[0] for c in cells}
    sy = {c[1] for c in cells}
    return len(cells) == len(sx) * len(sy)


def _projections(cells):
    return frozenset(c[0] for c in cells), frozenset(c[1] for c in cells)


def is_row_monochromatic(rect: Rectangle, f: FunctionTable) -> bool:
    """True iff f is constant on each row {x} x sy of the rectangle."""
    _check_rect(rect, f)
    sy = sorted(rect.sy)
    if len(sy) <= 1:
        return True
    for x in rect.sx:
        vals = f.values[x, sy]
        if vals.min() != vals.max():
            return False
    return True


def is_column_monochromatic(rect: Rectangle, f: FunctionTable) -> bool:
    """True iff f is constant on each column sx x {y} of the rectangle."""
    _check_rect(rect, f)
    sx = sorted(rect.sx)
    if len(sx) <= 1:
        return True
    for y in rect.sy:
        vals = f.values[sx, y]
        if vals.min() != vals.max():
            return False
    return True


def is_monochromatic(rect: Rectangle, f: FunctionTable) -> bool:
    """True iff f is constant on the whole rectangle."""
    _check_rect(rect, f)
    if not rect.sx or not rect.sy:
        return True
    vals = f.values[np.ix_(sorted(rect.sx), sorted(rect.sy))]
    return int(vals.min()) == int(vals.max())


def _check_rect(rect, f):
    if len(f.domain_axes) != 2:
        raise DomainError("monochromatic checks need a two-axis function")
    nx, ny = f.domain_axes
    if any(not (0 <= x < nx) for x in rect.sx) or any(not (0 <= y < ny) for y in rect.sy):
        raise DomainError("rectangle outside the function domain")


def _classify(cells, nx, ny) -> SliceClass:
    sx, sy = _projections(cells)
    exact = len(cells) == len(sx) * len(sy)
    if not cells:
        tag = "empty"
    elif len(sx) == 1 and len(sy) == 1:
        tag = "singleton"
    elif len(sx) == 1:
        tag = "row_like"
    elif len(sy) == 1:
        tag = "column_like"
    elif len(sx) == nx and len(sy) == ny and exact:
        tag = "full"
    else:
        tag = "other"
    return SliceClass(tag, Rectangle(sx, sy), exact)


def classify_slices(chain_joint: JointPmf) -> dict:
    """Classify every u-slice of a joint over (X, Y, U_1, ..., U_t).

    Returns a map from each u tuple to its SliceClass. The slice of u is the
    set of (x, y) cells with positive probability alongside that u.
    """
    if len(chain_joint.axes) < 2:
        raise DomainError("chain joint needs X and Y axes first")
    nx, ny = chain_joint.axes[0], chain_joint.axes[1]
    u_shape = chain_joint.axes[2:]
    out = {}
    for u in np.ndindex(u_shape):
        block = chain_joint.table[(slice(None), slice(None)) + u]
        cells = {(int(x), int(y)) for x, y in np.argwhere(block > SUPPORT_EPS)}
        out[u] = _classify(cells, nx, ny)
    return out


def slice_structure_report(chain_joint: JointPmf, f_A: FunctionTable, f_B: FunctionTable) -> dict:
    """Check every slice for rectangle shape and directional monochromaticity.

    Requires the source joint (the (X, Y) marginal) to have full support;
    otherwise the structural guarantees do not apply and the report comes back
    with status "hypothesis_not_met" and no violations, by design.

    Under full support, each slice must be a rectangle, row-wise monochromatic
    for f_A and column-wise monochromatic for f_B; when f_A and f_B are the
    same table the slice must be constant outright. Violations list one entry
    per failed check, keyed by the u tuple.
    """
    p_xy = chain_joint.marginal((0, 1))
    if np.any(p_xy.table <= SUPPORT_EPS):
        return {"status": "hypothesis_not_met", "violations": [], "classes": {}}
    same_f = (
        f_A.domain_axes == f_B.domain_axes
        and f_A.range_size == f_B.range_size
        and np.array_equal(f_A.values, f_B.values)
    )
    classes = classify_slices(chain_joint)
    violations = []
    for u, cls in classes.items():
        if not cls.exact:
            violations.append({"u": u, "check": "rectangle"})
            continue
        if not is_row_monochromatic(cls.rect, f_A):
            violations.append({"u": u, "check": "row_monochromatic_f_A"})
        if not is_column_monochromatic(cls.rect, f_B):
            violations.append({"u": u, "check": "column_monochromatic_f_B"})
        if same_f and not is_monochromatic(cls.rect, f_A):
            violations.append({"u": u, "check": "monochromatic"})
    return {"status": "ok", "violations": violations, "classes": classes}


def han_kobayashi_condition(f_B: FunctionTable) -> bool:
    """True iff every pair of distinct x symbols is separated by some y.

    That is, for all x1 != x2 there exists y0 with f_B(x1,y0) != f_B(x2,y0).
    When this holds and the source joint has full support, one message cannot
    beat H(X|Y); see one_message_lower_bound.
    """
    if len(f_B.domain_axes) != 2:
        raise DomainError("han_kobayashi_condition needs a two-axis function")
    nx = f_B.domain_axes[0]
    for x1, x2 in combinations(range(nx), 2):
        if np.array_equal(f_B.values[x1], f_B.values[x2]):
            return False
    return True


def one_message_lower_bound(p_xy: JointPmf, f_B: FunctionTable) -> Bits | None:
    """H(X|Y) when the separation condition holds on a full-support source.

    Returns None when the condition fails or the support is not full; in
    those cases no single-message bound is implied.
    """
    if len(p_xy.axes) != 2 or p_xy.axes != f_B.domain_axes:
        raise DomainError("pmf and function must share a two-axis domain")
    if np.any(p_xy.table <= SUPPORT_EPS):
        return None
    if not han_kobayashi_condition(f_B):
        return None
    return conditional_entropy(p_xy, (0,), (1,))


def no_nontrivial_column_rectangles(f_B: FunctionTable) -> bool:
    """True iff every column-wise monochromatic rectangle sits in one row or column.

    Equivalently: no rectangle with at least two x symbols has two or more
    columns on which f_B is constant. Exhaustive over x subsets, so both
    alphabets are capped at 12.
    """
    if len(f_B.domain_axes) != 2:
        raise DomainError("needs a two-axis function")
    nx, ny = f_B.domain_axes
    if nx > 12 or ny > 12:
        raise CapacityError("alphabets above 12 symbols are not enumerable here")
    xs = list(range(nx))
    for r in range(2, nx + 1):
        for sx in combinations(xs, r):
            block = f_B.values[list(sx), :]
            constant_cols = int(np.sum(block.min(axis=0) == block.max(axis=0)))
            if constant_cols >= 2:
                return False
    return True


def verify_w_decomposition(
    joint: JointPmf, psi: FunctionTable, eta: FunctionTable, w_pmf: JointPmf
) -> dict:
    """Verify a supplied (W, psi, eta) witness against a two-axis joint.

    The witness claims Y = psi(X, W) with (X, W) ~ w_pmf, X recoverable as
    eta(Y, W), and H(Y|X) = H(W). The report carries one boolean per condition
    plus the induced-joint match, all at 1e-9, and an overall "valid" flag.
    Only supplied witnesses are checked; nothing searches for one.
    """
    if len(joint.axes) != 2 or len(w_pmf.axes) != 2:
        raise DomainError("joint and w_pmf must be two-axis pmfs")
    nx, ny = joint.axes
    nw = w_pmf.axes[1]
    if w_pmf.axes[0] != nx:
        raise DomainError("w_pmf X axis does not match the joint")
    if psi.domain_axes != (nx, nw) or psi.range_size < ny:
        raise DomainError("psi must map (X, W) into Y")
    if eta.domain_axes != (ny, nw) or eta.range_size < nx:
        raise DomainError("eta must map (Y, W) into X")

    # induced p(x, y) = sum_w p(x, w) [psi(x, w) = y]
    induced = np.zeros((nx, ny))
    stray_mass = 0.0
    for x in range(nx):
        for w in range(nw):
            y = psi(x, w)
            if y < ny:
                induced[x, y] += w_pmf.table[x, w]
            else:
                stray_mass += w_pmf.table[x, w]
    joint_match = stray_mass <= 1e-9 and bool(np.max(np.abs(induced - joint.table)) <= 1e-9)

    # eta must invert psi wherever (x, w) has mass
    eta_ok = True
    for x in range(nx):
        for w in range(nw):
            if w_pmf.table[x, w] > SUPPORT_EPS and eta(psi(x, w), w) != x:
                eta_ok = False

    h_y_given_x = conditional_entropy(joint, (1,), (0,))
    h_w = entropy(w_pmf, (1,))
    entropy_match = bool(abs(h_y_given_x - h_w) <= 1e-9)

    # equivalent form: X independent of W, and W a function of (X, Y)
    xw_independent = bool(mutual_information(w_pmf, (0,), (1,)) <= 1e-9)
    xyw = np.zeros((nx, ny, nw))
    for x in range(nx):
        for w in range(nw):
            y = psi(x, w)
            if y < ny:
                xyw[x, y, w] += w_pmf.table[x, w]
    if stray_mass > 1e-9:
        w_determined = False
    else:
        xyw_pmf = JointPmf((nx, ny, nw), xyw.reshape(-1))
        w_determined = bool(conditional_entropy(xyw_pmf, (2,), (0, 1)) <= 1e-9)

    valid = joint_match and eta_ok and entropy_match and xw_independent and w_determined
    return {
        "valid": valid,
        "joint_match": joint_match,
        "eta_inverts": eta_ok,
        "entropy_match": entropy_match,
        "x_w_independent": xw_independent,
        "w_determined_by_xy": w_determined,
        "h_y_given_x": h_y_given_x,
        "h_w": h_w,
    }
