"""Dense finite-alphabet probability tables and exact information measures.

Everything downstream (rectangle analysis, sum-rate search, rate allocation,
network bounds) computes through the two data types defined here:

- JointPmf: a dense joint probability table over a tuple of finite alphabets.
- FunctionTable: a samplewise function f: X1 x ... x Xk -> Z as a lookup table.

All logarithms are base 2, so every measure is in bits per sample. The usual
convention 0*log2(0) := 0 applies throughout. Tables are row-major with the
last axis fastest, both in memory and in the JSON forms.
"""

from __future__ import annotations

import math

import numpy as np

# Dense tables only; enough for every alphabet this package targets.
MAX_CELLS = 2**24

PMF_TOL = 1e-9

# Rates and entropies are plain floats in bits per sample.
Bits = float


class DomainError(ValueError):
    """An input violates a documented precondition."""


class CapacityError(RuntimeError):
    """The requested computation exceeds the dense / enumerative limits."""


def _xlog2x(p):
    """Elementwise -p*log2(p) with 0 log 0 = 0, for nonnegative arrays."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = -p[mask] * np.log2(p[mask])
    return out


def binary_entropy(p: float) -> Bits:
    """h2(p) = -p log2 p - (1-p) log2 (1-p), defined on [0, 1]."""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"binary_entropy needs p in [0,1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


class JointPmf:
    """Dense joint pmf over a tuple of finite alphabets.

    axes: alphabet sizes, each >= 1.
    probs: flat table, length prod(axes), row-major with the last axis fastest.
    Entries must be nonnegative and sum to 1 within 1e-9. Nothing is ever
    renormalized silently; use normalize() to do it explicitly.
    """

    def __init__(self, axes, probs):
        axes = tuple(int(n) for n in axes)
        if len(axes) == 0:
            raise DomainError("JointPmf needs at least one axis")
        if any(n < 1 for n in axes):
            raise DomainError(f"axis sizes must be >= 1, got {axes}")
        ncells = math.prod(axes)
        if ncells > MAX_CELLS:
            raise CapacityError(f"{ncells} cells exceeds the dense cap {MAX_CELLS}")
        table = np.asarray(probs, dtype=float).reshape(-1)
        if table.size != ncells:
            raise DomainError(f"expected {ncells} probabilities, got {table.size}")
        if np.any(table < -1e-12):
            raise DomainError("negative probability entry")
        table = np.maximum(table, 0.0)  # clip float dust only
        total = float(table.sum())
        if abs(total - 1.0) > PMF_TOL:
            raise DomainError(f"probabilities sum to {total}, not 1 within {PMF_TOL}")
        self.axes = axes
        self.table = table.reshape(axes)
        self.table.setflags(write=False)

    @property
    def probs(self):
        """Flat row-major probability vector."""
        return self.table.reshape(-1)

    def normalize(self) -> "JointPmf":
        """Explicitly rescale to sum exactly 1 (never done implicitly)."""
        t = np.asarray(self.table, dtype=float)
        return JointPmf(self.axes, (t / t.sum()).reshape(-1))

    def marginal(self, axes) -> "JointPmf":
        """Marginal pmf on the given axes, in the given order."""
        axes = _check_axes(self, axes)
        keep = np.moveaxis(self.table, axes, range(len(axes)))
        summed = keep.reshape(tuple(self.axes[a] for a in axes) + (-1,)).sum(axis=-1)
        return JointPmf([self.axes[a] for a in axes], summed.reshape(-1))

    def to_json(self) -> dict:
        return {"axes": list(self.axes), "probs": [float(v) for v in self.probs]}

    @classmethod
    def from_json(cls, obj) -> "JointPmf":
        if not isinstance(obj, dict) or "axes" not in obj or "probs" not in obj:
            raise DomainError('pmf JSON must be {"axes": [...], "probs": [...]}')
        return cls(obj["axes"], obj["probs"])

    def __repr__(self):
        return f"JointPmf(axes={self.axes})"


def _check_axes(pmf, axes, allow_empty=False):
    axes = tuple(int(a) for a in axes)
    if not allow_empty and len(axes) == 0:
        raise DomainError("axis subset must be nonempty")
    if len(set(axes)) != len(axes):
        raise DomainError(f"repeated axis in {axes}")
    for a in axes:
        if not (0 <= a < len(pmf.axes)):
            raise DomainError(f"axis {a} out of range for {len(pmf.axes)} axes")
    return axes


def entropy(pmf: JointPmf, axes) -> Bits:
    """Shannon entropy of the marginal on the given axes, in bits."""
    axes = _check_axes(pmf, axes)
    marg = pmf.marginal(axes)
    return float(_xlog2x(marg.table).sum())


def conditional_entropy(pmf: JointPmf, target_axes, given_axes) -> Bits:
    """H(target | given) = H(target, given) - H(given)."""
    target = _check_axes(pmf, target_axes)
    given = _check_axes(pmf, given_axes, allow_empty=True)
    if set(target) & set(given):
        raise DomainError("target and given axes overlap")
    joint = entropy(pmf, target + given)
    if not given:
        return joint
    return max(0.0, joint - entropy(pmf, given))


def conditional_mutual_information(pmf: JointPmf, a_axes, b_axes, given_axes=()) -> Bits:
    """I(A;B|C) = H(A|C) - H(A|B,C), nonnegative up to float dust."""
    a = _check_axes(pmf, a_axes)
    b = _check_axes(pmf, b_axes)
    c = _check_axes(pmf, given_axes, allow_empty=True)
    if (set(a) & set(b)) or (set(a) & set(c)) or (set(b) & set(c)):
        raise DomainError("axis sets must be pairwise disjoint")
    value = conditional_entropy(pmf, a, c) - conditional_entropy(pmf, a, b + c)
    return max(0.0, value)


def mutual_information(pmf: JointPmf, a_axes, b_axes) -> Bits:
    """I(A;B), shorthand for conditional_mutual_information with no conditioning."""
    return conditional_mutual_information(pmf, a_axes, b_axes, ())


def dsbs(p: float) -> JointPmf:
    """Doubly symmetric binary source: uniform X, Y = X flipped with probability p.

    The 2x2 table has (1-p)/2 on the diagonal and p/2 off it; both marginals
    are Ber(1/2) and H(X|Y) = h2(p).
    """
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"dsbs needs p in [0,1], got {p}")
    same = (1.0 - p) / 2.0
    diff = p / 2.0
    return JointPmf((2, 2), [same, diff, diff, same])


def bernoulli_product(params) -> JointPmf:
    """Product pmf of independent Ber(p_i) bits; P(all ones) = prod(params)."""
    params = [float(v) for v in params]
    if len(params) == 0:
        raise DomainError("bernoulli_product needs at least one parameter")
    for v in params:
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"Bernoulli parameter {v} outside [0,1]")
    table = np.array([1.0])
    for v in params:
        table = np.multiply.outer(table, np.array([1.0 - v, v]))
    return JointPmf((2,) * len(params), table.reshape(-1))


class FunctionTable:
    """Samplewise function f: X1 x ... x Xk -> {0..range_size-1} as a dense table.

    values is row-major over the domain with the last axis fastest, matching
    JointPmf layout, so f and a pmf over the same axes index identically.
    """

    def __init__(self, domain_axes, range_size, values):
        domain_axes = tuple(int(n) for n in domain_axes)
        if len(domain_axes) == 0 or any(n < 1 for n in domain_axes):
            raise DomainError(f"bad domain axes {domain_axes}")
        range_size = int(range_size)
        if range_size < 1:
            raise DomainError("range_size must be >= 1")
        vals = np.asarray(values, dtype=int).reshape(-1)
        if vals.size != math.prod(domain_axes):
            raise DomainError(
                f"expected {math.prod(domain_axes)} values, got {vals.size}"
            )
        if vals.min() < 0 or vals.max() >= range_size:
            raise DomainError("function value outside range")
        self.domain_axes = domain_axes
        self.range_size = range_size
        self.values = vals.reshape(domain_axes)
        self.values.setflags(write=False)

    def __call__(self, *idx) -> int:
        return int(self.values[idx])

    def to_json(self) -> dict:
        return {
            "domain_axes": list(self.domain_axes),
            "range_size": self.range_size,
            "values": [int(v) for v in self.values.reshape(-1)],
        }

    @classmethod
    def from_json(cls, obj) -> "FunctionTable":
        keys = {"domain_axes", "range_size", "values"}
        if not isinstance(obj, dict) or not keys <= set(obj):
            raise DomainError(
                'function JSON must be {"domain_axes": [...], "range_size": n, "values": [...]}'
            )
        return cls(obj["domain_axes"], obj["range_size"], obj["values"])

    @classmethod
    def from_callable(cls, domain_axes, range_size, fn) -> "FunctionTable":
        """Tabulate fn over the full domain (fn takes one index per axis)."""
        domain_axes = tuple(int(n) for n in domain_axes)
        vals = np.empty(domain_axes, dtype=int)
        for idx in np.ndindex(domain_axes):
            vals[idx] = fn(*idx)
        return cls(domain_axes, range_size, vals.reshape(-1))

    def __repr__(self):
        return f"FunctionTable(domain={self.domain_axes}, range={self.range_size})"


def constant_function(domain_axes, value=0, range_size=1) -> FunctionTable:
    """The constant function; the usual stand-in for 'this terminal wants nothing'."""
    n = math.prod(int(a) for a in domain_axes)
    return FunctionTable(domain_axes, max(range_size, value + 1), [value] * n)


def and_function() -> FunctionTable:
    """x AND y on binary alphabets."""
    return FunctionTable((2, 2), 2, [0, 0, 0, 1])


def xor_function() -> FunctionTable:
    """x XOR y on binary alphabets."""
    return FunctionTable((2, 2), 2, [0, 1, 1, 0])


def product_function(n_levels: int) -> FunctionTable:
    """f(x, y) = (x+1) * y for x in {0..L-1} standing for {1..L} and binary y."""
    if n_levels < 1:
        raise DomainError("need at least one x level")
    vals = [[0, x + 1] for x in range(n_levels)]
    return FunctionTable((n_levels, 2), n_levels + 1, np.asarray(vals).reshape(-1))


def with_function_axis(pmf: JointPmf, f: FunctionTable, arg_axes) -> JointPmf:
    """Append an axis carrying z = f(arguments) to a joint pmf.

    arg_axes names which pmf axes feed the function, in the function's own
    argument order. The result has axes pmf.axes + (f.range_size,), with all
    mass on the cells where the new coordinate equals the function value, so
    entropies involving z can be read from an ordinary marginal.
    """
    arg_axes = _check_axes(pmf, arg_axes)
    if tuple(pmf.axes[a] for a in arg_axes) != f.domain_axes:
        raise DomainError(
            f"function domain {f.domain_axes} does not match axes {arg_axes} of {pmf.axes}"
        )
    shape = pmf.axes + (f.range_size,)
    if math.prod(shape) > MAX_CELLS:
        raise CapacityError("function axis would exceed the dense cap")
    out = np.zeros(shape)
    # scatter each cell's mass onto its function value
    idx = np.indices(pmf.axes)
    z = f.values[tuple(idx[a] for a in arg_axes)]
    np.put_along_axis(out, z[..., None], pmf.table[..., None], axis=-1)
    return JointPmf(shape, out.reshape(-1))
