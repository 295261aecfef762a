"""Sum-rate computation for two-terminal interactive function computation.

A protocol with t alternating messages is described by an auxiliary chain
U_1, ..., U_t.  When terminal A (holding X) starts, odd-indexed messages are
generated from (X, U^{j-1}) and even-indexed ones from (Y, U^{j-1}); starting
at B swaps the roles.  The chain is feasible for (f_A, f_B) when both
conditional entropies H(f_A | X, U^t) and H(f_B | Y, U^t) vanish, and its
sum rate is the sum of the per-message conditional mutual informations

    R_j = I(source_j ; U_j | other source, U^{j-1}),

which telescopes to I(X; U^t | Y) + I(Y; U^t | X).

Two minimizers are provided.  ``min_sum_rate_bruteforce`` enumerates
deterministic chains as canonical set partitions (restricted growth strings)
and is exact for t <= 2.  ``min_sum_rate_penalty`` runs projected gradient
descent on the conditional probability tables with a growing penalty on the
computability residuals; it scales to larger t but is a heuristic.  Both
report the best applicable lower bound and mark the result certified when
the achieved value meets it within 1e-9.
"""

import math
from dataclasses import dataclass

import numpy as np

from .info_core import (
    Bits,
    CapacityError,
    DomainError,
    FunctionTable,
    JointPmf,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    with_function_axis,
    _xlog2x,
)
from .structure_analysis import one_message_lower_bound

ROW_TOL = 1e-9
RESIDUAL_TOL = 1e-6
CERTIFY_TOL = 1e-9
MAX_BRUTEFORCE_CANDIDATES = 10_000_000
DEFAULT_CAP = 4
DEFAULT_MU_SCHEDULE = (1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6)

_LOG2E = math.log2(math.e)


def speaker(j: int, initial_location: str) -> str:
    """Terminal that sends message j (1-based) in an alternating protocol."""
    if initial_location not in ("A", "B"):
        raise DomainError("initial_location must be 'A' or 'B'")
    if j < 1:
        raise DomainError("message indices are 1-based")
    first, second = ("A", "B") if initial_location == "A" else ("B", "A")
    return first if j % 2 == 1 else second


def cardinality_bound(j: int, t: int, own_size: int, prev_sizes) -> int:
    """Alphabet size that never cuts off the optimum for message j of t.

    The j-th auxiliary variable can be restricted to
    own_size * prod(prev_sizes) + t - j + 3 values, where own_size is the
    alphabet of the source it is generated from.
    """
    if not 1 <= j <= t:
        raise DomainError("need 1 <= j <= t")
    prod = 1
    for s in prev_sizes:
        prod *= int(s)
    return own_size * prod + t - j + 3


def default_caps(nx: int, ny: int, t: int, initial_location: str = "A",
                 cap: int = DEFAULT_CAP):
    """Per-message size caps: the cardinality bound clipped at ``cap``."""
    caps = []
    for j in range(1, t + 1):
        own = nx if speaker(j, initial_location) == "A" else ny
        caps.append(min(cardinality_bound(j, t, own, caps), cap))
    return caps


class AuxChain:
    """Conditional tables for an alternating chain of auxiliary messages.

    tables[i] (0-based i, message i+1) has shape
    (own_source_size, sizes[0], ..., sizes[i-1], sizes[i]) and every row
    (all axes but the last fixed) sums to one.
    """

    def __init__(self, t, initial_location, tables):
        if initial_location not in ("A", "B"):
            raise DomainError("initial_location must be 'A' or 'B'")
        t = int(t)
        if t < 1:
            raise DomainError("need at least one message")
        if len(tables) != t:
            raise DomainError("expected %d tables, got %d" % (t, len(tables)))
        self.t = t
        self.initial_location = initial_location
        self.tables = []
        sizes = []
        for i, tab in enumerate(tables):
            tab = np.asarray(tab, dtype=float)
            if tab.ndim != i + 2:
                raise DomainError(
                    "table %d must have %d axes (source, previous messages, "
                    "own alphabet)" % (i + 1, i + 2))
            if tuple(tab.shape[1:-1]) != tuple(sizes):
                raise DomainError(
                    "table %d conditions on message sizes %s, chain has %s"
                    % (i + 1, tab.shape[1:-1], tuple(sizes)))
            if tab.shape[-1] < 1 or tab.shape[0] < 1:
                raise DomainError("alphabet sizes must be positive")
            if np.any(tab < -1e-12):
                raise DomainError("table %d has negative entries" % (i + 1))
            tab = np.clip(tab, 0.0, None)
            rows = tab.sum(axis=-1)
            if np.any(np.abs(rows - 1.0) > ROW_TOL):
                raise DomainError("table %d rows must sum to one" % (i + 1))
            tab.flags.writeable = False
            self.tables.append(tab)
            sizes.append(tab.shape[-1])
        self.sizes = tuple(sizes)
        # source alphabets, inferred from whichever side speaks
        self._nx = None
        self._ny = None
        for i, tab in enumerate(self.tables):
            if speaker(i + 1, initial_location) == "A":
                self._nx = tab.shape[0]
            else:
                self._ny = tab.shape[0]
        for i, tab in enumerate(self.tables):
            own = tab.shape[0]
            bound = cardinality_bound(i + 1, t, own, sizes[:i])
            if sizes[i] > bound:
                raise DomainError(
                    "message %d uses %d values, above the cardinality bound %d"
                    % (i + 1, sizes[i], bound))

    def source_sizes(self):
        """(nx, ny) as far as the chain pins them down (None if unused)."""
        return (self._nx, self._ny)

    def to_json(self):
        return {
            "t": self.t,
            "initial_location": self.initial_location,
            "sizes": list(self.sizes),
            "tables": [tab.tolist() for tab in self.tables],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["t"], obj["initial_location"], obj["tables"])
        except KeyError as exc:
            raise DomainError("chain object is missing field %s" % exc)

    def __repr__(self):
        return "AuxChain(t=%d, start=%s, sizes=%s)" % (
            self.t, self.initial_location, list(self.sizes))


def _check_sources(p_xy: JointPmf, chain: AuxChain):
    if len(p_xy.axes) != 2:
        raise DomainError("chain protocols need a two-axis joint pmf")
    nx, ny = p_xy.axes
    cnx, cny = chain.source_sizes()
    if cnx is not None and cnx != nx:
        raise DomainError("chain was built for |X|=%d, pmf has %d" % (cnx, nx))
    if cny is not None and cny != ny:
        raise DomainError("chain was built for |Y|=%d, pmf has %d" % (cny, ny))


def _joint_table(p_table, tables, initial_location):
    """Dense joint over (X, Y, U_1, ..., U_t) from raw numpy tables."""
    cur = np.asarray(p_table, dtype=float)
    for i, tab in enumerate(tables):
        own_axis = 0 if speaker(i + 1, initial_location) == "A" else 1
        other_axis = 1 - own_axis
        cur = cur[..., None] * np.expand_dims(tab, axis=other_axis)
    return cur


def chain_joint(p_xy: JointPmf, chain: AuxChain) -> JointPmf:
    """Joint pmf of (X, Y, U_1, ..., U_t) induced by running the chain."""
    _check_sources(p_xy, chain)
    table = _joint_table(p_xy.table, chain.tables, chain.initial_location)
    return JointPmf(p_xy.axes + chain.sizes, table.reshape(-1))


def message_rates(p_xy: JointPmf, chain: AuxChain):
    """Per-message rates [I(source_j; U_j | other source, U^{j-1})]."""
    joint = chain_joint(p_xy, chain)
    rates = []
    for j in range(1, chain.t + 1):
        own = 0 if speaker(j, chain.initial_location) == "A" else 1
        u_axis = 2 + j - 1
        given = (1 - own,) + tuple(range(2, u_axis))
        rates.append(conditional_mutual_information(
            joint, (own,), (u_axis,), given))
    return rates


def chain_sum_rate(p_xy: JointPmf, chain: AuxChain) -> Bits:
    return float(sum(message_rates(p_xy, chain)))


def computability_residuals(p_xy: JointPmf, chain: AuxChain,
                            f_A: FunctionTable, f_B: FunctionTable):
    """(H(f_A | X, U^t), H(f_B | Y, U^t)) under the chain's joint pmf."""
    joint = chain_joint(p_xy, chain)
    u_axes = tuple(range(2, 2 + chain.t))
    out = []
    for f, own in ((f_A, 0), (f_B, 1)):
        ext = with_function_axis(joint, f, (0, 1))
        z_axis = len(ext.axes) - 1
        out.append(conditional_entropy(ext, (z_axis,), (own,) + u_axes))
    return tuple(out)


def check_membership(rates, p_xy: JointPmf, chain: AuxChain,
                     f_A: FunctionTable, f_B: FunctionTable,
                     tol: float = 1e-9) -> bool:
    """Whether a rate vector is achievable with this chain as the witness.

    True when every rates[j] covers the chain's j-th message rate and both
    computability residuals vanish, all within tol.
    """
    rates = [float(r) for r in rates]
    if len(rates) != chain.t:
        raise DomainError("need one rate per message")
    need = message_rates(p_xy, chain)
    if any(r < n - tol for r, n in zip(rates, need)):
        return False
    res_a, res_b = computability_residuals(p_xy, chain, f_A, f_B)
    return res_a <= tol and res_b <= tol


def pad_chain(chain: AuxChain, t_new: int, source_sizes=None) -> AuxChain:
    """Extend a chain with constant one-symbol messages up to t_new rounds.

    The padded chain has the same joint distribution over the original
    messages and zero rate on the new ones, so any rate point of the short
    chain stays achievable at the longer horizon.  source_sizes = (nx, ny)
    is only needed when a side that never spoke has to speak now.
    """
    if t_new < chain.t:
        raise DomainError("cannot pad to fewer messages")
    nx, ny = chain.source_sizes()
    if source_sizes is not None:
        nx = nx if nx is not None else int(source_sizes[0])
        ny = ny if ny is not None else int(source_sizes[1])
    tables = list(chain.tables)
    sizes = list(chain.sizes)
    for j in range(chain.t + 1, t_new + 1):
        side = speaker(j, chain.initial_location)
        own = nx if side == "A" else ny
        if own is None:
            raise DomainError(
                "terminal %s never spoke; pass source_sizes to pad" % side)
        tables.append(np.ones((own,) + tuple(sizes) + (1,)))
        sizes.append(1)
    return AuxChain(t_new, chain.initial_location, tables)


# ---------------------------------------------------------------------------
# lower bounds


def cutset_lower_bound(p_xy: JointPmf, f_A: FunctionTable,
                       f_B: FunctionTable) -> Bits:
    """H(f_B | Y) + H(f_A | X): each function over its own terminal's cut."""
    if len(p_xy.axes) != 2:
        raise DomainError("cut-set bound needs a two-axis joint pmf")
    total = 0.0
    for f, own in ((f_B, 1), (f_A, 0)):
        ext = with_function_axis(p_xy, f, (0, 1))
        total += conditional_entropy(ext, (2,), (own,))
    return total


def independent_noise_exact_rate(p_xy: JointPmf, f_B: FunctionTable):
    """Exact minimal sum rate when Y is X through independent binary noise.

    Applies to full-support binary (X, Y) whose crossover probability does
    not depend on x, i.e. Y = X xor W with W independent of X and both
    marginals nondegenerate.  If some column of f_B distinguishes x = 0 from
    x = 1 the answer is H(X | Y) for every number of messages; if f_B
    ignores x it is zero.  Returns None when the pmf is outside this family.
    """
    if tuple(p_xy.axes) != (2, 2):
        return None
    if tuple(f_B.domain_axes) != (2, 2):
        return None
    tab = p_xy.table
    if np.any(tab <= 0.0):
        return None
    px1 = tab[1].sum()
    if not 0.0 < px1 < 1.0:
        return None
    cross0 = tab[0, 1] / tab[0].sum()
    cross1 = tab[1, 0] / tab[1].sum()
    if abs(cross0 - cross1) > 1e-9:
        return None
    if not 0.0 < cross0 < 1.0:
        return None
    fv = f_B.values.reshape(2, 2)
    if np.all(fv[0] == fv[1]):
        return 0.0
    return conditional_entropy(p_xy, (0,), (1,))


def lambda_star(p: float, q: float) -> float:
    """Optimal split of the (0,0) mass in the infinite-message bound."""
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DomainError("need p, q strictly inside (0, 1)")
    return q * (1.0 - p) / (p + q - 2.0 * p * q)


def infinite_message_bound_objective(p: float, q: float, lam: float) -> Bits:
    """Bound objective for AND of independent Bernoulli sources at split lam.

    Splitting the mass of the (0,0) cell between the two one-sided parts
    with weight lam gives a valid lower bound for every lam in [0, 1]; the
    published bound is the minimum over lam.
    """
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DomainError("need p, q strictly inside (0, 1)")
    if not 0.0 <= lam <= 1.0:
        raise DomainError("the split weight must be in [0, 1]")
    p10 = p * (1.0 - q)
    p01 = (1.0 - p) * q
    p00 = (1.0 - p) * (1.0 - q)
    part2 = p10 + (1.0 - lam) * p00
    part3 = p01 + lam * p00
    total = binary_entropy(p) + binary_entropy(q)
    if part2 > 0.0:
        total -= binary_entropy(p10 / part2) * part2
    if part3 > 0.0:
        total -= binary_entropy(p01 / part3) * part3
    return total


def infinite_message_lower_bound(p: float, q: float) -> Bits:
    """Lower bound on the sum rate for AND of independent Ber(p), Ber(q).

    Holds for any number of messages, either starting terminal.  Equals
    h(p) + h(q) - (1 - pq) h((1-p)(1-q) / (1-pq)) and is attained by the
    objective at the optimal split weight.
    """
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DomainError("need p, q strictly inside (0, 1)")
    pq = p * q
    inner = (1.0 - p) * (1.0 - q) / (1.0 - pq)
    return (binary_entropy(p) + binary_entropy(q)
            - (1.0 - pq) * binary_entropy(inner))


def _product_and_parameters(p_xy: JointPmf, f_A: FunctionTable,
                            f_B: FunctionTable):
    """(p, q) when the problem is AND of independent bits, else None.

    Each terminal may want AND or nothing; at least one side must want it.
    """
    if tuple(p_xy.axes) != (2, 2):
        return None
    tab = p_xy.table
    p = tab[1].sum()
    q = tab[:, 1].sum()
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        return None
    if np.max(np.abs(tab - np.outer([1 - p, p], [1 - q, q]))) > 1e-12:
        return None
    and_vals = (0, 0, 0, 1)
    sides = []
    for f in (f_A, f_B):
        if tuple(f.domain_axes) != (2, 2):
            return None
        vals = tuple(int(v) for v in f.values.reshape(-1))
        if vals == and_vals:
            sides.append("and")
        elif len(set(vals)) == 1:
            sides.append("const")
        else:
            return None
    if "and" not in sides:
        return None
    return (float(p), float(q))


def best_lower_bound(p_xy: JointPmf, f_A: FunctionTable, f_B: FunctionTable,
                     t: int, initial_location: str = "A"):
    """Largest applicable lower bound and every bound that was evaluated.

    Returns (value, tag, bounds) where bounds maps bound names to floats
    (absent means not applicable).  Each bound relaxes the problem, so all
    of them stay sound when the terminals want more than the relaxation
    assumes.  ``one_message`` only applies to single-message protocols and
    is oriented by who speaks.
    """
    bounds = {}
    bounds["cutset"] = cutset_lower_bound(p_xy, f_A, f_B)
    if t == 1:
        if initial_location == "A":
            hk = one_message_lower_bound(p_xy, f_B)
        else:
            p2, _, fb2 = _swap_problem(p_xy, f_A, f_B)
            hk = one_message_lower_bound(p2, fb2)
        if hk is not None:
            bounds["one_message"] = hk
    exact = independent_noise_exact_rate(p_xy, f_B)
    if exact is not None:
        bounds["independent_noise"] = exact
    params = _product_and_parameters(p_xy, f_A, f_B)
    if params is not None:
        bounds["infinite_message"] = infinite_message_lower_bound(*params)
    tag = max(bounds, key=lambda k: bounds[k])
    return bounds[tag], tag, bounds


# ---------------------------------------------------------------------------
# results


@dataclass
class SumRateResult:
    """Outcome of a sum-rate minimization.

    achieved is the best feasible sum rate found (inf when nothing was
    feasible), chain the witness, residuals its computability residuals,
    rates its per-message rates.  certified means achieved meets the best
    known lower bound within 1e-9, so the value is exactly optimal.
    """
    achieved: Bits
    chain: AuxChain | None
    residuals: tuple | None
    rates: list | None
    lower_bound: Bits
    lower_bound_tag: str
    lower_bounds: dict
    method: str
    feasible: bool
    certified: bool

    def to_json(self):
        return {
            "achieved": self.achieved,
            "chain": self.chain.to_json() if self.chain else None,
            "residuals": list(self.residuals) if self.residuals else None,
            "rates": list(self.rates) if self.rates else None,
            "lower_bound": self.lower_bound,
            "lower_bound_tag": self.lower_bound_tag,
            "lower_bounds": dict(self.lower_bounds),
            "method": self.method,
            "feasible": self.feasible,
            "certified": self.certified,
        }


def _swap_problem(p_xy, f_A, f_B):
    nx, ny = p_xy.axes
    p_yx = JointPmf((ny, nx), p_xy.table.T.reshape(-1))
    f_A2 = FunctionTable((ny, nx), f_B.range_size,
                         f_B.values.reshape(nx, ny).T.reshape(-1))
    f_B2 = FunctionTable((ny, nx), f_A.range_size,
                         f_A.values.reshape(nx, ny).T.reshape(-1))
    return p_yx, f_A2, f_B2


def _result_from_chain(p_xy, f_A, f_B, chain, method, lb, tag, bounds):
    rates = message_rates(p_xy, chain)
    achieved = float(sum(rates))
    res = computability_residuals(p_xy, chain, f_A, f_B)
    feasible = res[0] <= RESIDUAL_TOL and res[1] <= RESIDUAL_TOL
    certified = bool(feasible and achieved <= lb + CERTIFY_TOL)
    return SumRateResult(achieved, chain, res, rates, lb, tag, bounds,
                         method, feasible, certified)


# ---------------------------------------------------------------------------
# brute force over deterministic chains


def _rgs_strings(n: int, max_blocks: int):
    """Canonical set partitions of range(n) as restricted growth strings.

    a[0] = 0 and a[i] <= max(a[:i]) + 1, with all values below max_blocks,
    so each partition into at most max_blocks blocks appears exactly once.
    """
    if n == 0:
        yield ()
        return
    a = [0] * n
    mx = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0:
            cap = min(mx[i - 1] + 1, max_blocks - 1)
            if a[i] < cap:
                break
            i -= 1
        if i == 0:
            return
        a[i] += 1
        mx[i] = max(mx[i - 1], a[i])
        for k in range(i + 1, n):
            a[k] = 0
            mx[k] = mx[k - 1]


def _stirling2_row(n: int):
    """[S(n, 0), S(n, 1), ..., S(n, n)] by the standard recurrence."""
    row = [1]
    for m in range(1, n + 1):
        new = [0] * (m + 1)
        for k in range(1, m + 1):
            new[k] = k * row[k] if k < m else 0
            new[k] += row[k - 1]
        row = new
    return row


def _partition_count(n: int, max_blocks: int) -> int:
    row = _stirling2_row(n)
    return sum(row[k] for k in range(1, min(n, max_blocks) + 1))


def _one_hot_table(labels, n_blocks, cond_shape):
    """Deterministic conditional table from a flat label assignment."""
    tab = np.zeros(cond_shape + (n_blocks,))
    flat = tab.reshape(-1, n_blocks)
    flat[np.arange(len(labels)), list(labels)] = 1.0
    return tab


def min_sum_rate_bruteforce(p_xy: JointPmf, f_A: FunctionTable,
                            f_B: FunctionTable, t: int,
                            initial_location: str = "A",
                            caps=None) -> SumRateResult:
    """Exact minimum over deterministic chains for t <= 2.

    Messages are enumerated as canonical set partitions of the sender's
    conditioning alphabet (restricted growth strings), so relabelings are
    never visited twice.  Feasibility is decided combinatorially: a chain
    works iff each function is constant on every set of source values
    consistent with what its terminal knows.  Ties in the sum rate keep the
    first chain in enumeration order.

    For deterministic chains the one-round and two-round minima over
    partitions match the true optima at the default caps only in the cases
    covered by the exact bounds; the result is marked certified when the
    achieved rate meets the best lower bound within 1e-9.
    """
    if len(p_xy.axes) != 2:
        raise DomainError("need a two-axis joint pmf")
    if t not in (1, 2):
        raise DomainError("brute force handles t = 1 or 2 messages")
    if initial_location == "B":
        p2, fa2, fb2 = _swap_problem(p_xy, f_A, f_B)
        inner = min_sum_rate_bruteforce(p2, fa2, fb2, t, "A", caps)
        lb, tag, bounds = best_lower_bound(p_xy, f_A, f_B, t, "B")
        if inner.chain is None:
            return SumRateResult(math.inf, None, None, None, lb, tag, bounds,
                                 "bruteforce", False, False)
        flipped = AuxChain(t, "B", [np.array(x) for x in inner.chain.tables])
        return _result_from_chain(p_xy, f_A, f_B, flipped, "bruteforce",
                                  lb, tag, bounds)

    nx, ny = p_xy.axes
    if caps is None:
        caps = default_caps(nx, ny, t, "A")
    caps = [int(c) for c in caps]
    if len(caps) != t or any(c < 1 for c in caps):
        raise DomainError("caps must give a positive size for each message")
    for j in range(1, t + 1):
        own = nx if speaker(j, "A") == "A" else ny
        bound = cardinality_bound(j, t, own, caps[:j - 1])
        caps[j - 1] = min(caps[j - 1], bound)

    # count candidates before enumerating anything
    n1 = _partition_count(nx, caps[0])
    total = n1
    if t == 2:
        total = 0
        row = _stirling2_row(nx)
        for b1 in range(1, min(nx, caps[0]) + 1):
            total += row[b1] * _partition_count(ny * b1, caps[1])
    if total > MAX_BRUTEFORCE_CANDIDATES:
        raise CapacityError(
            "brute force would visit %d chains (limit %d); tighten the caps"
            % (total, MAX_BRUTEFORCE_CANDIDATES))

    lb, tag, bounds = best_lower_bound(p_xy, f_A, f_B, t)
    ptab = p_xy.table
    supp = ptab > 0.0
    fa = f_A.values.reshape(nx, ny)
    fb = f_B.values.reshape(nx, ny)

    def fa_constant(x, ys):
        vals = fa[x, ys]
        return vals.size == 0 or np.all(vals == vals[0])

    best_val = math.inf
    best_chain = None
    for g1 in _rgs_strings(nx, caps[0]):
        b1 = max(g1) + 1
        tab1 = _one_hot_table(g1, b1, (nx,))
        g1a = np.asarray(g1)
        # B decodes from (y, u1) whether or not it speaks afterwards
        ok_b = True
        for y in range(ny):
            for u1 in range(b1):
                xs = np.flatnonzero((g1a == u1) & supp[:, y])
                if xs.size and not np.all(fb[xs, y] == fb[xs[0], y]):
                    ok_b = False
                    break
            if not ok_b:
                break
        if not ok_b:
            continue
        if t == 1:
            ok_a = all(fa_constant(x, np.flatnonzero(supp[x])) for x in range(nx))
            if not ok_a:
                continue
            chain = AuxChain(1, "A", [tab1])
            val = chain_sum_rate(p_xy, chain)
            if val < best_val - 1e-15:
                best_val, best_chain = val, chain
            continue
        for g2 in _rgs_strings(ny * b1, caps[1]):
            b2 = max(g2) + 1
            g2a = np.asarray(g2).reshape(ny, b1)
            ok_a = True
            for x in range(nx):
                u1 = g1[x]
                ys = np.flatnonzero(supp[x])
                for u2 in range(b2):
                    sub = ys[g2a[ys, u1] == u2]
                    if not fa_constant(x, sub):
                        ok_a = False
                        break
                if not ok_a:
                    break
            if not ok_a:
                continue
            tab2 = _one_hot_table(g2a.reshape(-1), b2, (ny, b1))
            chain = AuxChain(2, "A", [tab1, tab2])
            val = chain_sum_rate(p_xy, chain)
            if val < best_val - 1e-15:
                best_val, best_chain = val, chain

    if best_chain is None:
        return SumRateResult(math.inf, None, None, None, lb, tag, bounds,
                             "bruteforce", False, False)
    return _result_from_chain(p_xy, f_A, f_B, best_chain, "bruteforce",
                              lb, tag, bounds)


# ---------------------------------------------------------------------------
# penalty method


def _project_rows_to_simplex(mat):
    """Euclidean projection of each row onto the probability simplex."""
    flat = mat.reshape(-1, mat.shape[-1])
    srt = np.sort(flat, axis=1)[:, ::-1]
    css = np.cumsum(srt, axis=1) - 1.0
    idx = np.arange(1, flat.shape[1] + 1)
    cond = srt - css / idx > 0
    rho = cond.sum(axis=1)
    theta = css[np.arange(flat.shape[0]), rho - 1] / rho
    out = np.clip(flat - theta[:, None], 0.0, None)
    return out.reshape(mat.shape)


def _entropy_of(q):
    return float(_xlog2x(q).sum())


class _PenaltyObjective:
    """Sum rate plus mu times the computability residuals, with gradient.

    Everything is expressed through joint entropies of the chain's full
    distribution P over (X, Y, U^t):

        objective = const - 2 H(XYU) + (1-mu)(H(XU) + H(YU))
                    + mu (H(f_A, X, U) + H(f_B, Y, U)).

    The gradient with respect to table i follows from
    d P(omega) / d W_i(row) = product of all other factors, so each table's
    gradient is a single reduction of (leave-one-out product) * g over the
    axes the table does not condition on.
    """

    def __init__(self, p_xy, f_A, f_B, t, sizes, initial_location):
        self.p = p_xy.table
        self.nx, self.ny = p_xy.axes
        self.t = t
        self.sizes = tuple(sizes)
        self.start = initial_location
        self.za = f_A.values.reshape(self.nx, self.ny)
        self.zb = f_B.values.reshape(self.nx, self.ny)
        self.ra = f_A.range_size
        self.rb = f_B.range_size
        self.const = 0.0  # entropy terms not depending on the tables
        hx = _entropy_of(self.p.sum(axis=1))
        hy = _entropy_of(self.p.sum(axis=0))
        hxy = _entropy_of(self.p)
        self.const = 2.0 * hxy - hx - hy
        self._ix = np.arange(self.nx)[:, None]
        self._iy = np.arange(self.ny)[None, :]

    def own_axis(self, i):
        return 0 if speaker(i + 1, self.start) == "A" else 1

    def _marginals(self, full):
        q_xu = full.sum(axis=1)
        q_yu = full.sum(axis=0)
        q_axu = np.zeros((self.ra, self.nx) + self.sizes)
        np.add.at(q_axu, (self.za, self._ix * np.ones_like(self.za)), full)
        q_byu = np.zeros((self.rb, self.ny) + self.sizes)
        np.add.at(q_byu, (self.zb, self._iy * np.ones_like(self.zb)), full)
        return q_xu, q_yu, q_axu, q_byu

    def value(self, tables, mu):
        full = _joint_table(self.p, tables, self.start)
        q_xu, q_yu, q_axu, q_byu = self._marginals(full)
        h_xyu = _entropy_of(full)
        h_xu = _entropy_of(q_xu)
        h_yu = _entropy_of(q_yu)
        h_a = _entropy_of(q_axu)
        h_b = _entropy_of(q_byu)
        sumrate = self.const - 2.0 * h_xyu + h_xu + h_yu
        res = (h_a - h_xu) + (h_b - h_yu)
        return sumrate + mu * res

    def value_and_grad(self, tables, mu):
        full = _joint_table(self.p, tables, self.start)
        q_xu, q_yu, q_axu, q_byu = self._marginals(full)
        h_xyu = _entropy_of(full)
        h_xu = _entropy_of(q_xu)
        h_yu = _entropy_of(q_yu)
        h_a = _entropy_of(q_axu)
        h_b = _entropy_of(q_byu)
        val = (self.const - 2.0 * h_xyu + h_xu + h_yu
               + mu * ((h_a - h_xu) + (h_b - h_yu)))

        def logq(q):
            return np.log2(np.maximum(q, 1e-18))

        g = 2.0 * logq(full)
        g -= (1.0 - mu) * logq(q_xu)[:, None]
        g -= (1.0 - mu) * logq(q_yu)[None, :]
        g -= mu * logq(q_axu)[self.za, self._ix]
        g -= mu * logq(q_byu)[self.zb, self._iy]

        grads = []
        for i in range(self.t):
            loo = self.p
            for k, tab in enumerate(tables):
                if k == i:
                    loo = loo[..., None] * np.ones((1,) * loo.ndim + (self.sizes[k],))
                else:
                    other = 1 - self.own_axis(k)
                    loo = loo[..., None] * np.expand_dims(tab, axis=other)
            prod = loo * g
            own = self.own_axis(i)
            keep = (own,) + tuple(range(2, 2 + i + 1))
            reduce_axes = tuple(a for a in range(prod.ndim) if a not in keep)
            grad = prod.sum(axis=reduce_axes)
            grads.append(grad)
        return val, grads


def _initial_tables(rng, restart, nx, ny, sizes, initial_location):
    tables = []
    for i, s in enumerate(sizes):
        own = nx if speaker(i + 1, initial_location) == "A" else ny
        shape = (own,) + tuple(sizes[:i]) + (s,)
        rows = int(np.prod(shape[:-1]))
        if restart % 3 == 2:
            # sharpened random deterministic maps
            labels = rng.integers(0, s, size=rows)
            tab = np.full((rows, s), 0.05 / max(s - 1, 1))
            tab[np.arange(rows), labels] = 0.95 if s > 1 else 1.0
            tab /= tab.sum(axis=1, keepdims=True)
        else:
            alpha = 1.0 if restart % 3 == 0 else 0.3
            tab = rng.dirichlet(np.full(s, alpha), size=rows)
        tables.append(tab.reshape(shape))
    return tables


def _harden(tables):
    out = []
    for tab in tables:
        flat = tab.reshape(-1, tab.shape[-1]).copy()
        mx = flat.max(axis=1)
        snap = mx >= 1.0 - 1e-3
        arg = flat.argmax(axis=1)
        flat[snap] = 0.0
        flat[np.flatnonzero(snap), arg[snap]] = 1.0
        keep = ~snap
        flat[keep] /= flat[keep].sum(axis=1, keepdims=True)
        out.append(flat.reshape(tab.shape))
    return out


def _pgd_stage(objective, tables, mu, max_iter=120):
    val, grads = objective.value_and_grad(tables, mu)
    step = 0.5
    stall = 0
    for _ in range(max_iter):
        accepted = False
        trial_step = step * 2.0
        for _ in range(40):
            cand = [_project_rows_to_simplex(tab - trial_step * gr)
                    for tab, gr in zip(tables, grads)]
            cand_val = objective.value(cand, mu)
            if cand_val < val - 1e-15:
                accepted = True
                break
            trial_step *= 0.5
            if trial_step < 1e-14:
                break
        if not accepted:
            break
        improvement = val - cand_val
        tables = cand
        step = trial_step
        val, grads = objective.value_and_grad(tables, mu)
        if improvement < 1e-11 * (1.0 + abs(val)):
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0
    return tables, val


def min_sum_rate_penalty(p_xy: JointPmf, f_A: FunctionTable,
                         f_B: FunctionTable, t: int,
                         initial_location: str = "A", caps=None,
                         seed: int = 0, n_restarts: int = 20,
                         schedule=DEFAULT_MU_SCHEDULE,
                         warm_starts=()) -> SumRateResult:
    """Penalty-method search over stochastic chains for any t.

    Minimizes sum rate + mu * (residual_A + residual_B) by projected
    gradient descent on the conditional tables, with mu stepped through
    ``schedule`` without resetting the iterate.  Each of the ``n_restarts``
    random starts is deterministic in (seed, restart index).  Final iterates
    are also hardened (rows within 1e-3 of deterministic snap to one-hot)
    and a candidate counts as feasible only if both exact residuals drop
    below 1e-6.  Chains in ``warm_starts`` are evaluated as-is and used as
    additional starting points, so the result is never worse than the best
    feasible warm start.

    This is a heuristic: the value is an upper bound on the optimum, exact
    only when it meets the reported lower bound (certified = True).
    """
    if len(p_xy.axes) != 2:
        raise DomainError("need a two-axis joint pmf")
    if t < 1:
        raise DomainError("need at least one message")
    if initial_location == "B":
        p2, fa2, fb2 = _swap_problem(p_xy, f_A, f_B)
        flipped_warm = []
        for ch in warm_starts:
            if ch.initial_location != "B":
                raise DomainError("warm starts must match initial_location")
            flipped_warm.append(AuxChain(ch.t, "A",
                                         [np.array(x) for x in ch.tables]))
        inner = min_sum_rate_penalty(p2, fa2, fb2, t, "A", caps, seed,
                                     n_restarts, schedule, flipped_warm)
        lb, tag, bounds = best_lower_bound(p_xy, f_A, f_B, t, "B")
        if inner.chain is None:
            return SumRateResult(math.inf, None, None, None, lb, tag, bounds,
                                 "penalty", False, False)
        back = AuxChain(t, "B", [np.array(x) for x in inner.chain.tables])
        return _result_from_chain(p_xy, f_A, f_B, back, "penalty",
                                  lb, tag, bounds)

    nx, ny = p_xy.axes
    if caps is None:
        caps = default_caps(nx, ny, t, "A")
    sizes = [int(c) for c in caps]
    if len(sizes) != t or any(s < 1 for s in sizes):
        raise DomainError("caps must give a positive size for each message")
    for j in range(1, t + 1):
        own = nx if speaker(j, "A") == "A" else ny
        bound = cardinality_bound(j, t, own, sizes[:j - 1])
        sizes[j - 1] = min(sizes[j - 1], bound)

    lb, tag, bounds = best_lower_bound(p_xy, f_A, f_B, t)
    objective = _PenaltyObjective(p_xy, f_A, f_B, t, sizes, "A")

    starts = []
    for r in range(n_restarts):
        rng = np.random.default_rng([seed, r])
        starts.append(_initial_tables(rng, r, nx, ny, sizes, "A"))
    for ch in warm_starts:
        if ch.t != t or ch.initial_location != "A":
            raise DomainError("warm starts must have the same t and start")
        padded = []
        for i, tab in enumerate(ch.tables):
            if tuple(tab.shape[1:]) == tuple(sizes[:i]) + (sizes[i],):
                padded.append(np.array(tab))
                continue
            big = np.zeros((tab.shape[0],) + tuple(sizes[:i]) + (sizes[i],))
            idx = tuple(slice(0, n) for n in tab.shape)
            big[idx] = tab
            # unreachable rows still need to be distributions
            flat = big.reshape(-1, sizes[i])
            empty = flat.sum(axis=1) == 0.0
            flat[empty, 0] = 1.0
            padded.append(big)
        starts.append(padded)

    best = None  # (value, order, chain, residuals)
    fallback = None  # least-infeasible candidate, for reporting
    for order, init in enumerate(starts):
        tables = [np.array(tab) for tab in init]
        # warm starts are also scored exactly as given, before any descent
        if order >= n_restarts:
            chain = AuxChain(t, "A", tables)
            res = computability_residuals(p_xy, chain, f_A, f_B)
            val = chain_sum_rate(p_xy, chain)
            if res[0] <= RESIDUAL_TOL and res[1] <= RESIDUAL_TOL:
                key = (val, order)
                if best is None or key < best[:2]:
                    best = (val, order, chain, res)
        for mu in schedule:
            tables, _ = _pgd_stage(objective, tables, mu)
        for cand in (tables, _harden(tables)):
            chain = AuxChain(t, "A", cand)
            res = computability_residuals(p_xy, chain, f_A, f_B)
            val = chain_sum_rate(p_xy, chain)
            if res[0] <= RESIDUAL_TOL and res[1] <= RESIDUAL_TOL:
                key = (val, order)
                if best is None or key < best[:2]:
                    best = (val, order, chain, res)
            else:
                key = (res[0] + res[1], order)
                if fallback is None or key < fallback[:2]:
                    fallback = (res[0] + res[1], order, chain, res, val)

    if best is not None:
        val, _, chain, res = best
        rates = message_rates(p_xy, chain)
        certified = bool(val <= lb + CERTIFY_TOL)
        return SumRateResult(float(val), chain, res, rates, lb, tag, bounds,
                             "penalty", True, certified)
    if fallback is not None:
        _, _, chain, res, val = fallback
        rates = message_rates(p_xy, chain)
        return SumRateResult(float(val), chain, res, rates, lb, tag, bounds,
                             "penalty", False, False)
    return SumRateResult(math.inf, None, None, None, lb, tag, bounds,
                         "penalty", False, False)


# ---------------------------------------------------------------------------
# reference chains


def and_three_message_chain() -> AuxChain:
    """Three-message chain computing AND at both binary terminals.

    A first sends U1 = X or W with W an independent fair bit, B replies
    U2 = Y and U1, and A finishes with U3 = X and U2.  U3 equals X and Y
    with certainty, so both residuals vanish for any full-support source.
    The tables do not depend on the source distribution.
    """
    t1 = np.array([[0.5, 0.5], [0.0, 1.0]])
    t2 = np.zeros((2, 2, 2))
    for y in range(2):
        for u1 in range(2):
            t2[y, u1, y & u1] = 1.0
    t3 = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for u1 in range(2):
            for u2 in range(2):
                t3[x, u1, u2, x & u2] = 1.0
    return AuxChain(3, "A", [t1, t2, t3])


def and_three_message_rate(p: float) -> Bits:
    """Closed-form sum rate of the three-message AND chain on a symmetric
    binary source with crossover p: (5/4) h(p) + (1/2) h((1-p)/2) - (1-p)/2.
    """
    if not 0.0 < p < 1.0:
        raise DomainError("need crossover strictly inside (0, 1)")
    return (1.25 * binary_entropy(p)
            + 0.5 * binary_entropy((1.0 - p) / 2.0)
            - (1.0 - p) / 2.0)
