"""Cut-set bounds, LP machinery, and reference schemes for networks.

A network has n nodes, each holding one axis of a joint pmf and possibly
wanting a function of all sources, and a set of directed edges.  For every
node subset S, messages crossing from S to its complement must carry at
least H(functions wanted outside S | sources outside S) bits per symbol.
Minimizing total rate subject to all cut constraints is a small linear
program; this module builds it, solves it with a two-phase simplex, and
cross-checks by brute-force vertex enumeration.

Also here: per-edge rates of simple achievable schemes (modulo-sum coding
for the two-help-one XOR network, decode-and-forward relaying, sequential
AND accumulation on a star), and the schedule transform that serializes a
concurrent two-way protocol into alternating messages.
"""

import itertools
import math

import numpy as np

from .info_core import (
    Bits,
    CapacityError,
    DomainError,
    FunctionTable,
    JointPmf,
    binary_entropy,
    conditional_entropy,
    with_function_axis,
)

PIVOT_TOL = 1e-9
MAX_ALL_CUT_NODES = 12
MAX_VERTEX_COMBINATIONS = 2_000_000


class NetworkSpec:
    """Nodes with sources, directed edges, and per-node target functions.

    functions[j] is a FunctionTable over all node alphabets (what node j
    wants) or None when node j wants nothing.  Node indices are 0-based.
    """

    def __init__(self, joint: JointPmf, edges, functions):
        self.joint = joint
        self.n_nodes = len(joint.axes)
        if self.n_nodes < 2:
            raise DomainError("a network needs at least two nodes")
        seen = set()
        clean = []
        for e in edges:
            j, k = int(e[0]), int(e[1])
            if not (0 <= j < self.n_nodes and 0 <= k < self.n_nodes):
                raise DomainError("edge (%d, %d) leaves the node range" % (j, k))
            if j == k:
                raise DomainError("self loops carry no information")
            if (j, k) in seen:
                raise DomainError("duplicate edge (%d, %d)" % (j, k))
            seen.add((j, k))
            clean.append((j, k))
        if not clean:
            raise DomainError("a network needs at least one edge")
        self.edges = tuple(clean)
        functions = list(functions)
        if len(functions) != self.n_nodes:
            raise DomainError("need one function entry per node (None allowed)")
        for j, f in enumerate(functions):
            if f is None:
                continue
            if tuple(f.domain_axes) != tuple(joint.axes):
                raise DomainError(
                    "function at node %d must take all %d sources"
                    % (j, self.n_nodes))
        self.functions = tuple(functions)

    def __repr__(self):
        return "NetworkSpec(%d nodes, %d edges)" % (
            self.n_nodes, len(self.edges))


def cut_entropy_bound(network: NetworkSpec, cut) -> Bits:
    """H(functions outside the cut | sources outside the cut).

    cut is the set of nodes on the sending side; the bound constrains the
    total rate on edges leaving it.
    """
    cut = frozenset(int(j) for j in cut)
    if not cut or not cut < set(range(network.n_nodes)):
        raise DomainError("a cut must be a nonempty proper subset of nodes")
    rest = sorted(set(range(network.n_nodes)) - cut)
    targets = [network.functions[j] for j in rest
               if network.functions[j] is not None]
    if not targets:
        return 0.0
    ext = network.joint
    all_axes = tuple(range(network.n_nodes))
    f_axes = []
    for f in targets:
        ext = with_function_axis(ext, f, all_axes)
        f_axes.append(len(ext.axes) - 1)
    return conditional_entropy(ext, tuple(f_axes), tuple(rest))


class LPProblem:
    """minimize c . x subject to A x >= b and x >= 0."""

    def __init__(self, c, A, b, var_names=None):
        self.c = np.asarray(c, dtype=float)
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.b = np.asarray(b, dtype=float)
        if self.A.shape != (len(self.b), len(self.c)):
            raise DomainError("constraint matrix shape mismatch")
        self.var_names = (tuple(var_names) if var_names is not None
                          else tuple("x%d" % i for i in range(len(self.c))))
        if len(self.var_names) != len(self.c):
            raise DomainError("need one name per variable")


class LPSolution:
    def __init__(self, status, optimum, x):
        self.status = status  # "optimal" | "infeasible" | "unbounded"
        self.optimum = optimum
        self.x = x

    def __repr__(self):
        return "LPSolution(%s, optimum=%s)" % (self.status, self.optimum)


def build_cutset_lp(network: NetworkSpec, cuts="all", extra_cut_bounds=()):
    """LP lower-bounding the total rate: one variable per directed edge.

    cuts is "all" (every nonempty proper subset; needs at most 12 nodes)
    or an iterable of cuts.  Each extra_cut_bounds entry (cut, value) adds
    a user constraint on the rate crossing the cut in both directions
    together.  The objective is the plain sum of all edge rates.
    """
    n = network.n_nodes
    if cuts == "all":
        if n > MAX_ALL_CUT_NODES:
            raise CapacityError(
                "all-cut enumeration is limited to %d nodes, got %d"
                % (MAX_ALL_CUT_NODES, n))
        cut_list = []
        for r in range(1, n):
            cut_list.extend(frozenset(c)
                            for c in itertools.combinations(range(n), r))
    else:
        cut_list = [frozenset(int(j) for j in c) for c in cuts]
        for c in cut_list:
            if not c or not c < set(range(n)):
                raise DomainError(
                    "a cut must be a nonempty proper subset of nodes")
    n_vars = len(network.edges)
    rows = []
    rhs = []
    for cut in cut_list:
        bound = cut_entropy_bound(network, cut)
        if bound <= 0.0:
            continue
        row = np.zeros(n_vars)
        for idx, (j, k) in enumerate(network.edges):
            if j in cut and k not in cut:
                row[idx] = 1.0
        rows.append(row)
        rhs.append(bound)
    for cut, value in extra_cut_bounds:
        cut = frozenset(int(j) for j in cut)
        if not cut or not cut < set(range(n)):
            raise DomainError(
                "a cut must be a nonempty proper subset of nodes")
        value = float(value)
        if value <= 0.0:
            continue
        row = np.zeros(n_vars)
        for idx, (j, k) in enumerate(network.edges):
            if (j in cut) != (k in cut):
                row[idx] = 1.0
        rows.append(row)
        rhs.append(value)
    names = ["%d->%d" % (j, k) for j, k in network.edges]
    if not rows:
        rows = [np.zeros(n_vars)]
        rhs = [0.0]
    return LPProblem(np.ones(n_vars), np.vstack(rows), np.array(rhs), names)


def _pivot(tab, row, col):
    tab[row] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row and abs(tab[r, col]) > 0.0:
            tab[r] -= tab[r, col] * tab[row]


def _simplex_phase(tab, basis, n_total, tol):
    """Bland-rule minimization on a tableau whose last row is the objective
    and last column the rhs.  Returns "optimal" or "unbounded"."""
    m = tab.shape[0] - 1
    for _ in range(50_000):
        col = -1
        for j in range(n_total):
            if tab[m, j] < -tol:
                col = j
                break
        if col < 0:
            return "optimal"
        row = -1
        best = math.inf
        for i in range(m):
            if tab[i, col] > tol:
                ratio = tab[i, -1] / tab[i, col]
                if (ratio < best - tol
                        or (abs(ratio - best) <= tol
                            and (row < 0 or basis[i] < basis[row]))):
                    best = ratio
                    row = i
        if row < 0:
            return "unbounded"
        _pivot(tab, row, col)
        basis[row] = col
    raise CapacityError("simplex did not terminate")


def solve_lp(lp: LPProblem, tol: float = PIVOT_TOL) -> LPSolution:
    """Two-phase primal simplex with Bland's anti-cycling rule."""
    A = lp.A.copy()
    b = lp.b.copy()
    keep = []
    for i in range(len(b)):
        if np.all(np.abs(A[i]) <= tol):
            if b[i] > tol:
                return LPSolution("infeasible", None, None)
            continue
        keep.append(i)
    A = A[keep]
    b = b[keep]
    flip = b < 0
    A[flip] *= -1.0
    b[flip] = -b[flip]
    sense = np.where(flip, 1.0, -1.0)  # >= rows get surplus, flipped get slack
    m, n = A.shape
    if m == 0:
        x = np.zeros(n)
        return LPSolution("optimal", float(lp.c @ x), x)

    # columns: x (n) | slack or surplus (m) | artificial (m) | rhs
    n_total = n + 2 * m
    tab = np.zeros((m + 1, n_total + 1))
    tab[:m, :n] = A
    for i in range(m):
        tab[i, n + i] = sense[i]
        tab[i, n + m + i] = 1.0
    tab[:m, -1] = b
    basis = [n + m + i for i in range(m)]
    # phase 1 objective: sum of artificials, expressed over the basis
    tab[m, n + m:n_total] = 1.0
    for i in range(m):
        tab[m] -= tab[i]
    status = _simplex_phase(tab, basis, n_total, tol)
    if status != "optimal" or -tab[m, -1] > 1e-7:
        return LPSolution("infeasible", None, None)
    # remove artificials still in the basis (degenerate rows)
    drop = []
    for i in range(m):
        if basis[i] >= n + m:
            for j in range(n + m):
                if abs(tab[i, j]) > tol:
                    _pivot(tab, i, j)
                    basis[i] = j
                    break
            else:
                drop.append(i)
    if drop:
        rows = [i for i in range(m) if i not in drop]
        tab = tab[rows + [m]]
        basis = [basis[i] for i in rows]
        m = len(rows)
    # phase 2 objective
    tab[m, :] = 0.0
    tab[m, :n] = lp.c
    for i in range(m):
        if basis[i] < n:
            tab[m] -= lp.c[basis[i]] * tab[i]
    tab[:, n + m:n_total] = 0.0  # artificials are gone for good
    status = _simplex_phase(tab, basis, n + m, tol)
    if status != "optimal":
        return LPSolution(status, None, None)
    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i, -1]
    return LPSolution("optimal", float(lp.c @ x), x)


def solve_lp_by_vertices(lp: LPProblem, tol: float = 1e-9) -> LPSolution:
    """Exhaustive check: evaluate the objective at every basic feasible
    point (vertex of the polyhedron).  Exponential; only for small LPs.
    """
    m, n = lp.A.shape
    rows = np.vstack([lp.A, np.eye(n)])
    rhs = np.concatenate([lp.b, np.zeros(n)])
    total = math.comb(len(rhs), n)
    if total > MAX_VERTEX_COMBINATIONS:
        raise CapacityError(
            "vertex enumeration would solve %d systems (limit %d)"
            % (total, MAX_VERTEX_COMBINATIONS))
    best = None
    best_x = None
    for combo in itertools.combinations(range(len(rhs)), n):
        M = rows[list(combo)]
        r = rhs[list(combo)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, r)
        if np.any(x < -1e-8):
            continue
        if np.any(lp.A @ x < lp.b - 1e-8):
            continue
        val = float(lp.c @ x)
        if best is None or val < best - tol:
            best = val
            best_x = x
    if best is None:
        return LPSolution("infeasible", None, None)
    return LPSolution("optimal", best, best_x)


# ---------------------------------------------------------------------------
# reference schemes


def modulo_sum_rates(p: float):
    """Per-edge rates of binary modulo-sum coding on the two-help-one
    network: nodes 0 and 1 hold a symmetric binary pair with crossover p
    and node 2 wants the XOR.  Each helper ships a binned description of
    rate h(p); the bins add up modulo two to the XOR."""
    if not 0.0 < p < 1.0:
        raise DomainError("need crossover strictly inside (0, 1)")
    h = binary_entropy(p)
    return {(0, 2): h, (1, 2): h}


def relay_rates(p_12: JointPmf, f: FunctionTable):
    """Decode-and-forward on the chain 0 -> 1 -> 2: node 0 describes its
    source to node 1 at H(X0 | X1); node 1 computes f(x0, x1) and ships it
    losslessly at H(f).  Returns {(0, 1): ..., (1, 2): ...}."""
    if len(p_12.axes) != 2:
        raise DomainError("the relay source pmf must have two axes")
    if tuple(f.domain_axes) != tuple(p_12.axes):
        raise DomainError("the relay function must take both sources")
    first = conditional_entropy(p_12, (0,), (1,))
    ext = with_function_axis(p_12, f, (0, 1))
    second = conditional_entropy(ext, (2,), ())
    return {(0, 1): first, (1, 2): second}


def star_and_rates(probs):
    """Per-message rates of sequential AND accumulation on a star.

    Party j holds an independent Ber(probs[j]) bit and everyone wants the
    AND of all bits.  Stage i (1-based, up to m-1) ships the running
    conjunction of the first i bits to party i+1 at rate h(prod of first i
    probs) and party i+1 answers only where that conjunction is alive, at
    rate (prod of first i probs) * h(probs[i+1]).  The total stays bounded
    as m grows when all bits are fair, while the one-bit-each baseline of
    m - 1 bits does not.
    """
    probs = [float(v) for v in probs]
    if len(probs) < 2:
        raise DomainError("need at least two parties")
    if any(not 0.0 < v < 1.0 for v in probs):
        raise DomainError("bit probabilities must sit strictly inside (0, 1)")
    rates = []
    pi = 1.0
    for i in range(len(probs) - 1):
        pi *= probs[i]
        rates.append(binary_entropy(pi))
        rates.append(pi * binary_entropy(probs[i + 1]))
    return rates


def star_and_total(probs) -> Bits:
    return float(sum(star_and_rates(probs)))


def star_fair_bit_limit() -> Bits:
    """Supremum of star_and_total over m when every bit is fair."""
    return 3.0 + math.log2(math.e)


# ---------------------------------------------------------------------------
# schedule serialization


def concurrent_to_alternating(n_rounds: int):
    """Serialize a concurrent two-way protocol into alternating messages.

    A concurrent protocol has n_rounds rounds; in round i terminal A sends
    payload ("A", i) and terminal B sends ("B", i), each computed from the
    sender's source and the payloads it received in rounds before i.  The
    serialized schedule keeps every payload but batches them so senders
    strictly alternate, starting with A:

        message 1:          ("A", 1)
        message j, 1<j<=n:  both remaining payloads of rounds j-1 and j
                            from one side, alternating sides
        message n+1:        the last unsent payload

    yielding exactly n_rounds + 1 alternating messages whose payload
    multiset (and so total rate) matches the concurrent protocol.
    """
    t = int(n_rounds)
    if t < 1:
        raise DomainError("need at least one round")
    messages = [("A", (("A", 1),))]
    for j in range(2, t + 1):
        side = "B" if j % 2 == 0 else "A"
        messages.append((side, ((side, j - 1), (side, j))))
    last = "A" if t % 2 == 0 else "B"
    messages.append((last, ((last, t),)))
    validate_alternating_schedule(messages, t)
    return messages


def validate_alternating_schedule(messages, n_rounds: int):
    """Check a serialized schedule: senders alternate starting with A, every
    payload appears exactly once from its own side, and when a payload
    ("A", i) is sent, all payloads ("B", j) with j < i were already
    delivered (and symmetrically), so each terminal can replay its
    concurrent computation.  Raises DomainError on any violation.
    """
    expected = {("A", i) for i in range(1, n_rounds + 1)}
    expected |= {("B", i) for i in range(1, n_rounds + 1)}
    seen = set()
    for pos, (sender, payloads) in enumerate(messages):
        want = "A" if pos % 2 == 0 else "B"
        if sender != want:
            raise DomainError(
                "message %d must come from %s" % (pos + 1, want))
        for side, i in payloads:
            if side != sender:
                raise DomainError(
                    "payload (%s, %d) sent by %s" % (side, i, sender))
            if (side, i) in seen:
                raise DomainError(
                    "payload (%s, %d) sent twice" % (side, i))
            other = "B" if side == "A" else "A"
            for j in range(1, i):
                if (other, j) not in seen:
                    raise DomainError(
                        "payload (%s, %d) depends on undelivered (%s, %d)"
                        % (side, i, other, j))
            seen.add((side, i))
    if seen != expected:
        raise DomainError("schedule does not carry every payload exactly once")


def merge_schedule_rates(messages, rates_a, rates_b):
    """Per-message rates of a serialized schedule from per-round rates.

    rates_a[i-1] is the rate of payload ("A", i); likewise rates_b.  The
    sum over the serialized messages equals sum(rates_a) + sum(rates_b).
    """
    out = []
    for _, payloads in messages:
        tot = 0.0
        for side, i in payloads:
            src = rates_a if side == "A" else rates_b
            if not 1 <= i <= len(src):
                raise DomainError("payload round %d has no rate" % i)
            tot += float(src[i - 1])
        out.append(tot)
    return out
