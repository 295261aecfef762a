"""Rate allocation curves for interactive AND computation.

Both terminals hold independent bits, X ~ Ber(p) and Y ~ Ber(q), and want
X and Y.  A protocol is summarized by how much of the zero mass each side
has ruled out: a monotone curve from (0, 0) to (1-p, 1-q) in the
(alpha, beta) plane, where alpha is the X mass confirmed to be zero and
beta the Y mass.  Splitting the curve into stairs gives an alternating
protocol whose per-message rates follow from the marginal cost weights

    w_x(v) = log2((1-v) / (1-p-v)),      w_y(v) = log2((1-v) / (1-q-v)),

with antiderivatives F_x(v) = -(1-v) h((p/(1-v)))(binary entropy), so
F_x(0) = -h(p) and F_x(1-p) = 0.  Letting the number of stairs grow, the
sum rate converges to a curve integral; the integral is minimized by a
piecewise linear curve with at most one knee, and its value has a closed
form.

Curves are parameterized by normalized taxicab progress, s in [0, 1] with
alpha(s) + beta(s) = s * ((1-p) + (1-q)).
"""

import math

import numpy as np

from .info_core import Bits, DomainError, binary_entropy
from .sum_rate import AuxChain

CURVE_TOL = 1e-12


def _check_pq(p, q):
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DomainError("need source parameters strictly inside (0, 1)")


def weight_x(v: float, p: float) -> Bits:
    """Marginal rate cost for terminal A to rule out zero mass at level v."""
    _check_pq(p, p)
    if not 0.0 <= v < 1.0 - p:
        raise DomainError("the weight is defined for 0 <= v < 1-p")
    return math.log2((1.0 - v) / (1.0 - p - v))


def weight_y(v: float, q: float) -> Bits:
    return weight_x(v, q)


def weight_antiderivative_x(v: float, p: float) -> Bits:
    """F_x with F_x' = w_x, F_x(0) = -h(p), F_x(1-p) = 0."""
    _check_pq(p, p)
    if not 0.0 <= v <= 1.0 - p + 1e-15:
        raise DomainError("the antiderivative is defined on [0, 1-p]")
    rest = 1.0 - v
    if rest <= p:
        return 0.0
    return -rest * binary_entropy(p / rest)


def weight_antiderivative_y(v: float, q: float) -> Bits:
    return weight_antiderivative_x(v, q)


class AllocationCurve:
    """Monotone piecewise linear path from (0, 0) to (1-p, 1-q).

    Consecutive duplicate vertices are dropped; both coordinates must be
    nondecreasing along the path.
    """

    def __init__(self, p, q, vertices):
        _check_pq(p, q)
        self.p = float(p)
        self.q = float(q)
        pts = [(float(a), float(b)) for a, b in vertices]
        if len(pts) < 2:
            raise DomainError("a curve needs at least two vertices")
        if abs(pts[0][0]) > CURVE_TOL or abs(pts[0][1]) > CURVE_TOL:
            raise DomainError("the curve must start at (0, 0)")
        end = (1.0 - self.p, 1.0 - self.q)
        if abs(pts[-1][0] - end[0]) > CURVE_TOL or abs(pts[-1][1] - end[1]) > CURVE_TOL:
            raise DomainError("the curve must end at (1-p, 1-q)")
        pts[0] = (0.0, 0.0)
        pts[-1] = end
        clean = [pts[0]]
        for a, b in pts[1:]:
            pa, pb = clean[-1]
            if a < pa - CURVE_TOL or b < pb - CURVE_TOL:
                raise DomainError("curve coordinates must be nondecreasing")
            if a - pa <= CURVE_TOL and b - pb <= CURVE_TOL:
                continue
            clean.append((max(a, pa), max(b, pb)))
        if len(clean) < 2:
            raise DomainError("the curve has no extent")
        self.vertices = tuple(clean)
        steps = [a1 - a0 + b1 - b0
                 for (a0, b0), (a1, b1) in zip(clean, clean[1:])]
        total = sum(steps)
        self._s_knots = [0.0]
        acc = 0.0
        for st in steps:
            acc += st
            self._s_knots.append(acc / total)
        self._s_knots[-1] = 1.0
        self._total = total

    def segments(self):
        return list(zip(self.vertices, self.vertices[1:]))

    def point_at(self, s: float):
        """(alpha, beta) at normalized taxicab progress s in [0, 1]."""
        if not 0.0 <= s <= 1.0:
            raise DomainError("curve parameter must lie in [0, 1]")
        knots = self._s_knots
        for k in range(len(knots) - 1):
            if s <= knots[k + 1] or k == len(knots) - 2:
                lo, hi = knots[k], knots[k + 1]
                frac = 0.0 if hi == lo else (s - lo) / (hi - lo)
                (a0, b0), (a1, b1) = self.vertices[k], self.vertices[k + 1]
                return (a0 + frac * (a1 - a0), b0 + frac * (b1 - b0))
        raise AssertionError("unreachable")

    def to_json(self):
        return {"p": self.p, "q": self.q,
                "vertices": [list(v) for v in self.vertices]}

    def __repr__(self):
        return "AllocationCurve(p=%g, q=%g, %d vertices)" % (
            self.p, self.q, len(self.vertices))


def diagonal_curve(p: float, q: float) -> AllocationCurve:
    """Both terminals resolve their zero mass in lockstep."""
    return AllocationCurve(p, q, [(0.0, 0.0), (1.0 - p, 1.0 - q)])


def optimal_curve(p: float, q: float) -> AllocationCurve:
    """Curve minimizing the infinite-message sum rate.

    The side with the rarer one (larger zero mass) rules out alone until
    the remaining odds match, then both proceed proportionally.
    """
    _check_pq(p, q)
    if q >= p:
        knee = ((q - p) / q, 0.0)
    else:
        knee = (0.0, (p - q) / p)
    return AllocationCurve(p, q, [(0.0, 0.0), knee, (1.0 - p, 1.0 - q)])


def uniform_partition(n_stairs: int):
    """n_stairs + 1 equally spaced parameter values on [0, 1]."""
    if n_stairs < 1:
        raise DomainError("need at least one stair")
    return [i / n_stairs for i in range(n_stairs + 1)]


def _check_partition(partition):
    s = [float(v) for v in partition]
    if len(s) < 2 or abs(s[0]) > CURVE_TOL or abs(s[-1] - 1.0) > CURVE_TOL:
        raise DomainError("a partition must run from 0 to 1")
    s[0], s[-1] = 0.0, 1.0
    if any(b <= a for a, b in zip(s, s[1:])):
        raise DomainError("partition values must increase strictly")
    return s


def staircase_rates(curve: AllocationCurve, partition):
    """Per-message rates of the alternating staircase protocol.

    Stair i moves A from alpha(s_{i-1}) to alpha(s_i) and then B from
    beta(s_{i-1}) to beta(s_i).  A's message is heard while B still holds
    its previous resolution level; B replies after A's move:

        R_{2i-1} = (1 - beta(s_{i-1})) (F_x(alpha(s_i)) - F_x(alpha(s_{i-1})))
        R_{2i}   = (1 - alpha(s_i))    (F_y(beta(s_i))  - F_y(beta(s_{i-1})))

    A partition with m stairs yields 2m rates; one stair reproduces the
    two-message rates (h(p), p h(q)).
    """
    s = _check_partition(partition)
    p, q = curve.p, curve.q
    pts = [curve.point_at(v) for v in s]
    rates = []
    for (a0, b0), (a1, b1) in zip(pts, pts[1:]):
        fx0 = weight_antiderivative_x(a0, p)
        fx1 = weight_antiderivative_x(a1, p)
        fy0 = weight_antiderivative_y(b0, q)
        fy1 = weight_antiderivative_y(b1, q)
        rates.append((1.0 - b0) * (fx1 - fx0))
        rates.append((1.0 - a1) * (fy1 - fy0))
    return rates


def staircase_sum_rate(curve: AllocationCurve, partition) -> Bits:
    return float(sum(staircase_rates(curve, partition)))


def _adaptive_simpson(f, a, b, tol, depth=48):
    """Adaptive Simpson quadrature with absolute tolerance."""
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, fa, m, fm, b, fb, whole, tol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = left + right - whole
        if abs(err) <= 15.0 * tol or depth <= 0:
            return left + right + err / 15.0
        return (rec(a, fa, lm, flm, m, fm, left, tol / 2.0, depth - 1)
                + rec(m, fm, rm, frm, b, fb, right, tol / 2.0, depth - 1))

    return rec(a, fa, m, fm, b, fb, whole, tol, depth)


def integral_sum_rate(curve: AllocationCurve, tol: float = 1e-10) -> Bits:
    """Infinite-message sum rate of a curve.

    The limit of the staircase sums is

        int_0^{1-p} w_x(v) (1 - beta at alpha=v) dv
      + int_0^{1-q} w_y(v) (1 - alpha at beta=v) dv.

    Each linear segment is integrated by parts so that only the bounded
    antiderivative enters the quadrature; the weights' log singularities
    at the right endpoints never get evaluated.
    """
    p, q = curve.p, curve.q
    total = 0.0
    for (a0, b0), (a1, b1) in curve.segments():
        da, db = a1 - a0, b1 - b0
        if da > CURVE_TOL:
            # factor (1 - beta(v)) is linear in v = alpha on this segment
            slope = db / da
            f0, f1 = 1.0 - b0, 1.0 - b1
            fx = lambda v: weight_antiderivative_x(v, p)
            area = _adaptive_simpson(fx, a0, a1, tol)
            total += f1 * fx(a1) - f0 * fx(a0) - (-slope) * area
        if db > CURVE_TOL:
            slope = da / db
            f0, f1 = 1.0 - a0, 1.0 - a1
            fy = lambda v: weight_antiderivative_y(v, q)
            area = _adaptive_simpson(fy, b0, b1, tol)
            total += f1 * fy(b1) - f0 * fy(b0) - (-slope) * area
    return total


def closed_form_infinite_rate(p: float, q: float) -> Bits:
    """Minimum infinite-message sum rate over all allocation curves.

    For q >= p this is h(p) + p h(q) + p log2 q + p (1-q) log2 e; the
    other ordering swaps the roles.
    """
    _check_pq(p, q)
    if q < p:
        p, q = q, p
    return (binary_entropy(p) + p * binary_entropy(q)
            + p * math.log2(q) + p * (1.0 - q) * math.log2(math.e))


def two_message_rates(p: float, q: float):
    """(R_1, R_2) of the one-stair staircase: A describes X, then B
    describes Y only where X = 1."""
    _check_pq(p, q)
    return [binary_entropy(p), p * binary_entropy(q)]


def region_split(curve: AllocationCurve):
    """(W_x, W_y): plane areas swept by each terminal's messages.

    W_x integrates (1 - beta) along alpha and W_y integrates (1 - alpha)
    along beta; for every monotone curve they add up to 1 - pq.
    """
    wx = 0.0
    wy = 0.0
    for (a0, b0), (a1, b1) in curve.segments():
        wx += (a1 - a0) * (1.0 - 0.5 * (b0 + b1))
        wy += (b1 - b0) * (1.0 - 0.5 * (a0 + a1))
    return (wx, wy)


def staircase_chain(curve: AllocationCurve, partition) -> AuxChain:
    """Binary auxiliary chain realizing a staircase protocol exactly.

    Message 2i-1 is A's survival indicator: it stays 1 with probability 1
    when X = 1 and with probability (1-p-a_i) / (1-p-a_{i-1}) when X = 0,
    given that every earlier message was 1.  Once any message is 0 all
    later ones are 0.  Even messages do the same for Y with the b levels.
    After the last stair a_m = 1-p and b_m = 1-q, so the final message
    equals X and Y and both terminals learn the value.

    The chain's per-message rates reproduce staircase_rates, and its t
    messages are alternating with A first.
    """
    s = _check_partition(partition)
    p, q = curve.p, curve.q
    pts = [curve.point_at(v) for v in s]
    tables = []
    n_prev = 0
    for i in range(1, len(pts)):
        a_prev, b_prev = pts[i - 1]
        a_cur, b_cur = pts[i]
        for side in ("A", "B"):
            if side == "A":
                lvl_prev, lvl_cur, mass = a_prev, a_cur, 1.0 - p
            else:
                lvl_prev, lvl_cur, mass = b_prev, b_cur, 1.0 - q
            den = mass - lvl_prev
            survive = (mass - lvl_cur) / den if den > CURVE_TOL else 0.0
            survive = min(max(survive, 0.0), 1.0)
            tab = np.zeros((2,) + (2,) * n_prev + (2,))
            tab[..., 0] = 1.0  # any dead history stays dead
            all_ones = (slice(None),) + (1,) * n_prev
            tab[all_ones + (0,)] = [1.0 - survive, 0.0]
            tab[all_ones + (1,)] = [survive, 1.0]
            tables.append(tab)
            n_prev += 1
    return AuxChain(n_prev, "A", tables)
