"""Lattice points of half the Newton polytope, with exactly checkable LP witnesses.

For each candidate alpha the question "is 2*alpha in conv(support f)?" is a
linear feasibility problem.  A float LP (HiGHS through scipy) suggests the
answer, which is then certified exactly: membership by rational convex
weights, rejection by a rational separating hyperplane.  If the float answer
cannot be certified, an exact phase-one simplex over the rationals decides.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from .poly import Monomial, MPoly

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Membership:
    """2*alpha = sum_j weight_j * point_j with nonnegative weights summing to one."""

    weights: Tuple[Tuple[Monomial, Fraction], ...]


@dataclass(frozen=True)
class Separation:
    """normal . p <= offset on every support point p, and normal . 2*alpha > offset."""

    normal: Tuple[Fraction, ...]
    offset: Fraction


Witness = Union[Membership, Separation]


@dataclass
class SupportSet:
    nvars: int
    points: Tuple[Monomial, ...]
    witnesses: Dict[Monomial, Witness] = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self) -> Dict[Monomial, int]:
        return {a: k for k, a in enumerate(self.points)}


def _double(a: Monomial) -> Monomial:
    return tuple(2 * x for x in a)


def check_membership(target: Monomial, w: Membership, support: Sequence[Monomial]) -> bool:
    sup = set(support)
    if any(p not in sup or c < 0 for p, c in w.weights):
        return False
    if sum(c for _, c in w.weights) != 1:
        return False
    n = len(target)
    combo = [sum((c * p[i] for p, c in w.weights), Fraction(0)) for i in range(n)]
    return combo == [Fraction(x) for x in target]


def check_separation(target: Monomial, w: Separation, support: Sequence[Monomial]) -> bool:
    def dot(p):
        return sum((c * x for c, x in zip(w.normal, p)), Fraction(0))

    return all(dot(p) <= w.offset for p in support) and dot(target) > w.offset


def recheck(support_set: SupportSet, f: MPoly) -> bool:
    """Re-derive every stored decision exactly against the support of f."""
    sup = f.support()
    accepted = set(support_set.points)
    for a, w in support_set.witnesses.items():
        t = _double(a)
        if isinstance(w, Membership):
            if a not in accepted or not check_membership(t, w, sup):
                return False
        elif a in accepted or not check_separation(t, w, sup):
            return False
    return all(a in support_set.witnesses for a in accepted)


def _solve_exact_square(rows: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Some exact solution of rows * x = rhs (free variables set to zero), or None."""
    m = len(rows)
    ncol = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                fct = aug[i][c]
                aug[i] = [x - fct * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][-1] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * ncol
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][-1]
    return x


def _certify_membership(target: Monomial, pts: Sequence[Monomial], lam: np.ndarray) -> Optional[Membership]:
    n = len(target)
    used = [j for j in np.argsort(-lam) if lam[j] > 1e-9]
    if not used:
        return None
    rows = [[Fraction(pts[j][i]) for j in used] for i in range(n)] + [[Fraction(1)] * len(used)]
    rhs = [Fraction(x) for x in target] + [Fraction(1)]
    x = _solve_exact_square(rows, rhs)
    if x is None or any(v < 0 for v in x):
        return None
    w = Membership(tuple((pts[j], v) for j, v in zip(used, x) if v))
    return w if check_membership(target, w, pts) else None


def _certify_separation(target: Monomial, pts: Sequence[Monomial]) -> Optional[Separation]:
    n = len(target)
    P = np.array(pts, dtype=float)
    t = np.array(target, dtype=float)
    # maximize c.t - c0  s.t.  c.p - c0 <= 0,  -1 <= c <= 1
    obj = -np.concatenate([t, [-1.0]])
    A = np.hstack([P, -np.ones((len(pts), 1))])
    res = linprog(obj, A_ub=A, b_ub=np.zeros(len(pts)), bounds=[(-1, 1)] * n + [(None, None)], method="highs")
    if res.status != 0 or -res.fun <= 1e-9:
        return None
    for denom in (1, 2, 4, 8, 16, 64, 256, 1024, 1 << 20):
        normal = tuple(Fraction(v).limit_denominator(denom) for v in res.x[:n])
        offset = max(sum((c * x for c, x in zip(normal, p)), Fraction(0)) for p in pts)
        w = Separation(normal, offset)
        if check_separation(target, w, pts):
            return w
    return None


def exact_hull_membership(target: Monomial, pts: Sequence[Monomial]) -> Witness:
    """Phase-one simplex over the rationals with Bland's rule.

    Rows are the n coordinates plus the convexity row, all right-hand sides
    are nonnegative, so artificials form the starting basis.  At a positive
    optimum the simplex multipliers give the separating hyperplane.
    """
    n = len(target)
    m = n + 1
    k = len(pts)
    # columns: k hull weights then m artificials
    A = [[Fraction(p[i]) for p in pts] + [Fraction(int(r == i)) for r in range(m)] for i in range(n)]
    A.append([Fraction(1)] * k + [Fraction(int(r == n)) for r in range(m)])
    b = [Fraction(x) for x in target] + [Fraction(1)]
    cost = [Fraction(0)] * k + [Fraction(1)] * m
    basis = list(range(k, k + m))
    ncol = k + m
    while True:
        cb = [cost[j] for j in basis]
        # reduced costs: c_j - cb . column_j (tableau is kept in basis form)
        red = [cost[j] - sum(cb[i] * A[i][j] for i in range(m)) for j in range(ncol)]
        enter = next((j for j in range(ncol) if red[j] < 0), None)
        if enter is None:
            break
        ratios = [(b[i] / A[i][enter], basis[i], i) for i in range(m) if A[i][enter] > 0]
        if not ratios:
            raise RuntimeError("phase-one LP is bounded below; unbounded ray is impossible")
        best = min(r for r, _, _ in ratios)
        _, _, row = min((bv, i, i) for r, bv, i in ratios if r == best)
        pv = A[row][enter]
        A[row] = [v / pv for v in A[row]]
        b[row] /= pv
        for i in range(m):
            if i != row and A[i][enter] != 0:
                fct = A[i][enter]
                A[i] = [x - fct * y for x, y in zip(A[i], A[row])]
                b[i] -= fct * b[row]
        basis[row] = enter
    value = sum(cost[j] * b[i] for i, j in enumerate(basis))
    if value == 0:
        lam = [Fraction(0)] * k
        for i, j in enumerate(basis):
            if j < k:
                lam[j] = b[i]
        return Membership(tuple((pts[j], v) for j, v in enumerate(lam) if v))
    cb = [cost[j] for j in basis]
    red_art = [cost[k + r] - sum(cb[i] * A[i][k + r] for i in range(m)) for r in range(m)]
    y = [1 - rc for rc in red_art]
    # y.(p, 1) <= 0 on the support and y.(2 alpha, 1) > 0
    return Separation(tuple(y[:n]), -y[n])


def _decide(target: Monomial, pts: Sequence[Monomial], P: np.ndarray) -> Witness:
    k = len(pts)
    A_eq = np.vstack([P.T, np.ones((1, k))])
    b_eq = np.concatenate([np.array(target, dtype=float), [1.0]])
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    w: Optional[Witness] = None
    if res.status == 0:
        w = _certify_membership(target, pts, res.x)
    elif res.status == 2:
        w = _certify_separation(target, pts)
    if w is None:
        log.debug("newton: float LP inconclusive at %s, running the exact simplex", target)
        w = exact_hull_membership(target, pts)
    return w


def _trivial_separation(t: Monomial, pts: Sequence[Monomial]) -> Optional[Separation]:
    """Coordinate or total-degree hyperplane cutting off t, if one exists."""
    n = len(t)
    normals = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    normals += [tuple(Fraction(1) for _ in range(n)), tuple(Fraction(-1) for _ in range(n))]
    for c in normals:
        off = max(sum((a * x for a, x in zip(c, p)), Fraction(0)) for p in pts)
        w = Separation(c, off)
        if check_separation(t, w, pts):
            return w
    return None


def basis_key(a: Monomial):
    """Gram basis order: by total degree, then X1-heavy first (X1^2, X1*X2, X2^2)."""
    return (sum(a), tuple(-x for x in a))


def candidate_box(f: MPoly) -> List[Monomial]:
    """The box [0, deg(f)/2]^n of candidate half-support points, in basis order."""
    half = f.degree // 2
    return sorted(itertools.product(range(half + 1), repeat=f.nvars), key=basis_key)


def newton_half_support(f: MPoly) -> SupportSet:
    """Q = {alpha in N^n : 2 alpha in conv(support f)}, sorted by :func:`basis_key`."""
    if f.is_zero():
        raise ValueError("Newton polytope of the zero polynomial")
    pts = f.support()
    sup = set(pts)
    P = np.array(pts, dtype=float)
    accepted: List[Monomial] = []
    witnesses: Dict[Monomial, Witness] = {}
    for a in candidate_box(f):
        t = _double(a)
        if t in sup:
            w: Witness = Membership(((t, Fraction(1)),))
        else:
            w = _trivial_separation(t, pts) or _decide(t, pts, P)
        witnesses[a] = w
        if isinstance(w, Membership):
            accepted.append(a)
    return SupportSet(f.nvars, tuple(accepted), witnesses)
