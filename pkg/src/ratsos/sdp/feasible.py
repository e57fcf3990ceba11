"""Maximize the smallest eigenvalue of G subject to affine Gram constraints.

The problem  max t  s.t.  <A_k, G> = b_k,  G - t I >= 0  is put in standard
form by writing G = Y + (s - T) I with Y >= 0 and a scalar s >= 0, so that
t = s - T.  The shift T is chosen so that s = lambda_min(G0) + T > 0 holds for
the least-norm solution G0, which makes the lifted problem strictly feasible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import mpmath
import numpy as np

from ..errors import NotStrictlyFeasible, SolverError
from .matrix import SdpProblem, SymMatrix
from .solver import IpmResult, SparseSym, sparse_from_entries, solve_standard

log = logging.getLogger(__name__)


@dataclass
class LiftedProblem:
    """Standard-form data of the max-min-eigenvalue lift (block 1 is Y, last index is s)."""

    dim: int
    shift: Fraction
    C: np.ndarray
    A: List[SparseSym]
    b: List[Fraction]
    entries: List[List[Tuple[int, int, Fraction]]]


@dataclass
class MaxMinEigResult:
    gram: np.ndarray
    min_eig: float
    ipm: Optional[IpmResult]


def least_norm_solution(prob: SdpProblem) -> np.ndarray:
    """Float least-Frobenius-norm G with <A_k, G> = b_k."""
    n = prob.dim
    if prob.is_disjoint():
        g = np.zeros((n, n))
        for a, b in prob.constraints:
            h = float(a.inner(a))
            if h:
                g += (float(b) / h) * a.to_numpy()
        return g
    mats = [a.to_numpy() for a, _ in prob.constraints]
    H = np.array([[np.sum(x * y) for y in mats] for x in mats])
    lam = np.linalg.lstsq(H, np.array([float(b) for _, b in prob.constraints]), rcond=None)[0]
    return sum((l * m for l, m in zip(lam, mats)), np.zeros((n, n)))


def lift(prob: SdpProblem, g0: Optional[np.ndarray] = None) -> LiftedProblem:
    n = prob.dim
    if g0 is None:
        g0 = least_norm_solution(prob)
    radius = float(np.max(np.abs(np.linalg.eigvalsh(g0)))) if n else 0.0
    shift = Fraction(int(np.ceil(radius)) + 1)
    entries = []
    b = []
    for a, rhs in prob.constraints:
        ent = list(a.full_entries())
        tr = a.trace()
        if tr:
            ent.append((n, n, tr))
        entries.append(ent)
        b.append(rhs + shift * tr)
    C = np.zeros((n + 1, n + 1))
    C[n, n] = -1.0
    return LiftedProblem(n + 1, shift, C, [sparse_from_entries(e) for e in entries], b, entries)


def solve_max_min_eig(prob: SdpProblem, precision_bits: int = 53) -> MaxMinEigResult:
    """Numerically maximize lambda_min over the affine slice; no rounding is done here."""
    prob.check_consistent()
    n = prob.dim
    g0 = least_norm_solution(prob)
    if all(a.trace() == 0 for a, _ in prob.constraints):
        # G0 + c I stays feasible for every c: the optimum is unbounded, any margin will do
        margin = 1.0 + float(np.max(np.abs(np.linalg.eigvalsh(g0))))
        g = g0 + 2 * margin * np.eye(n)
        return MaxMinEigResult(g, float(np.linalg.eigvalsh(g)[0]), None)
    lp = lift(prob, g0)
    res = solve_standard(lp.C, lp.A, lp.b, precision_bits=precision_bits)
    if not res.converged and max(res.primal_infeas, res.rel_gap) > 1e-6:
        raise SolverError(
            f"interior-point iteration stalled (gap {res.rel_gap:.2e}, infeasibility {res.primal_infeas:.2e})"
        )
    X = res.X
    shift = lp.shift
    if precision_bits > 53:
        with mpmath.workprec(precision_bits + 32):
            s = X[n, n]
            t = s - mpmath.mpf(shift.numerator) / shift.denominator
            g = X[:n, :n].copy()
            for i in range(n):
                g[i, i] = g[i, i] + t
            min_eig = float(min(mpmath.eigsy(mpmath.matrix(g.tolist()), eigvals_only=True)))
        return MaxMinEigResult(g, min_eig, res)
    t = X[n, n] - float(shift)
    g = X[:n, :n] + t * np.eye(n)
    return MaxMinEigResult(g, float(np.linalg.eigvalsh(g)[0]), res)


def strict_tolerance(prob: SdpProblem, precision_bits: int) -> float:
    """Smallest eigenvalue that counts as strictly positive at this precision."""
    scale = 1.0 + max((abs(float(b)) for _, b in prob.constraints), default=0.0)
    return (1e-9 if precision_bits <= 53 else 2.0 ** (-0.6 * precision_bits)) * scale


def sdp_feasible(prob: SdpProblem, precision_bits: int = 53, tolerance: Optional[float] = None) -> SymMatrix:
    """Approximate max-min-eigenvalue Gram matrix, rounded to multiples of 2**-precision_bits.

    Raises NotStrictlyFeasible when the best smallest eigenvalue found is not
    above ``tolerance``; InconsistentConstraints when the slice is empty.
    """
    res = solve_max_min_eig(prob, precision_bits)
    if tolerance is None:
        tolerance = strict_tolerance(prob, precision_bits)
    if not res.min_eig > tolerance:
        raise NotStrictlyFeasible(
            f"largest smallest eigenvalue {res.min_eig:.3e} is not above {tolerance:.1e}", res.min_eig
        )
    return SymMatrix.from_float(res.gram, precision_bits)
