"""Primal-dual interior-point method for small dense SDPs in standard form.

    minimize <C, X>  subject to  <A_k, X> = b_k,  X >= 0

Infeasible-start Mehrotra predictor-corrector with the HKM search direction.
At 53 bits or less everything runs in float64 through numpy/BLAS; above that
the same iteration runs on numpy object arrays of ``mpmath.mpf`` at the
requested working precision (slow, meant for small retry problems).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import mpmath
import numpy as np
import scipy.linalg
import scipy.sparse

log = logging.getLogger(__name__)

# one constraint matrix, full symmetric listing (both triangles) of its nonzeros
SparseSym = Tuple[np.ndarray, np.ndarray, np.ndarray]


@dataclass
class IpmResult:
    X: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    primal_obj: float
    dual_obj: float
    iterations: int
    converged: bool
    rel_gap: float
    primal_infeas: float
    dual_infeas: float


def sparse_from_entries(entries: Sequence[Tuple[int, int, object]]) -> SparseSym:
    rows = np.array([e[0] for e in entries], dtype=np.int64)
    cols = np.array([e[1] for e in entries], dtype=np.int64)
    return rows, cols, [e[2] for e in entries]


class _FloatLA:
    name = "float64"

    def __init__(self, n: int, A: List[SparseSym]):
        self.n = n
        m = len(A)
        data, ri, ci = [], [], []
        for k, (r, c, v) in enumerate(A):
            ri.extend([k] * len(r))
            ci.extend((r * n + c).tolist())
            data.extend(float(x) for x in v)
        self.S = scipy.sparse.csr_matrix((data, (ri, ci)), shape=(m, n * n))
        self.St = self.S.T.tocsr()
        self.A = [(r, c, np.array([float(x) for x in v])) for r, c, v in A]
        self.dense_stack = None
        if m * n * n <= 4_000_000:
            self.dense_stack = self.S.toarray().reshape(m, n, n)

    def asarray(self, a):
        return np.asarray(a, dtype=float)

    def eye(self, n):
        return np.eye(n)

    def zeros(self, shape):
        return np.zeros(shape)

    def const(self, x):
        return float(x)

    def op(self, X):
        return self.S @ X.reshape(-1)

    def adj(self, y):
        return (self.St @ y).reshape(self.n, self.n)

    def schur(self, X, Zinv):
        if self.dense_stack is not None:
            W = X @ self.dense_stack @ Zinv
            return np.asarray((self.S @ W.reshape(len(W), -1).T).T)
        # X A_j Z^-1 from the nonzeros of A_j only
        W = np.empty((len(self.A), self.n * self.n))
        for j, (r, c, v) in enumerate(self.A):
            W[j] = ((X[:, r] * v) @ Zinv[c, :]).reshape(-1)
        return np.asarray((self.S @ W.T).T)

    def inv_spd(self, Z):
        c = scipy.linalg.cho_factor(Z)
        return scipy.linalg.cho_solve(c, np.eye(len(Z)))

    def factor(self, M):
        try:
            return scipy.linalg.cho_factor(M)
        except np.linalg.LinAlgError:
            reg = 1e-14 * max(1.0, float(np.max(np.abs(np.diag(M)))))
            return scipy.linalg.lu_factor(M + reg * np.eye(len(M))), "lu"

    def solve(self, fac, r):
        if isinstance(fac, tuple) and len(fac) == 2 and fac[1] == "lu":
            return scipy.linalg.lu_solve(fac[0], r)
        return scipy.linalg.cho_solve(fac, r)

    def max_step(self, X, dX):
        try:
            L = np.linalg.cholesky(X)
        except np.linalg.LinAlgError:
            return 0.0
        Li = scipy.linalg.solve_triangular(L, np.eye(len(X)), lower=True)
        lam = np.linalg.eigvalsh(Li @ dX @ Li.T)[0]
        return np.inf if lam >= 0 else -1.0 / lam

    def norm(self, a):
        return float(np.linalg.norm(a))

    def dot(self, a, b):
        return float(np.sum(a * b))


class _MpLA:
    name = "mpmath"

    def __init__(self, n: int, A: List[SparseSym]):
        self.n = n
        self.A = [(r, c, _mp_vals(v)) for r, c, v in A]

    def asarray(self, a):
        return np.array([[self.const(x) for x in row] for row in a], dtype=object)

    def const(self, x):
        if hasattr(x, "numerator"):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)

    def eye(self, n):
        out = np.full((n, n), mpmath.mpf(0), dtype=object)
        for i in range(n):
            out[i, i] = mpmath.mpf(1)
        return out

    def zeros(self, shape):
        return np.full(shape, mpmath.mpf(0), dtype=object)

    def op(self, X):
        return np.array([sum((v * X[i, j] for i, j, v in zip(r, c, vals)), mpmath.mpf(0)) for r, c, vals in self.A], dtype=object)

    def adj(self, y):
        out = self.zeros((self.n, self.n))
        for yk, (r, c, vals) in zip(y, self.A):
            if yk:
                for i, j, v in zip(r, c, vals):
                    out[i, j] += yk * v
        return out

    def schur(self, X, Zinv):
        m = len(self.A)
        M = self.zeros((m, m))
        for i, (r, c, vals) in enumerate(self.A):
            W = self.zeros((self.n, self.n))
            for a, b, v in zip(r, c, vals):
                W += v * np.outer(X[:, a], Zinv[b, :])
            for j, (r2, c2, vals2) in enumerate(self.A):
                M[i, j] = sum((v2 * W[a2, b2] for a2, b2, v2 in zip(r2, c2, vals2)), mpmath.mpf(0))
        return M

    def _mat(self, a):
        return mpmath.matrix(a.tolist())

    def _arr(self, m):
        return np.array(m.tolist(), dtype=object)

    def inv_spd(self, Z):
        return self._arr(mpmath.inverse(self._mat(Z)))

    def factor(self, M):
        return self._mat(M)

    def solve(self, fac, r):
        x = mpmath.lu_solve(fac, mpmath.matrix(list(r)))
        return np.array([x[i] for i in range(len(r))], dtype=object)

    def max_step(self, X, dX):
        try:
            L = mpmath.cholesky(self._mat(X))
        except (ZeroDivisionError, ValueError):
            return 0.0
        Li = mpmath.inverse(L)
        S = Li * self._mat(dX) * Li.T
        S = (S + S.T) / 2
        lam = min(mpmath.eigsy(S, eigvals_only=True))
        return mpmath.inf if lam >= 0 else -1 / lam

    def norm(self, a):
        return mpmath.sqrt(sum(x * x for x in np.asarray(a).ravel()))

    def dot(self, a, b):
        return sum(np.asarray(a * b).ravel(), mpmath.mpf(0))


def _mp_vals(v):
    return [mpmath.mpf(x.numerator) / x.denominator if hasattr(x, "numerator") else mpmath.mpf(x) for x in v]



def _sym(a):
    return (a + a.T) / 2


def solve_standard(
    C,
    A: List[SparseSym],
    b: Sequence,
    precision_bits: int = 53,
    tol: float = 0.0,
    max_iter: int = 0,
) -> IpmResult:
    """Solve the standard-form SDP; C is a dense symmetric n x n array."""
    n = len(C)
    m = len(A)
    if precision_bits <= 53:
        la = _FloatLA(n, A)
        tol = tol or 1e-10
        max_iter = max_iter or 100
        return _ipm(la, la.asarray(C), np.array([float(x) for x in b]), tol, max_iter)
    with mpmath.workprec(precision_bits + 32):
        la = _MpLA(n, A)
        tol = tol or float(mpmath.ldexp(1, -int(0.6 * precision_bits)))
        max_iter = max_iter or 200 + precision_bits // 4
        res = _ipm(la, la.asarray(C), np.array([la.const(x) for x in b], dtype=object), mpmath.mpf(tol), max_iter)
    return res


def _ipm(la, C, b, tol, max_iter) -> IpmResult:
    n = len(C)
    m = len(b)
    normb = la.norm(b)
    normC = la.norm(C)
    normA = []
    for k in range(m):
        e = np.zeros(m, dtype=b.dtype) if la.name == "float64" else np.array([la.const(0)] * m, dtype=object)
        e[k] = la.const(1)
        normA.append(la.norm(la.adj(e)))
    xi = max([10.0, float(np.sqrt(n))] + [float(n * (1 + abs(float(bk))) / (1 + float(ak))) for bk, ak in zip(b, normA)])
    eta = max([10.0, float(np.sqrt(n)), float(normC)] + [float(a) for a in normA])
    X = la.eye(n) * la.const(xi)
    Z = la.eye(n) * la.const(eta)
    y = la.zeros(m) if la.name == "float64" else np.array([la.const(0)] * m, dtype=object)
    one = la.const(1)
    tau = la.const(0.98)
    converged = False
    stats = (np.inf, np.inf, np.inf)
    it = 0
    for it in range(1, max_iter + 1):
        rp = b - la.op(X)
        Rd = C - Z - la.adj(y)
        pobj = la.dot(C, X)
        dobj = la.dot(b, y)
        gap = la.dot(X, Z)
        relgap = gap / (one + abs(pobj) + abs(dobj))
        pinf = la.norm(rp) / (one + normb)
        dinf = la.norm(Rd) / (one + normC)
        stats = (relgap, pinf, dinf)
        if max(relgap, pinf, dinf) < tol:
            converged = True
            break
        mu = gap / n
        try:
            Zinv = _sym(la.inv_spd(Z))
            M = la.schur(X, Zinv)
            fac = la.factor(_sym(M))
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError) as e:
            # the dual slack lost definiteness to rounding: keep the last interior iterate
            log.debug("ipm[%s] stopped at iteration %d: %s", la.name, it, e)
            break
        XRdZi = X @ Rd @ Zinv

        def direction(sigma_mu, corr):
            R = sigma_mu * Zinv - X - XRdZi
            if corr is not None:
                R = R - corr
            dy = la.solve(fac, rp - la.op(R))
            dZ = _sym(Rd - la.adj(dy))
            dX = sigma_mu * Zinv - X - X @ dZ @ Zinv
            if corr is not None:
                dX = dX - corr
            return _sym(dX), dy, dZ

        dXa, dya, dZa = direction(la.const(0), None)
        ap = min(one, tau * la.max_step(X, dXa))
        ad = min(one, tau * la.max_step(Z, dZa))
        mu_aff = la.dot(X + ap * dXa, Z + ad * dZa) / n
        sigma = min(one, max(la.const(0), (mu_aff / mu) ** 3)) if mu > 0 else la.const(0)
        corr = dXa @ dZa @ Zinv
        dX, dy, dZ = direction(sigma * mu, corr)
        ap = min(one, tau * la.max_step(X, dX))
        ad = min(one, tau * la.max_step(Z, dZ))
        if ap <= 0 and ad <= 0:
            break
        X = _sym(X + ap * dX)
        y = y + ad * dy
        Z = _sym(Z + ad * dZ)
    log.debug("ipm[%s] n=%d m=%d it=%d gap=%.3g pinf=%.3g dinf=%.3g", la.name, n, m, it, *map(float, stats))
    return IpmResult(
        X=X, y=y, Z=Z,
        primal_obj=float(la.dot(C, X)), dual_obj=float(la.dot(b, y)),
        iterations=it, converged=converged,
        rel_gap=float(stats[0]), primal_infeas=float(stats[1]), dual_infeas=float(stats[2]),
    )
