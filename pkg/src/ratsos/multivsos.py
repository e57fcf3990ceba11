"""Exact weighted SOS certificates for multivariate polynomials in the SOS-cone interior.

Pipeline: Newton half support Q, one max-min-eigenvalue SDP for the Gram
matrix of f, a dyadic perturbation eps below that eigenvalue, a rounded LDL^T
of the perturbed Gram matrix, and an exact absorption of the rounding
remainder into eps * sum_{alpha in Q} X^(2 alpha).

Subtracting eps * sum X^(2 alpha) moves the Gram slice by exactly -eps * I
(that polynomial's Gram matrix on Q is the identity), so the best smallest
eigenvalue for f_eps is the one for f minus eps.  The eps halving loop
therefore reuses a single SDP solution per precision level.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .certificate import Certificate, verify_exact
from .errors import BudgetExhausted, InconsistentConstraints, NotNonNegative, NotPSD, SolverError
from .newton import SupportSet, newton_half_support
from .poly import Monomial, MPoly, UPoly
from .realroots import negative_witness
from .sdp.feasible import MaxMinEigResult, solve_max_min_eig, strict_tolerance
from .sdp.matrix import SdpProblem, SymMatrix, ldl_decompose, round_project, to_dyadic

log = logging.getLogger(__name__)

STRATEGIES = ("cholesky", "ldl", "project")


@dataclass(frozen=True)
class MultiCertParams:
    """Search budget for :func:`multivsos`.

    strategy: how the numeric Gram matrix becomes exact squares.
      "cholesky"  round a floating LDL^T of G to dyadics, absorb f_eps - sum d s^2
      "ldl"       exact LDL^T of the dyadic rounding of G, absorb f_eps - v^T G v
      "project"   project the rounding of G onto the Gram slice, exact LDL^T, nothing to absorb
    """

    epsilon_init: Fraction = Fraction(1)
    precision_bits_init: int = 53
    max_epsilon_halvings: int = 20
    max_precision_escalations: int = 2
    precision_factor: int = 2
    strategy: str = "cholesky"
    prescreen_points: int = 200
    seed: int = 0
    # replaces the internal interior-point solver: (problem, precision_bits) -> MaxMinEigResult
    solver: Optional[Callable[[SdpProblem, int], MaxMinEigResult]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "epsilon_init", Fraction(self.epsilon_init))
        if self.epsilon_init <= 0 or self.precision_bits_init < 1 or self.precision_factor < 2:
            raise ValueError("epsilon_init, precision_bits_init and precision_factor must be positive (factor >= 2)")
        if self.max_epsilon_halvings < 0 or self.max_precision_escalations < 0:
            raise ValueError("budget caps must be nonnegative")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")


# -- Gram bookkeeping -------------------------------------------------------

def _add(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def gram_pairs(Q: Sequence[Monomial]) -> Dict[Monomial, List[Tuple[int, int]]]:
    """For each monomial of Q+Q the index pairs (i <= j) producing it."""
    out: Dict[Monomial, List[Tuple[int, int]]] = {}
    for i, a in enumerate(Q):
        for j in range(i, len(Q)):
            out.setdefault(_add(a, Q[j]), []).append((i, j))
    return out


def gram_problem(f: MPoly, Q: Sequence[Monomial]) -> Tuple[SdpProblem, List[Monomial]]:
    """Constraints <A_gamma, G> = coeff(f, gamma) for every gamma in Q+Q."""
    pairs = gram_pairs(Q)
    stray = [m for m in f.support() if m not in pairs]
    if stray:
        raise InconsistentConstraints(f"monomial {stray[0]} of f is not a sum of two points of Q")
    dim = len(Q)
    cons = []
    order = sorted(pairs, key=lambda m: (sum(m), m))
    for g in order:
        cons.append((SymMatrix(dim, {ij: 1 for ij in pairs[g]}), f.coeff(g)))
    return SdpProblem(dim, cons), order


def gram_polynomial(G: SymMatrix, Q: Sequence[Monomial]) -> MPoly:
    terms: Dict[Monomial, Fraction] = {}
    for (i, j), v in G.entries.items():
        m = _add(Q[i], Q[j])
        terms[m] = terms.get(m, Fraction(0)) + (v if i == j else 2 * v)
    return MPoly(len(Q[0]), terms)


def _basis_poly(coeffs: Sequence[Tuple[int, Fraction]], Q: Sequence[Monomial]) -> MPoly:
    return MPoly(len(Q[0]), {Q[j]: c for j, c in coeffs if c})


def extract_sos(gram: SymMatrix, Q: Sequence[Monomial], pivoting: str = "natural") -> List[Tuple[Fraction, MPoly]]:
    """Pairs (d_i, s_i) with sum d_i s_i^2 = v_Q^T gram v_Q, from an exact LDL^T."""
    fac = ldl_decompose(gram, pivoting)
    n = len(fac.D)
    out = []
    for i in range(n):
        d = fac.D[i]
        if d == 0:
            continue
        coeffs = [(fac.perm[j], fac.L[j][i]) for j in range(i, n)]
        out.append((d, _basis_poly(coeffs, Q)))
    return out


def absorb_remainder_multi(u: MPoly, eps: Fraction, Q: Sequence[Monomial]) -> Optional[List[Tuple[Fraction, MPoly]]]:
    """SOS of u + eps * sum_{alpha in Q} X^(2 alpha), or None if a diagonal coefficient goes negative.

    Each c X^(alpha + beta) with alpha != beta (first such pair in Q order) becomes
    (|c|/2)(X^alpha + sign(c) X^beta)^2 - (|c|/2)(X^(2 alpha) + X^(2 beta)).
    """
    eps = Fraction(eps)
    Q = list(Q)
    nv = len(Q[0])
    doubles = {tuple(2 * x for x in a): a for a in Q}
    pairs = gram_pairs(Q)
    diag = {a: eps for a in Q}
    steps: List[Tuple[Fraction, MPoly]] = []
    cross = []
    for m, c in u.terms.items():
        if m in doubles:
            diag[doubles[m]] += c
            continue
        if m not in pairs:
            raise ValueError(f"remainder monomial {m} is not in Q+Q")
        i, j = next((i, j) for i, j in pairs[m] if i != j)
        cross.append((i, j, c))
    for i, j, c in sorted(cross):
        half = abs(c) / 2
        a, b = Q[i], Q[j]
        steps.append((half, MPoly(nv, {a: 1, b: 1 if c > 0 else -1})))
        diag[a] -= half
        diag[b] -= half
    if any(v < 0 for v in diag.values()):
        return None
    steps.extend((diag[a], MPoly.monomial(a)) for a in Q if diag[a])
    return steps


def merge_multi(steps: Sequence[Tuple[Fraction, MPoly]]) -> List[Tuple[Fraction, MPoly]]:
    """Drop zero terms; add weights of square roots equal up to sign (first form kept)."""
    acc: Dict[MPoly, List] = {}
    order: List[MPoly] = []
    for w, s in steps:
        if w == 0 or s.is_zero():
            continue
        lead = next(iter(s.terms.values()))
        key = s if lead > 0 else -s
        if key in acc:
            acc[key][1] += w
        else:
            acc[key] = [s, Fraction(w)]
            order.append(key)
    return [(acc[k][1], acc[k][0]) for k in order]


# -- exact remainders from numeric factors ----------------------------------

def _numeric_ldl(G, bits: int) -> Tuple[list, list]:
    """Unit lower L and diagonal D of a numerically positive definite G (float or mpf)."""
    n = len(G)
    if G.dtype == object:
        with mpmath.workprec(bits + 32):
            C = mpmath.cholesky(mpmath.matrix(G.tolist()))
            diag = [C[i, i] for i in range(n)]
            L = [[C[i, j] / diag[j] if j <= i else mpmath.mpf(0) for j in range(n)] for i in range(n)]
            return L, [x * x for x in diag]
    C = np.linalg.cholesky(G)
    diag = np.diag(C).copy()
    return (C / diag).tolist(), (diag * diag).tolist()


def _round_int(v, bits: int) -> int:
    r = to_dyadic(v, bits)
    return r.numerator * ((1 << bits) // r.denominator)


def cholesky_squares(G, Q: Sequence[Monomial], bits: int) -> Tuple[List[Tuple[Fraction, MPoly]], Dict[Monomial, Fraction]]:
    """Rounded numeric LDL^T of G as exact squares, and the exact polynomial they sum to."""
    n = len(Q)
    try:
        L, D = _numeric_ldl(G, bits)
    except (np.linalg.LinAlgError, ZeroDivisionError, ValueError) as e:
        raise NotPSD(f"numeric Cholesky failed: {e}", 0, Fraction(0)) from e
    Lr = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            Lr[i, j] = _round_int(L[i][j], bits) if j < i else (1 << bits if i == j else 0)
    Dr = [_round_int(d, bits) for d in D]
    bad = next((i for i, d in enumerate(Dr) if d <= 0), None)
    if bad is not None:
        raise NotPSD("rounded pivot is not positive", bad, Fraction(Dr[bad], 1 << bits))
    M = (Lr * np.array(Dr, dtype=object)) @ Lr.T
    denom = 1 << (3 * bits)
    sigma: Dict[Monomial, int] = {}
    for i in range(n):
        for j in range(n):
            v = M[i, j]
            if v:
                m = _add(Q[i], Q[j])
                sigma[m] = sigma.get(m, 0) + v
    squares = []
    scale = 1 << bits
    for i in range(n):
        coeffs = [(j, Fraction(Lr[j, i], scale)) for j in range(i, n) if Lr[j, i]]
        squares.append((Fraction(Dr[i], scale), _basis_poly(coeffs, Q)))
    return squares, {m: Fraction(v, denom) for m, v in sigma.items() if v}


# -- witnesses of negativity ------------------------------------------------

class _FloatPoly:
    def __init__(self, f: MPoly):
        self.exps = np.array(f.support(), dtype=float)
        self.coeffs = np.array([float(c) for _, c in f], dtype=float)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        with np.errstate(over="ignore", invalid="ignore"):
            mons = np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2)
            return mons @ self.coeffs


def restrict_to_line(f: MPoly, p: Sequence[Fraction], v: Sequence[Fraction]) -> UPoly:
    """g(t) = f(p + t v) exactly."""
    lin = [UPoly([Fraction(a), Fraction(b)]) for a, b in zip(p, v)]
    cache: Dict[Tuple[int, int], UPoly] = {}
    out = UPoly()
    for m, c in f:
        term = UPoly.const(c)
        for i, e in enumerate(m):
            if e:
                if (i, e) not in cache:
                    cache[(i, e)] = lin[i] ** e
                term = term * cache[(i, e)]
        out = out + term
    return out


def _on_line(f: MPoly, p, v) -> Optional[Tuple[Fraction, ...]]:
    g = restrict_to_line(f, p, v)
    t = negative_witness(g)
    if t is None:
        return None
    pt = tuple(Fraction(a) + t * Fraction(b) for a, b in zip(p, v))
    return pt if f(pt) < 0 else None


def _rationalize(x: Sequence[float], bits: int = 20) -> Tuple[Fraction, ...]:
    return tuple(to_dyadic(float(v), bits) for v in x)


def find_negative_point(f: MPoly, seed: int = 0, points: int = 200, local_starts: int = 8) -> Optional[Tuple[Fraction, ...]]:
    """A rational point where f is (exactly) negative, or None if none was found.

    Tries, in order: a ray along which an odd top-degree part goes negative,
    seeded random points, random lines through the origin, and local
    minimization from random starts followed by a line search through the minimizer.
    """
    n = f.nvars
    rng = random.Random(seed)
    if f.is_zero():
        return None
    if f.degree % 2:
        for _ in range(32):
            v = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
            if any(v):
                w = _on_line(f, [Fraction(0)] * n, v)
                if w is not None:
                    return w
    fp = _FloatPoly(f)
    cands = []
    for scale in (1, 2, 4):
        for _ in range(max(1, points // 3)):
            cands.append([Fraction(rng.randint(-16 * scale, 16 * scale), 16) for _ in range(n)])
    vals = fp(np.array([[float(x) for x in c] for c in cands]))
    for k in np.argsort(vals):
        if not vals[k] < 1e-9:
            break
        pt = tuple(cands[k])
        if f(pt) < 0:
            return pt
    for _ in range(4):
        v = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
        if any(v):
            w = _on_line(f, [Fraction(rng.randint(-4, 4), 4) for _ in range(n)], v)
            if w is not None:
                return w
    return _local_search(f, fp, rng, local_starts)


def _local_search(f: MPoly, fp: _FloatPoly, rng: random.Random, starts: int) -> Optional[Tuple[Fraction, ...]]:
    from scipy.optimize import minimize

    n = f.nvars
    grads = [_FloatPoly(f.derivative(i)) if not f.derivative(i).is_zero() else None for i in range(n)]

    def fun(x):
        return float(fp(x)[0])

    def jac(x):
        return np.array([float(g(x)[0]) if g is not None else 0.0 for g in grads])

    for _ in range(starts):
        x0 = np.array([rng.uniform(-2, 2) for _ in range(n)])
        try:
            res = minimize(fun, x0, jac=jac, method="BFGS", options={"maxiter": 200})
        except (ValueError, OverflowError):
            continue
        if not np.all(np.isfinite(res.x)):
            continue
        if res.fun < 0:
            for bits in (8, 16, 32):
                pt = _rationalize(res.x, bits)
                if f(pt) < 0:
                    return pt
            v = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
            if any(v):
                w = _on_line(f, _rationalize(res.x, 16), v)
                if w is not None:
                    return w
    return None


# -- driver -----------------------------------------------------------------

@dataclass
class MultivsosResult:
    certificate: Certificate
    epsilon: Fraction
    precision_bits: int
    support: SupportSet
    min_eig: float
    strategy: str
    attempts: List[str] = field(default_factory=list)


def _default_names(n: int) -> Tuple[str, ...]:
    return ("X",) if n == 1 else tuple(f"X{i + 1}" for i in range(n))


def _shifted(G, eps: Fraction, bits: int):
    n = len(G)
    if G.dtype == object:
        out = G.copy()
        with mpmath.workprec(bits + 32):
            e = mpmath.mpf(eps.numerator) / eps.denominator
            for i in range(n):
                out[i, i] = out[i, i] - e
        return out
    return G - float(eps) * np.eye(n)


def _attempt(
    f: MPoly, fe: MPoly, eps: Fraction, G, Q: Sequence[Monomial], prob_e: SdpProblem, bits: int, strategy: str
) -> Optional[List[Tuple[Fraction, MPoly]]]:
    """Exact squares for f from the numeric Gram matrix G of f_eps, or None to escalate."""
    if strategy == "cholesky":
        squares, sigma = cholesky_squares(G, Q, bits)
        u_terms = dict(fe.terms)
        for m, c in sigma.items():
            u_terms[m] = u_terms.get(m, Fraction(0)) - c
        u = MPoly(f.nvars, u_terms)
    else:
        Gr = SymMatrix.from_float(G, bits)
        if strategy == "project":
            Gr = round_project(Gr, prob_e.constraints)
        squares = extract_sos(Gr, Q)
        u = fe - gram_polynomial(Gr, Q)
    tail = absorb_remainder_multi(u, eps, Q)
    if tail is None:
        return None
    return merge_multi(tail + squares)


@dataclass
class _Candidate:
    eps: Fraction
    f_eps: MPoly
    bits: int
    gram: object
    problem: SdpProblem
    margin: float


def _search(f: MPoly, Q: SupportSet, params: MultiCertParams, attempts: List[str], solutions: Dict[int, Optional[MaxMinEigResult]]):
    """Yield (eps, precision) candidates in search order; the consumer simply moves on after a failure.

    For each eps (halved from epsilon_init) precision climbs by
    ``precision_factor``; an eps whose perturbed Gram slice has no strictly
    positive definite point at the current precision is abandoned at once.
    """
    prob, _ = gram_problem(f, Q.points)
    slack = MPoly(f.nvars, {tuple(2 * x for x in a): 1 for a in Q.points})
    eps = params.epsilon_init
    for _ in range(params.max_epsilon_halvings + 1):
        fe = f - slack * MPoly.const(f.nvars, eps)
        prob_e, _ = gram_problem(fe, Q.points)
        bits = params.precision_bits_init
        for _esc in range(params.max_precision_escalations + 1):
            if bits not in solutions:
                try:
                    solutions[bits] = (params.solver or solve_max_min_eig)(prob, bits)
                except SolverError as e:
                    attempts.append(f"sdp at {bits} bits: {e}")
                    solutions[bits] = None
            sol = solutions[bits]
            if sol is not None:
                margin = sol.min_eig - float(eps)
                if not margin > strict_tolerance(prob_e, bits):
                    attempts.append(f"eps={eps}: smallest eigenvalue {margin:.3e} at {bits} bits")
                    break
                yield _Candidate(eps, fe, bits, _shifted(sol.gram, eps, bits), prob_e, margin)
            bits *= params.precision_factor
        eps /= 2


def perturbation_search(f: MPoly, Q: SupportSet, params: MultiCertParams = MultiCertParams()) -> Tuple[Fraction, SymMatrix, int]:
    """(eps, G, bits): G is an exact Gram matrix of f_eps on Q that admits an exact LDL^T.

    G is the dyadic rounding of the numeric solution, projected onto the
    Gram slice of f_eps.
    """
    if not Q.points:
        raise ValueError("empty support set")
    attempts: List[str] = []
    for cand in _search(f, Q, params, attempts, {}):
        G = round_project(SymMatrix.from_float(cand.gram, cand.bits), cand.problem.constraints)
        try:
            ldl_decompose(G)
        except NotPSD as e:
            attempts.append(f"eps={cand.eps}, {cand.bits} bits: {e}")
            continue
        return cand.eps, G, cand.bits
    raise BudgetExhausted("no strictly feasible perturbation within budget: " + "; ".join(attempts[-3:]))


def _boundary_attempt(f: MPoly, Q: SupportSet, sol: Optional[MaxMinEigResult], bits: int) -> Optional[List[Tuple[Fraction, MPoly]]]:
    """eps = 0: project the rounded optimum onto the Gram slice of f itself.

    This certifies boundary cases whose Gram slice meets the PSD cone in a
    single rational point, e.g. a perfect square.
    """
    if sol is None:
        return None
    prob, _ = gram_problem(f, Q.points)
    G = round_project(SymMatrix.from_float(sol.gram, bits), prob.constraints)
    try:
        return merge_multi(extract_sos(G, Q.points))
    except NotPSD:
        return None


def multivsos_detailed(
    f: MPoly,
    params: MultiCertParams = MultiCertParams(),
    variables: Optional[Sequence[str]] = None,
) -> MultivsosResult:
    names = tuple(variables) if variables is not None else _default_names(f.nvars)
    if f.is_zero():
        return MultivsosResult(Certificate(names, f, (), "multivsos"), Fraction(0), 0, SupportSet(f.nvars, ()), 0.0, params.strategy)
    w = find_negative_point(f, params.seed, params.prescreen_points, local_starts=0)
    if w is not None:
        raise NotNonNegative(f"negative at {w}", w, f(w))
    if f.degree % 2:
        raise BudgetExhausted("odd degree, but no negative point was found")
    Q = newton_half_support(f)
    if not Q.points:
        raise BudgetExhausted("empty half Newton polytope")
    try:
        gram_problem(f, Q.points)
    except InconsistentConstraints as e:
        raise BudgetExhausted(f"f is not a sum of squares over its half Newton polytope: {e}") from e
    attempts: List[str] = []
    solutions: Dict[int, Optional[MaxMinEigResult]] = {}

    def finish(steps, eps, bits, margin) -> MultivsosResult:
        cert = Certificate(names, f, tuple(steps), "multivsos")
        res = verify_exact(cert)
        if not res.verified:
            raise AssertionError(f"multivsos produced a certificate that does not expand to f: {res.diff}")
        return MultivsosResult(cert, eps, bits, Q, margin, params.strategy, attempts)

    for cand in _search(f, Q, params, attempts, solutions):
        try:
            steps = _attempt(f, cand.f_eps, cand.eps, cand.gram, Q.points, cand.problem, cand.bits, params.strategy)
        except NotPSD as e:
            attempts.append(f"eps={cand.eps}, {cand.bits} bits: {e}")
            continue
        if steps is not None:
            return finish(steps, cand.eps, cand.bits, cand.margin)
        attempts.append(f"eps={cand.eps}, {cand.bits} bits: remainder not absorbed")
    bits0 = params.precision_bits_init
    sol0 = solutions.get(bits0)
    steps = _boundary_attempt(f, Q, sol0, bits0)
    if steps is not None:
        return finish(steps, Fraction(0), bits0, sol0.min_eig)
    w = find_negative_point(f, params.seed + 1, params.prescreen_points, local_starts=8)
    if w is not None:
        raise NotNonNegative(f"negative at {w}", w, f(w))
    best = max((s.min_eig for s in solutions.values() if s is not None), default=float("nan"))
    raise BudgetExhausted(
        f"no certificate within budget (best smallest Gram eigenvalue {best:.3e}); "
        "f may be outside the interior of the SOS cone"
    )


def multivsos(f: MPoly, params: MultiCertParams = MultiCertParams(), variables: Optional[Sequence[str]] = None) -> Certificate:
    """Exact weighted SOS certificate of f (exactly verified before it is returned)."""
    return multivsos_detailed(f, params, variables).certificate
