"""Real root counting and isolation (Sturm), minimizer search, complex roots.

Everything that decides a sign is exact.  Only :func:`complex_roots` uses
floating point (``mpmath`` at a configurable mantissa), and its output is only
ever trusted after the caller has re-checked it with exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import mpmath

from .errors import RootFindingError
from .poly import UPoly, squarefree_decompose, squarefree_part

Bound = Union[Fraction, int, float]

EXACT = "exact-root"
OPEN = "open-bracket"


@dataclass(frozen=True)
class IsolatingInterval:
    lo: Fraction
    hi: Fraction
    kind: str = OPEN

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class ComplexApprox:
    re: Fraction
    im: Fraction
    precision_bits: int

    def conjugate(self) -> "ComplexApprox":
        return ComplexApprox(self.re, -self.im, self.precision_bits)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_sequence(p: UPoly) -> List[UPoly]:
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    return seq


def _sign_at(q: UPoly, x: Bound) -> int:
    if isinstance(x, float) and math.isinf(x):
        s = _sign(q.lc)
        return s if x > 0 or q.degree % 2 == 0 else -s
    return _sign(q(Fraction(x)))


def _variations(seq: Sequence[UPoly], x: Bound) -> int:
    count, last = 0, 0
    for q in seq:
        s = _sign_at(q, x)
        if s:
            if last and s != last:
                count += 1
            last = s
    return count


def sturm_count(p: UPoly, lo: Bound = -math.inf, hi: Bound = math.inf) -> int:
    """Number of distinct real roots of p in (lo, hi]."""
    if p.is_zero():
        raise ValueError("root count of the zero polynomial")
    if p.degree <= 0:
        return 0
    seq = sturm_sequence(squarefree_part(p))
    return _variations(seq, lo) - _variations(seq, hi)


def root_bound(p: UPoly) -> Fraction:
    """Power of two strictly above the modulus of every complex root (Cauchy)."""
    lc = abs(p.lc)
    bound = 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))
    b = Fraction(1)
    while b < bound:
        b *= 2
    return b


def _count(seq, lo, hi) -> int:
    return _variations(seq, lo) - _variations(seq, hi)


def isolate_real_roots(p: UPoly) -> List[IsolatingInterval]:
    """Disjoint intervals, one per distinct real root, sorted left to right.

    Open brackets have endpoints where the square-free part is nonzero and of
    opposite signs; exact roots come back as degenerate ``[r, r]`` intervals.
    """
    if p.is_zero():
        raise ValueError("root isolation of the zero polynomial")
    if p.degree <= 0:
        return []
    q = squarefree_part(p)
    seq = sturm_sequence(q)
    b = root_bound(q)
    out: List[IsolatingInterval] = []
    stack = [(-b, b, _count(seq, -b, b))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            mid = (lo + hi) / 2
            if q(hi) == 0:
                out.append(IsolatingInterval(hi, hi, EXACT))
            elif q(mid) == 0:
                out.append(IsolatingInterval(mid, mid, EXACT))
            else:
                out.append(_nudge_lo(q, seq, lo, hi))
            continue
        mid = (lo + hi) / 2
        left = _count(seq, lo, mid)
        stack.append((mid, hi, n - left))
        stack.append((lo, mid, left))
    out.sort(key=lambda iv: iv.lo)
    return out


def _nudge_lo(q: UPoly, seq, lo: Fraction, hi: Fraction) -> IsolatingInterval:
    # the single root lies strictly inside (lo, hi); lo itself may be a root of a neighbour
    if q(lo) != 0:
        return IsolatingInterval(lo, hi, OPEN)
    step = (hi - lo) / 2
    while True:
        cand = lo + step
        v = q(cand)
        if v == 0:
            return IsolatingInterval(cand, cand, EXACT)
        if _count(seq, cand, hi) == 1:
            return IsolatingInterval(cand, hi, OPEN)
        step /= 2


def refine(p: UPoly, iv: IsolatingInterval, width: Fraction) -> IsolatingInterval:
    """Bisect an isolating interval of the square-free part of p until it is narrower than width."""
    if iv.kind == EXACT:
        return iv
    q = squarefree_part(p)
    lo, hi = iv.lo, iv.hi
    slo = _sign(q(lo))
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _sign(q(mid))
        if sm == 0:
            return IsolatingInterval(mid, mid, EXACT)
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return IsolatingInterval(lo, hi, OPEN)


def separated_roots(p: UPoly) -> List[IsolatingInterval]:
    """Isolating intervals refined until no two share an endpoint that is a root."""
    q = squarefree_part(p)
    ivs = isolate_real_roots(q)
    changed = True
    while changed:
        changed = False
        for j in range(len(ivs) - 1):
            a, b = ivs[j], ivs[j + 1]
            if a.hi == b.lo and q(a.hi) == 0:
                k = j + 1 if a.kind == EXACT else j
                ivs[k] = refine(q, ivs[k], ivs[k].width / 2)
                changed = True
    return ivs


def _gap_points(p: UPoly) -> List[Fraction]:
    ivs = separated_roots(p)
    if not ivs:
        return [Fraction(0)]
    pts = [ivs[0].lo - 1]
    for a, b in zip(ivs, ivs[1:]):
        # open-bracket endpoints are never roots
        if a.kind == OPEN:
            pts.append(a.hi)
        elif b.kind == OPEN:
            pts.append(b.lo)
        else:
            pts.append((a.hi + b.lo) / 2)
    pts.append(ivs[-1].hi + 1)
    return pts


def negative_witness(p: UPoly):
    """A rational x with p(x) < 0, or None when p >= 0 on the whole real line."""
    if p.is_zero():
        return None
    for x in _gap_points(p):
        if p(x) < 0:
            return x
    return None


def minimizer_bracket(f: UPoly, width: Fraction) -> IsolatingInterval:
    """Interval of width <= ``width`` around the smallest global minimizer of f."""
    if f.degree < 2 or f.degree % 2 or f.lc <= 0:
        raise ValueError("f has no global minimum (needs even degree and positive leading coefficient)")
    df = f.derivative()
    best = None
    for iv in isolate_real_roots(df):
        iv = refine(df, iv, width)
        t = iv.mid
        v = f(t)
        if best is None or v < best[0]:
            best = (v, iv)
    return best[1]


def approx_global_minimizer(f: UPoly, width: Fraction) -> Tuple[Fraction, Fraction]:
    """Rational t near the smallest global minimizer of f, and f(t)."""
    t = minimizer_bracket(f, Fraction(width)).mid
    return t, f(t)


def _round_dyadic(x, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(int(mpmath.nint(x * scale)), scale)


def complex_roots(p: UPoly, precision_bits: int, max_iter: int = 0) -> List[ComplexApprox]:
    """Approximate all roots of a real polynomial without real roots.

    Aberth-Ehrlich iteration in ``mpmath`` at a working precision a little above
    ``precision_bits`` on each square-free factor (repeated roots would slow it
    to linear convergence); results are rounded to dyadic rationals with
    denominator ``2**precision_bits`` and returned in exact conjugate pairs,
    each pair repeated by its multiplicity.
    """
    if p.degree < 1:
        raise ValueError("complex roots of a constant")
    if p.degree % 2:
        raise ValueError("odd-degree real polynomial has a real root")
    sqf = squarefree_decompose(p)
    out: List[ComplexApprox] = []
    for f, m in sqf.factors:
        if f.degree % 2:
            raise RootFindingError("a square-free factor has odd degree (a real root)", 0.0)
        roots = _simple_complex_roots(f, precision_bits, max_iter)
        for k in range(0, len(roots), 2):
            out.extend(roots[k:k + 2] * m)
    return out


def _simple_complex_roots(p: UPoly, precision_bits: int, max_iter: int) -> List[ComplexApprox]:
    n = p.degree
    if n < 1:
        raise ValueError("complex roots of a constant")
    if n % 2:
        raise ValueError("odd-degree real polynomial has a real root")
    wp = precision_bits + 4 * n + 32
    max_iter = max_iter or (200 + 20 * n + precision_bits)
    with mpmath.workprec(wp):
        lc = mpmath.mpf(p.lc.numerator) / p.lc.denominator
        c = [(mpmath.mpf(a.numerator) / a.denominator) / lc for a in p.coeffs]
        hi_first = list(reversed(c))
        radius = mpmath.mpf(float(root_bound(p))) / 2
        z = [radius * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.7")) for k in range(n)]
        tol = mpmath.ldexp(1, -(precision_bits + 16))
        converged = False
        for _ in range(max_iter):
            worst = mpmath.mpf(0)
            for k in range(n):
                pv, dv = mpmath.polyval(hi_first, z[k], derivative=True)
                if pv == 0:
                    continue
                ratio = pv / dv if dv != 0 else mpmath.mpf(1)
                s = sum(1 / (z[k] - z[j]) for j in range(n) if j != k)
                corr = ratio / (1 - ratio * s)
                z[k] -= corr
                worst = max(worst, abs(corr) / max(1, abs(z[k])))
            if worst <= tol:
                converged = True
                break
        residual = float(max(abs(mpmath.polyval(hi_first, zk)) for zk in z))
        if not converged:
            raise RootFindingError(f"Aberth iteration did not converge at {precision_bits} bits", residual)
        upper = sorted((zk for zk in z if zk.imag > 0), key=lambda w: (w.real, w.imag))
        lower = [zk for zk in z if zk.imag < 0]
        if len(upper) != n // 2 or len(lower) != n // 2:
            raise RootFindingError("roots do not split into conjugate pairs (a real root?)", residual)
        out: List[ComplexApprox] = []
        for w in upper:
            re, im = _round_dyadic(w.real, precision_bits), _round_dyadic(w.imag, precision_bits)
            if im == 0:
                raise RootFindingError("imaginary part below the requested precision", residual)
            out.append(ComplexApprox(re, im, precision_bits))
            out.append(ComplexApprox(re, -im, precision_bits))
    return out
