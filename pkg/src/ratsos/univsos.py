"""Exact weighted SOS certificates for nonnegative univariate polynomials.

Two strategies:

* :func:`univsos1` peels off nonnegative quadratic under-approximations at an
  approximate global minimizer and recurses on the (square-free part of the)
  difference, which drops the degree by at least two each time.
* :func:`univsos2` subtracts a small multiple of ``sum X**(2i)``, factors what
  is left through its complex roots into ``l (s1**2 + s2**2)``, and absorbs the
  rounding remainder back into the subtracted slack.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .certificate import Certificate, verify_exact
from .errors import (
    BudgetExhausted,
    NoUnderApproximation,
    NotNonNegative,
    NotStrictlyPositive,
    RootFindingError,
)
from .poly import UPoly, split_square
from .realroots import EXACT, complex_roots, isolate_real_roots, minimizer_bracket, negative_witness, sturm_count

log = logging.getLogger(__name__)

X = UPoly.x()


@dataclass(frozen=True)
class UnivCertStep:
    weight: Fraction
    square_root: UPoly

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError(f"step weight must be positive, got {self.weight}")

    def value(self) -> UPoly:
        return self.square_root * self.square_root * self.weight


def steps_to_certificate(f: UPoly, steps: Sequence[UnivCertStep], provenance: str, var: str = "X") -> Certificate:
    return Certificate(
        variables=(var,),
        target=f.to_mpoly(),
        steps=tuple((s.weight, s.square_root.to_mpoly()) for s in steps),
        provenance=provenance,
    )


def _checked(f: UPoly, steps: List[UnivCertStep], provenance: str) -> List[UnivCertStep]:
    res = verify_exact(steps_to_certificate(f, steps, provenance))
    if not res.verified:
        raise AssertionError(f"{provenance} produced a certificate that does not expand to its input: diff {res.diff}")
    return steps


def _sign_normal(p: UPoly) -> UPoly:
    return -p if p.lc < 0 else p


def merge_steps(steps: Sequence[Tuple[Fraction, UPoly]]) -> List[UnivCertStep]:
    """Drop zero terms and add up weights of squares equal up to sign (first form kept)."""
    order: List[UPoly] = []
    acc: Dict[UPoly, Tuple[UPoly, Fraction]] = {}
    for w, s in steps:
        w = Fraction(w)
        if w == 0 or s.is_zero():
            continue
        key = _sign_normal(s)
        if key in acc:
            first, total = acc[key]
            acc[key] = (first, total + w)
        else:
            acc[key] = (s, w)
            order.append(key)
    return [UnivCertStep(acc[k][1], acc[k][0]) for k in order if acc[k][1] != 0]


def _require_nonnegative(f: UPoly) -> None:
    if f.is_zero():
        return
    if f.degree % 2 or f.lc < 0:
        w = negative_witness(f)
        raise NotNonNegative(f"{f} is negative at {w}", (w,), f(w))
    w = negative_witness(f)
    if w is not None:
        raise NotNonNegative(f"{f} is negative at {w}", (w,), f(w))


# -- univsos1 ---------------------------------------------------------------

def quadratic_under_approx(f: UPoly, t) -> UPoly:
    """Nonnegative f_t of degree <= 2 with f - f_t >= 0 and (f - f_t)(t) = 0.

    The polynomial is the degree-two Taylor-like model at t whose quadratic
    coefficient is the smallest that keeps f_t nonnegative, i.e. the perfect
    square f(t) * (1 + f'(t)/(2 f(t)) (X - t))**2.  Raises
    NoUnderApproximation when f - f_t is negative somewhere (t too far from
    the global minimizer).
    """
    t = Fraction(t)
    if f.degree < 2:
        raise ValueError("quadratic under-approximation needs degree >= 2")
    ft = f(t)
    if ft < 0:
        raise NoUnderApproximation(f"f({t}) = {ft} is negative")
    if f.degree == 2:
        if f.lc > 0 and f.coeff(1) ** 2 <= 4 * f.lc * f.coeff(0):
            return f
        raise NoUnderApproximation("quadratic input is not nonnegative")
    d = f.derivative()(t)
    if d == 0:
        cand = UPoly.const(ft)
    elif ft == 0:
        raise NoUnderApproximation(f"f vanishes at {t} with nonzero slope")
    else:
        cand = _tangent_square(ft, d, t).value()
    diff = f - cand
    q = diff.exact_div((X - t) ** 2)
    if negative_witness(q) is not None:
        raise NoUnderApproximation(f"f - f_t changes sign away from t = {t}")
    return cand


def _tangent_square(ft: Fraction, d: Fraction, t: Fraction) -> UnivCertStep:
    # f(t) + f'(t)(X - t) + f'(t)^2/(4 f(t)) (X - t)^2 as a single weighted square
    return UnivCertStep(ft, UPoly.const(1) + (X - t) * (d / (2 * ft)))


def _under_approx_step(f: UPoly, t: Fraction) -> Tuple[UPoly, List[Tuple[Fraction, UPoly]]]:
    ft = quadratic_under_approx(f, t)
    if ft.degree <= 0:
        return ft, [(ft.coeff(0), UPoly.const(1))]
    if ft == f:
        return ft, _quadratic_steps(f)
    step = _tangent_square(f(t), f.derivative()(t), t)
    return ft, [(step.weight, step.square_root)]


def _quadratic_steps(g: UPoly) -> List[Tuple[Fraction, UPoly]]:
    """a (X + b/2a)^2 + (c - b^2/4a) for a nonnegative g of degree <= 2."""
    if g.degree <= 0:
        return [(g.coeff(0), UPoly.const(1))]
    c, b, a = g.coeff(0), g.coeff(1), g.coeff(2)
    return [(a, X + b / (2 * a)), (c - b * b / (4 * a), UPoly.const(1))]


def univsos1(f: UPoly, initial_width: Fraction = Fraction(2), min_width: Fraction = Fraction(1, 2 ** 256)) -> List[UnivCertStep]:
    """SOS certificate of a nonnegative univariate polynomial by recursive under-approximation."""
    _require_nonnegative(f)
    if f.is_zero():
        return []
    raw = _univsos1_rec(f, Fraction(initial_width), Fraction(min_width))
    return _checked(f, merge_steps(raw), "univsos1")


def _univsos1_rec(f: UPoly, width: Fraction, min_width: Fraction) -> List[Tuple[Fraction, UPoly]]:
    g, h = split_square(f)
    if g.degree <= 2:
        inner = _quadratic_steps(g)
        return [(w, s * h) for w, s in inner]
    while True:
        bracket = minimizer_bracket(g, width)
        for t in _candidates(bracket):
            try:
                ft, ft_steps = _under_approx_step(g, t)
            except NoUnderApproximation:
                continue
            log.debug("univsos1: deg %d, t = %s, f_t = %s", g.degree, t, ft)
            rest = _univsos1_rec(g - ft, width, min_width) if g != ft else []
            return [(w, s * h) for w, s in rest + ft_steps]
        width /= 2
        if width < min_width:
            raise BudgetExhausted(f"no quadratic under-approximation found down to width {min_width}")


def _candidates(iv) -> List[Fraction]:
    if iv.kind == EXACT:
        return [iv.lo]
    return [iv.mid, iv.lo, iv.hi]


# -- univsos2 ---------------------------------------------------------------

def slack(k: int) -> UPoly:
    """sum_{i=0}^{k} X^(2i)."""
    return UPoly([1 if i % 2 == 0 else 0 for i in range(2 * k + 1)])


def _require_strictly_positive(f: UPoly) -> None:
    _require_nonnegative(f)
    if f.is_zero():
        raise NotStrictlyPositive("the zero polynomial is not strictly positive")
    if f.degree % 2:
        raise NotStrictlyPositive(f"odd degree {f.degree}")
    if sturm_count(f) > 0:
        exact = [iv.lo for iv in isolate_real_roots(f) if iv.kind == EXACT]
        raise NotStrictlyPositive(
            f"{f} has a real root" + (f" at {exact[0]}" if exact else ""), (exact[0],) if exact else None
        )


def perturbation_epsilon(f: UPoly, epsilon_init: Fraction = Fraction(1), max_halvings: int = 256) -> Fraction:
    """Largest eps = epsilon_init / 2**j making f - eps * sum X^(2i) strictly positive."""
    k = f.degree // 2
    t = slack(k)
    eps = Fraction(epsilon_init)
    for _ in range(max_halvings + 1):
        fe = f - t * eps
        if fe.degree == 2 * k and fe.lc > 0 and fe.coeff(0) > 0 and sturm_count(fe) == 0:
            return eps
        eps /= 2
    raise BudgetExhausted(f"no perturbation found after {max_halvings} halvings")


def _round_to(c: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(round(c * scale), scale)


def conjugate_factor(fe: UPoly, precision_bits: int) -> Tuple[UPoly, UPoly]:
    """Monic s1 and s2 with s1 + i s2 ~ prod (X - conj(z)) over the upper-half-plane roots z of fe.

    Roots are computed a little beyond ``precision_bits``; the product is formed
    exactly and its coefficients rounded to multiples of 2**-precision_bits.
    """
    n = fe.degree
    roots = complex_roots(fe, precision_bits + 2 * n + 16)
    re, im = UPoly.const(1), UPoly.const(0)
    for z in roots[::2]:
        a, b = z.re, z.im
        lin = X - a
        # (re + i im)(X - a + i b)
        re, im = re * lin - im * b, im * lin + re * b
    s1 = UPoly(_round_to(c, precision_bits) for c in re.coeffs)
    s2 = UPoly(_round_to(c, precision_bits) for c in im.coeffs)
    return s1, s2


def absorb_odd_monomials(u: UPoly, eps: Fraction, k: int) -> Optional[List[UnivCertStep]]:
    """SOS of eps * sum_{j<=k} X^(2j) + u, or None when an even coefficient goes negative.

    Each odd term c X^(2i+1) is rewritten as
    (|c|/2)(X^(i+1) + sign(c) X^i)^2 - (|c|/2)(X^(2i+2) + X^(2i)).
    """
    if u.degree > 2 * k:
        raise ValueError(f"remainder degree {u.degree} exceeds {2 * k}")
    eps = Fraction(eps)
    even = [eps + u.coeff(2 * j) for j in range(k + 1)]
    steps: List[Tuple[Fraction, UPoly]] = []
    for i in range(k):
        c = u.coeff(2 * i + 1)
        if not c:
            continue
        half = abs(c) / 2
        sign = 1 if c > 0 else -1
        steps.append((half, UPoly.monomial(i + 1) + UPoly.monomial(i, sign)))
        even[i + 1] -= half
        even[i] -= half
    if any(e < 0 for e in even):
        return None
    steps.extend((e, UPoly.monomial(j)) for j, e in enumerate(even) if e)
    return merge_steps(steps)


@dataclass
class Univsos2Result:
    epsilon: Fraction
    leading: Fraction
    s1: UPoly
    s2: UPoly
    remainder: UPoly
    precision_bits: int
    steps: List[UnivCertStep]


def univsos2_detailed(
    f: UPoly,
    epsilon: Optional[Fraction] = None,
    epsilon_init: Fraction = Fraction(1),
    precision_bits: int = 53,
    precision_factor: int = 8,
    max_precision_bits: int = 53 * 8 ** 4,
) -> Univsos2Result:
    """univsos2 with every intermediate exposed.

    The perturbation is searched from ``epsilon_init`` downwards; ``epsilon``
    skips the search (it must still give a strictly positive perturbation).
    Precision is multiplied by ``precision_factor`` whenever the remainder
    cannot be absorbed, up to ``max_precision_bits``.
    """
    _require_strictly_positive(f)
    k = f.degree // 2
    if k == 0:
        steps = [UnivCertStep(f.coeff(0), UPoly.const(1))]
        return Univsos2Result(Fraction(0), f.lc, UPoly.const(0), UPoly.const(0), UPoly.const(0), precision_bits, _checked(f, steps, "univsos2"))
    if epsilon is None:
        eps = perturbation_epsilon(f, epsilon_init)
    else:
        eps = Fraction(epsilon)
        fe = f - slack(k) * eps
        if not (eps > 0 and fe.degree == 2 * k and fe.lc > 0 and fe.coeff(0) > 0 and sturm_count(fe) == 0):
            raise ValueError(f"epsilon = {eps} does not leave a strictly positive perturbation")
    fe = f - slack(k) * eps
    lead = fe.lc
    bits = precision_bits
    while bits <= max_precision_bits:
        try:
            s1, s2 = conjugate_factor(fe, bits)
        except RootFindingError as e:
            log.debug("univsos2: root finding failed at %d bits: %s", bits, e)
            bits *= precision_factor
            continue
        u = fe - (s1 * s1 + s2 * s2) * lead
        absorbed = absorb_odd_monomials(u, eps, k)
        if absorbed is not None:
            raw = [(lead, s1), (lead, s2)] + [(s.weight, s.square_root) for s in absorbed]
            steps = _checked(f, merge_steps(raw), "univsos2")
            return Univsos2Result(eps, lead, s1, s2, u, bits, steps)
        log.debug("univsos2: absorption failed at %d bits (eps = %s)", bits, eps)
        bits *= precision_factor
    raise BudgetExhausted(f"remainder not absorbed up to {max_precision_bits} bits of root precision")


def univsos2(f: UPoly, **kwargs) -> List[UnivCertStep]:
    """SOS certificate of a strictly positive univariate polynomial via perturbed complex roots."""
    return univsos2_detailed(f, **kwargs).steps
