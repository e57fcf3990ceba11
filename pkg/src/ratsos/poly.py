"""Exact polynomials over the rationals.

``UPoly`` is a dense univariate polynomial (coefficient ``i`` multiplies ``X**i``),
``MPoly`` a sparse multivariate one keyed by exponent tuples.  Both are immutable
and canonical: trailing zeros are trimmed, zero coefficients are never stored and
multivariate terms are kept in descending graded-lexicographic order, so two
polynomials are equal exactly when their coefficients are.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def glex_key(m: Monomial):
    """Sort key for graded-lex order (ascending)."""
    return (sum(m), m)


def _fmt_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_terms(items: Iterable[Tuple[Fraction, str]]) -> str:
    out: List[str] = []
    for c, mono in items:
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _fmt_scalar(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_scalar(a)}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out) if out else "0"


class UPoly:
    """Dense univariate polynomial with ``Fraction`` coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        c = [_frac(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(c)

    @classmethod
    def x(cls) -> "UPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: Scalar) -> "UPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, deg: int, c: Scalar = 1) -> "UPoly":
        return cls([0] * deg + [c])

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = UPoly.const(other)
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> Optional["UPoly"]:
        if isinstance(other, UPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return UPoly.const(other)
        return None

    def __add__(self, other) -> "UPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return UPoly(self.coeff(i) + o.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "UPoly":
        return UPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "UPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "UPoly":
        return (-self) + other

    def __mul__(self, other) -> "UPoly":
        if isinstance(other, (int, Fraction)):
            return UPoly(c * other for c in self.coeffs)
        if not isinstance(other, UPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return UPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UPoly":
        if n < 0:
            raise ValueError("negative exponent")
        result, base = UPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def derivative(self) -> "UPoly":
        return UPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> "UPoly":
        if not self.coeffs:
            return self
        lc = self.lc
        return UPoly(c / lc for c in self.coeffs)

    def divmod(self, d: "UPoly") -> Tuple["UPoly", "UPoly"]:
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dd, dl = d.degree, d.lc
        if len(r) - 1 < dd:
            return UPoly(), self
        q = [Fraction(0)] * (len(r) - dd)
        for k in range(len(r) - 1 - dd, -1, -1):
            c = r[k + dd] / dl
            q[k] = c
            if c:
                for j, dc in enumerate(d.coeffs):
                    r[k + j] -= c * dc
        return UPoly(q), UPoly(r[:dd])

    def __floordiv__(self, d: "UPoly") -> "UPoly":
        return self.divmod(d)[0]

    def __mod__(self, d: "UPoly") -> "UPoly":
        return self.divmod(d)[1]

    def exact_div(self, d: "UPoly") -> "UPoly":
        q, r = self.divmod(d)
        if r:
            raise ArithmeticError("division is not exact")
        return q

    def shift(self, a: Scalar) -> "UPoly":
        """Return p(X + a)."""
        out = UPoly()
        lin = UPoly((a, 1))
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def to_mpoly(self) -> "MPoly":
        return MPoly(1, {(i,): c for i, c in enumerate(self.coeffs) if c})

    def format(self, var: str = "X") -> str:
        items = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c:
                mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
                items.append((c, mono))
        return _fmt_terms(items)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"UPoly({self.format()})"


def poly_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd of two univariate polynomials."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while b:
        a, b = b, a % b
        if b:
            b = b.monic()
    return a.monic()


@dataclass(frozen=True)
class SquarefreeFactorization:
    content: Fraction
    factors: Tuple[Tuple[UPoly, int], ...]

    def expand(self) -> UPoly:
        out = UPoly.const(self.content)
        for f, m in self.factors:
            out = out * f ** m
        return out


def squarefree_decompose(p: UPoly) -> SquarefreeFactorization:
    """Yun's algorithm: p = content * prod f_i**m_i, f_i monic, square-free, coprime."""
    if p.is_zero():
        raise ValueError("square-free decomposition of the zero polynomial")
    content = p.lc
    f = p.monic()
    if f.degree == 0:
        return SquarefreeFactorization(content, ())
    factors = []
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f.exact_div(a)
    c = df.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        if a.degree > 0:
            factors.append((a, i))
        i += 1
    return SquarefreeFactorization(content, tuple(factors))


def squarefree_part(p: UPoly) -> UPoly:
    """Monic product of the distinct irreducible factors of p."""
    g = poly_gcd(p, p.derivative()) if p.degree > 0 else UPoly.const(1)
    return p.exact_div(g).monic()


def split_square(p: UPoly) -> Tuple[UPoly, UPoly]:
    """Write p = g * h**2 with g square-free (up to the content it carries)."""
    sqf = squarefree_decompose(p)
    g, h = UPoly.const(sqf.content), UPoly.const(1)
    for f, m in sqf.factors:
        if m % 2:
            g = g * f
        if m >= 2:
            h = h * f ** (m // 2)
    return g, h


class MPoly:
    """Sparse multivariate polynomial over the rationals."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, Scalar]] = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        clean: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != nvars or any(e < 0 for e in m):
                raise ValueError(f"bad monomial {m} for {nvars} variables")
            c = _frac(c)
            if c:
                clean[m] = c
        self.nvars = nvars
        self.terms: Dict[Monomial, Fraction] = {
            m: clean[m] for m in sorted(clean, key=glex_key, reverse=True)
        }

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Scalar = 1) -> "MPoly":
        return cls(len(exps), {tuple(exps): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def support(self) -> List[Monomial]:
        return list(self.terms)

    def coeff(self, m: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.terms == MPoly.const(self.nvars, other).terms
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, tuple(self.terms.items())))

    def _check(self, other: "MPoly") -> None:
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> Optional["MPoly"]:
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(self.nvars, other)
        return None

    def __add__(self, other) -> "MPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) - c
        return MPoly(self.nvars, out)

    def __rsub__(self, other) -> "MPoly":
        return (-self) + other

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            return MPoly(self.nvars, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative exponent")
        result, base = MPoly.const(self.nvars, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self, var: int) -> "MPoly":
        out = {}
        for m, c in self.terms.items():
            if m[var]:
                e = list(m)
                e[var] -= 1
                out[tuple(e)] = c * m[var]
        return MPoly(self.nvars, out)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        if len(point) != self.nvars:
            raise ValueError("wrong number of coordinates")
        pt = [_frac(x) for x in point]
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v *= x ** e
            total += v
        return total

    def eval_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for m, c in self.terms.items():
            v = float(c)
            for x, e in zip(point, m):
                if e:
                    v *= x ** e
            total += v
        return total

    def to_upoly(self) -> UPoly:
        if self.nvars != 1:
            raise ValueError("not univariate")
        deg = max(self.degree, 0)
        return UPoly(self.coeff((i,)) for i in range(deg + 1))

    def format(self, names: Optional[Sequence[str]] = None) -> str:
        if names is None:
            names = ["X"] if self.nvars == 1 else [f"X{i + 1}" for i in range(self.nvars)]
        items = []
        for m, c in self.terms.items():
            parts = []
            for name, e in zip(names, m):
                if e == 1:
                    parts.append(name)
                elif e > 1:
                    parts.append(f"{name}^{e}")
            items.append((c, "*".join(parts)))
        return _fmt_terms(items)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"MPoly({self.nvars}, {self.format()})"
