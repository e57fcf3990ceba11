"""Weighted SOS certificates: data model, exact checker, bit size, text and JSON forms.

The checker deliberately does not use the polynomial arithmetic of
:mod:`ratsos.poly`; it expands every square with its own dictionary code so a
bug in the shared arithmetic cannot make a wrong certificate look right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ParseError
from .poly import Monomial, MPoly

PROVENANCES = ("univsos1", "univsos2", "multivsos", "external")


@dataclass(frozen=True)
class Certificate:
    """target = sum of weight * square_root**2 over the steps."""

    variables: Tuple[str, ...]
    target: Optional[MPoly]
    steps: Tuple[Tuple[Fraction, MPoly], ...] = ()
    provenance: str = "external"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "steps", tuple((Fraction(w), s) for w, s in self.steps))
        n = len(self.variables)
        if n < 1:
            raise ValueError("a certificate needs at least one variable")
        for w, s in self.steps:
            if w <= 0:
                raise ValueError(f"step weight must be positive, got {w}")
            if s.nvars != n:
                raise ValueError(f"square root over {s.nvars} variables in a {n}-variable certificate")
        if self.target is not None and self.target.nvars != n:
            raise ValueError("target has the wrong number of variables")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def with_target(self, target: MPoly) -> "Certificate":
        return Certificate(self.variables, target, self.steps, self.provenance)


# -- trusted checker --------------------------------------------------------

def _expand_weighted_square(weight: Fraction, terms: Sequence[Tuple[Monomial, Fraction]], acc: Dict[Monomial, Fraction]) -> None:
    for a, (ma, ca) in enumerate(terms):
        sq = tuple(x + x for x in ma)
        acc[sq] = acc.get(sq, Fraction(0)) + weight * ca * ca
        for mb, cb in terms[a + 1:]:
            prod = tuple(x + y for x, y in zip(ma, mb))
            acc[prod] = acc.get(prod, Fraction(0)) + 2 * weight * ca * cb


@dataclass(frozen=True)
class VerifyResult:
    verified: bool
    diff: Dict[Monomial, Fraction] = field(default_factory=dict)

    def diff_poly(self, nvars: int) -> MPoly:
        return MPoly(nvars, self.diff)

    def __bool__(self) -> bool:
        return self.verified


def verify_exact(cert: Certificate) -> VerifyResult:
    """verified, or the exact difference target - sum w s^2 as a coefficient map."""
    if cert.target is None:
        raise ValueError("certificate has no target polynomial to check against")
    acc: Dict[Monomial, Fraction] = {}
    for w, s in cert.steps:
        if w <= 0:
            return VerifyResult(False, {})
        _expand_weighted_square(Fraction(w), list(s.terms.items()), acc)
    diff: Dict[Monomial, Fraction] = {}
    for m, c in cert.target.terms.items():
        d = c - acc.pop(m, Fraction(0))
        if d:
            diff[m] = d
    for m, c in acc.items():
        if c:
            diff[m] = -c
    return VerifyResult(not diff, diff)


# -- size -------------------------------------------------------------------

@dataclass(frozen=True)
class BitSize:
    tau: int

    def __int__(self) -> int:
        return self.tau


def _bits(q: Fraction) -> int:
    return abs(q.numerator).bit_length() + q.denominator.bit_length()


def bit_size(cert: Certificate) -> BitSize:
    """Bit length of every numerator and denominator among weights and square-root coefficients."""
    total = 0
    for w, s in cert.steps:
        total += _bits(w)
        total += sum(_bits(c) for _, c in s.terms.items())
    return BitSize(total)


# -- text forms -------------------------------------------------------------

def _q(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def flat_list(cert: Certificate) -> str:
    items: List[str] = []
    for w, s in cert.steps:
        items.append(_q(w))
        items.append(s.format(cert.variables))
    return "[" + ", ".join(items) + "]"


def serialize(cert: Certificate, fmt: str = "flat-list", header: bool = True) -> str:
    if fmt == "json":
        return json.dumps(to_json(cert), indent=2) + "\n"
    if fmt != "flat-list":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    if header:
        lines.append("variables: " + ", ".join(cert.variables))
        if cert.target is not None:
            lines.append("target: " + cert.target.format(cert.variables))
        lines.append("provenance: " + cert.provenance)
    lines.append(flat_list(cert))
    return "\n".join(lines) + "\n"


def _terms_json(p: MPoly) -> list:
    return [[list(m), _q(c)] for m, c in p.terms.items()]


def to_json(cert: Certificate) -> dict:
    out = {"variables": list(cert.variables)}
    if cert.target is not None:
        out["target"] = _terms_json(cert.target)
    out["steps"] = [{"weight": _q(w), "square": _terms_json(s)} for w, s in cert.steps]
    out["provenance"] = cert.provenance
    return out


def _rational(text, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(f"{where}: rationals are written as strings 'num/den'")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"{where}: bad rational {text!r}") from e


def _poly_json(data, nvars: int, where: str) -> MPoly:
    if not isinstance(data, list):
        raise ParseError(f"{where}: expected a list of [exponents, coefficient] pairs")
    terms: Dict[Monomial, Fraction] = {}
    for k, item in enumerate(data):
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], list)):
            raise ParseError(f"{where}[{k}]: expected [exponents, coefficient]")
        exps = item[0]
        if len(exps) != nvars or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in exps):
            raise ParseError(f"{where}[{k}]: exponents must be {nvars} nonnegative integers")
        m = tuple(exps)
        terms[m] = terms.get(m, Fraction(0)) + _rational(item[1], f"{where}[{k}]")
    return MPoly(nvars, terms)


def from_json(data) -> Certificate:
    if not isinstance(data, dict):
        raise ParseError("certificate JSON must be an object")
    steps_raw = data.get("steps")
    if not isinstance(steps_raw, list):
        raise ParseError("certificate JSON needs a 'steps' list")
    names = data.get("variables")
    if names is None:
        names = ["X"]
        for st in steps_raw:
            sq = st.get("square") if isinstance(st, dict) else None
            if sq and isinstance(sq[0], list) and isinstance(sq[0][0], list):
                n = len(sq[0][0])
                names = ["X"] if n == 1 else [f"X{i + 1}" for i in range(n)]
                break
    if not (isinstance(names, list) and names and all(isinstance(v, str) for v in names)):
        raise ParseError("'variables' must be a nonempty list of names")
    n = len(names)
    target = _poly_json(data["target"], n, "target") if "target" in data else None
    steps = []
    for k, st in enumerate(steps_raw):
        if not isinstance(st, dict) or "weight" not in st or "square" not in st:
            raise ParseError(f"steps[{k}] needs 'weight' and 'square'")
        w = _rational(st["weight"], f"steps[{k}].weight")
        if w <= 0:
            raise ParseError(f"steps[{k}].weight must be positive")
        steps.append((w, _poly_json(st["square"], n, f"steps[{k}].square")))
    prov = data.get("provenance", "external")
    if prov not in PROVENANCES:
        raise ParseError(f"unknown provenance {prov!r}")
    return Certificate(tuple(names), target, tuple(steps), prov)


def _split_top_level(body: str, line: int, col0: int) -> List[str]:
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ')'", line, col0 + k)
        elif ch == "," and depth == 0:
            parts.append(body[start:k])
            start = k + 1
    if depth:
        raise ParseError("unbalanced '('", line, col0 + len(body))
    parts.append(body[start:])
    if len(parts) == 1 and not parts[0].strip():
        return []
    return parts


def parse_flat_list(text: str, target: Optional[str] = None, variables: Optional[Sequence[str]] = None) -> Certificate:
    """Parse the optional ``key: value`` header lines and the ``[c1, s1, ...]`` list."""
    from .parse import parse_polys

    header: Dict[str, str] = {}
    list_lines: List[Tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not list_lines and not line.startswith("[") and ":" in line:
            key, _, val = line.partition(":")
            key = key.strip().lower()
            if key not in ("variables", "target", "provenance"):
                raise ParseError(f"unknown header field {key!r}", lineno, 1)
            header[key] = val.strip()
            continue
        list_lines.append((lineno, raw))
    if not list_lines:
        raise ParseError("no certificate list found", 1, 1)
    first_line = list_lines[0][0]
    joined = " ".join(l for _, l in list_lines).strip()
    if not (joined.startswith("[") and joined.endswith("]")):
        raise ParseError("certificate list must be enclosed in [ ]", first_line, 1)
    items = _split_top_level(joined[1:-1], first_line, 2)
    if len(items) % 2:
        raise ParseError("certificate list needs an even number of entries (weight, square root)", first_line, 1)
    if variables is None and "variables" in header:
        variables = [v.strip() for v in header["variables"].split(",") if v.strip()]
    tgt_text = target if target is not None else header.get("target")
    texts = [s for s in items] + ([tgt_text] if tgt_text is not None else [])
    polys, names = parse_polys(texts, variables)
    steps = []
    for k in range(0, len(items), 2):
        wp = polys[k]
        if wp.degree > 0:
            raise ParseError(f"entry {k + 1} must be a rational weight, got {items[k].strip()!r}", first_line, 1)
        w = wp.coeff((0,) * wp.nvars)
        if w <= 0:
            raise ParseError(f"weight {items[k].strip()!r} must be positive", first_line, 1)
        steps.append((w, polys[k + 1]))
    tgt = polys[-1] if tgt_text is not None else None
    prov = header.get("provenance", "external")
    if prov not in PROVENANCES:
        raise ParseError(f"unknown provenance {prov!r}", 1, 1)
    return Certificate(names, tgt, tuple(steps), prov)


def parse_certificate(text: str, target: Optional[str] = None) -> Certificate:
    """Either format; JSON is recognized by a leading '{'."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"malformed JSON: {e.msg}", e.lineno, e.colno) from e
        cert = from_json(data)
        if target is not None:
            from .parse import parse_poly

            cert = cert.with_target(parse_poly(target, cert.variables))
        return cert
    return parse_flat_list(text, target)
