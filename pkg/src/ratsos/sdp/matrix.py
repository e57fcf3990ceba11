"""Rational symmetric matrices, affine Gram constraints, exact LDL^T and projection."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import mpmath
import numpy as np

from ..errors import InconsistentConstraints, NotPSD

Entry = Tuple[int, int]


def to_dyadic(v, bits: int) -> Fraction:
    """Nearest multiple of 2**-bits to a float or mpmath number."""
    scale = 1 << bits
    if isinstance(v, (float, np.floating, int)):
        return Fraction(round(Fraction(float(v)) * scale), scale)
    # mpf values are converted exactly, independent of the working precision
    sign, man, exp, _ = mpmath.mpf(v)._mpf_
    if not man:
        return Fraction(0)
    exact = Fraction(-man if sign else man) * (Fraction(2) ** exp)
    return Fraction(round(exact * scale), scale)


class SymMatrix:
    """Symmetric rational matrix stored as its nonzero upper triangle."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries: Optional[Mapping[Entry, object]] = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        clean: Dict[Entry, Fraction] = {}
        for (i, j), v in (entries or {}).items():
            if i > j:
                i, j = j, i
            if not (0 <= i and j < dim):
                raise IndexError(f"entry ({i}, {j}) outside a {dim}x{dim} matrix")
            v = Fraction(v)
            if v:
                clean[(i, j)] = clean.get((i, j), 0) + v
        self.dim = dim
        self.entries: Dict[Entry, Fraction] = {k: clean[k] for k in sorted(clean) if clean[k]}

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls(dim, {(i, i): 1 for i in range(dim)})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]]) -> "SymMatrix":
        n = len(rows)
        for i in range(n):
            for j in range(i):
                if Fraction(rows[i][j]) != Fraction(rows[j][i]):
                    raise ValueError("matrix is not symmetric")
        return cls(n, {(i, j): rows[i][j] for i in range(n) for j in range(i, n)})

    @classmethod
    def from_float(cls, arr, bits: int) -> "SymMatrix":
        """Round the upper triangle of a float (or mpf) matrix to multiples of 2**-bits."""
        n = len(arr)
        ent = {}
        for i in range(n):
            for j in range(i, n):
                ent[(i, j)] = to_dyadic((arr[i][j] + arr[j][i]) / 2, bits)
        return cls(n, ent)

    def __getitem__(self, key: Entry) -> Fraction:
        i, j = key
        if i > j:
            i, j = j, i
        return self.entries.get((i, j), Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, SymMatrix) and self.dim == other.dim and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.dim, tuple(self.entries.items())))

    def __repr__(self) -> str:
        return f"SymMatrix({self.dim}, {self.to_rows()})"

    def to_rows(self) -> List[List[Fraction]]:
        rows = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
            rows[j][i] = v
        return rows

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        for (i, j), v in self.entries.items():
            out[i, j] = out[j, i] = float(v)
        return out

    def full_entries(self) -> Iterable[Tuple[int, int, Fraction]]:
        """Every nonzero (i, j, value) of the full matrix, both triangles."""
        for (i, j), v in self.entries.items():
            yield i, j, v
            if i != j:
                yield j, i, v

    def trace(self) -> Fraction:
        return sum((v for (i, j), v in self.entries.items() if i == j), Fraction(0))

    def inner(self, other: "SymMatrix") -> Fraction:
        """Frobenius inner product."""
        a, b = (self, other) if len(self.entries) <= len(other.entries) else (other, self)
        total = Fraction(0)
        for (i, j), v in a.entries.items():
            w = b.entries.get((i, j))
            if w is not None:
                total += v * w if i == j else 2 * v * w
        return total

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return SymMatrix(self.dim, ent)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "SymMatrix":
        c = Fraction(c)
        return SymMatrix(self.dim, {k: v * c for k, v in self.entries.items()})


@dataclass
class SdpProblem:
    """Find G >= 0 with <A_k, G> = b_k for every constraint, maximizing lambda_min(G)."""

    dim: int
    constraints: List[Tuple[SymMatrix, Fraction]] = field(default_factory=list)

    def __post_init__(self):
        self.constraints = [(a, Fraction(b)) for a, b in self.constraints]
        for a, _ in self.constraints:
            if a.dim != self.dim:
                raise ValueError(f"constraint of dimension {a.dim} in a problem of dimension {self.dim}")

    def residuals(self, g: SymMatrix) -> List[Fraction]:
        return [a.inner(g) - b for a, b in self.constraints]

    def is_disjoint(self) -> bool:
        seen = set()
        for a, _ in self.constraints:
            keys = set(a.entries)
            if keys & seen:
                return False
            seen |= keys
        return True

    def check_consistent(self) -> None:
        """Raise InconsistentConstraints unless some symmetric G satisfies every constraint."""
        if self.is_disjoint():
            for a, b in self.constraints:
                if not a.entries and b != 0:
                    raise InconsistentConstraints(f"constraint with empty matrix and right-hand side {b}")
            return
        cols = sorted({k for a, _ in self.constraints for k in a.entries})
        index = {k: n for n, k in enumerate(cols)}
        rows = []
        for a, b in self.constraints:
            r = [Fraction(0)] * (len(cols) + 1)
            for (i, j), v in a.entries.items():
                r[index[(i, j)]] = v if i == j else 2 * v
            r[-1] = b
            rows.append(r)
        _row_reduce(rows, len(cols))


def _row_reduce(rows: List[List[Fraction]], ncols: int) -> List[Tuple[int, int]]:
    """In-place Gauss-Jordan on an augmented system; returns (row, pivot column) pairs."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            raise InconsistentConstraints("affine constraints are inconsistent")
    return pivots


def round_project(g: SymMatrix, constraints: Sequence[Tuple[SymMatrix, Fraction]]) -> SymMatrix:
    """Exact Frobenius-orthogonal projection of g onto {G : <A_k, G> = b_k}."""
    cons = [(a, Fraction(b)) for a, b in constraints]
    if not cons:
        return g
    prob = SdpProblem(g.dim, cons)
    r = [a.inner(g) - b for a, b in cons]
    if prob.is_disjoint():
        out = dict(g.entries)
        for (a, _), rk in zip(cons, r):
            if not rk:
                continue
            h = a.inner(a)
            if h == 0:
                raise InconsistentConstraints("constraint with empty matrix and nonzero right-hand side")
            lam = rk / h
            for k, v in a.entries.items():
                out[k] = out.get(k, 0) - lam * v
        return SymMatrix(g.dim, out)
    m = len(cons)
    rows = [[cons[k][0].inner(cons[l][0]) for l in range(m)] + [r[k]] for k in range(m)]
    prob.check_consistent()
    pivots = _row_reduce(rows, m)
    lam = [Fraction(0)] * m
    for row, col in pivots:
        lam[col] = rows[row][-1]
    out = dict(g.entries)
    for (a, _), lk in zip(cons, lam):
        if lk:
            for k, v in a.entries.items():
                out[k] = out.get(k, 0) - lk * v
    return SymMatrix(g.dim, out)


@dataclass(frozen=True)
class LdlFactorization:
    """P^T L D L^T P = G with L unit lower triangular; ``perm[a]`` is the original index of row a."""

    perm: Tuple[int, ...]
    L: Tuple[Tuple[Fraction, ...], ...]
    D: Tuple[Fraction, ...]

    def reconstruct(self) -> SymMatrix:
        n = len(self.D)
        ent = {}
        for a in range(n):
            for b in range(a, n):
                v = sum((self.L[a][k] * self.D[k] * self.L[b][k] for k in range(min(a, b) + 1)), Fraction(0))
                ent[(self.perm[a], self.perm[b])] = v
        return SymMatrix(n, ent)


def ldl_decompose(g: SymMatrix, pivoting: str = "natural") -> LdlFactorization:
    """Exact LDL^T of a symmetric rational matrix; raises NotPSD on a negative pivot.

    ``pivoting="natural"`` keeps the given order (a zero diagonal must then have a
    zero row), ``"max-diagonal"`` brings the largest remaining diagonal forward.
    """
    if pivoting not in ("natural", "max-diagonal"):
        raise ValueError(f"unknown pivoting rule {pivoting!r}")
    n = g.dim
    a = g.to_rows()
    perm = list(range(n))
    L = [[Fraction(0)] * n for _ in range(n)]
    D = [Fraction(0)] * n
    for k in range(n):
        if pivoting == "max-diagonal":
            p = max(range(k, n), key=lambda i: a[i][i])
            if p != k:
                a[k], a[p] = a[p], a[k]
                for row in a:
                    row[k], row[p] = row[p], row[k]
                L[k], L[p] = L[p], L[k]
                perm[k], perm[p] = perm[p], perm[k]
        d = a[k][k]
        L[k][k] = Fraction(1)
        if d < 0:
            raise NotPSD(f"negative pivot {d} at position {k}", k, d)
        if d == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    raise NotPSD(f"zero pivot with nonzero off-diagonal entry at position {k}", k, d)
            continue
        D[k] = d
        col = [a[i][k] for i in range(n)]
        for i in range(k + 1, n):
            if col[i]:
                lik = col[i] / d
                L[i][k] = lik
                row = a[i]
                for j in range(k + 1, i + 1):
                    if col[j]:
                        row[j] -= lik * col[j]
                        if j != i:
                            a[j][i] = row[j]
    return LdlFactorization(tuple(perm), tuple(tuple(r) for r in L), tuple(D))
