"""SDPA sparse format (.dat-s) writer and readers for problems and solver output.

SDPA solves the pair

    (P)  min  sum_k c_k x_k   s.t.  sum_k F_k x_k - F_0 >= 0
    (D)  max  <F_0, Y>        s.t.  <F_k, Y> = c_k,  Y >= 0

so the Gram side of our lifted max-min-eigenvalue problem is SDPA's dual
matrix ``yMat``.  Block 1 carries Y (the shifted Gram matrix), block 2 is a
one-entry diagonal block carrying the scalar s.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from ..errors import SdpaFormatError
from .feasible import lift
from .matrix import SdpProblem, SymMatrix
from .solver import SparseSym, sparse_from_entries

PathLike = Union[str, Path]


def _fmt(v) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return repr(float(v))


def sdpa_text(prob: SdpProblem) -> str:
    """The lifted problem as .dat-s text (deterministic, byte-stable)."""
    if not prob.constraints:
        raise ValueError("SDPA needs at least one constraint (mDIM >= 1)")
    lp = lift(prob)
    n = prob.dim
    lines = [
        f"* max lambda_min(G) over {len(prob.constraints)} affine constraints; G = Y + (s - {lp.shift}) I",
        str(len(prob.constraints)),
        "2",
        f"{n} -1",
        " ".join(_fmt(b) for b in lp.b),
        "0 2 1 1 1",
    ]
    for k, (a, _) in enumerate(prob.constraints, start=1):
        for (i, j), v in a.entries.items():
            lines.append(f"{k} 1 {i + 1} {j + 1} {_fmt(v)}")
        tr = a.trace()
        if tr:
            lines.append(f"{k} 2 1 1 {_fmt(tr)}")
    return "\n".join(lines) + "\n"


def sdpa_write(prob: SdpProblem, path: PathLike) -> None:
    Path(path).write_text(sdpa_text(prob))


@dataclass
class SdpaData:
    """A parsed .dat-s problem, entries 1-based as in the file."""

    block_struct: List[int]
    c: List[float]
    entries: Dict[int, List[Tuple[int, int, int, float]]] = field(default_factory=dict)

    @property
    def offsets(self) -> List[int]:
        out, pos = [], 0
        for b in self.block_struct:
            out.append(pos)
            pos += abs(b)
        return out

    @property
    def total_dim(self) -> int:
        return sum(abs(b) for b in self.block_struct)

    def to_standard(self) -> Tuple[np.ndarray, List[SparseSym], List[float]]:
        """(C, A, b) for ``min <C,X> s.t. <A_k,X> = b_k`` on the block-diagonal embedding."""
        n = self.total_dim
        off = self.offsets

        def embed(items):
            ent = {}
            for blk, i, j, v in items:
                r, c = off[blk - 1] + i - 1, off[blk - 1] + j - 1
                ent[(r, c)] = ent.get((r, c), 0.0) + v
                if r != c:
                    ent[(c, r)] = ent.get((c, r), 0.0) + v
            return ent

        C = np.zeros((n, n))
        for (r, c), v in embed(self.entries.get(0, [])).items():
            C[r, c] = -v
        A = []
        for k in range(1, len(self.c) + 1):
            ent = embed(self.entries.get(k, []))
            A.append(sparse_from_entries([(r, c, v) for (r, c), v in sorted(ent.items())]))
        return C, A, list(self.c)

    def split_blocks(self, X: np.ndarray) -> List[np.ndarray]:
        out = []
        for b, o in zip(self.block_struct, self.offsets):
            blk = X[o:o + abs(b), o:o + abs(b)]
            out.append(np.diag(blk).copy() if b < 0 else blk.copy())
        return out


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def _numbers(line: str, lineno: int) -> List[float]:
    cleaned = line.replace(",", " ").replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ")
    toks = cleaned.split()
    try:
        return [float(t) for t in toks]
    except ValueError as e:
        raise SdpaFormatError(f"expected numbers, got {line.strip()!r}", lineno) from e


def _leading_numbers(line: str, lineno: int) -> List[float]:
    """Numbers before any trailing annotation such as ``= mDIM``."""
    cleaned = line.replace(",", " ").replace("{", " ").replace("}", " ").replace("(", " ").replace(")", " ")
    out: List[float] = []
    for tok in cleaned.split():
        try:
            out.append(float(tok))
        except ValueError:
            break
    if not out:
        raise SdpaFormatError(f"expected numbers, got {line.strip()!r}", lineno)
    return out


def sdpa_parse_problem(text: str) -> SdpaData:
    lines = [(n, l) for n, l in enumerate(text.splitlines(), start=1)]
    body = [(n, l) for n, l in lines if l.strip() and l.lstrip()[0] not in "\"*"]
    if len(body) < 4:
        raise SdpaFormatError("truncated header", body[-1][0] if body else 1)
    n0, l0 = body[0]
    m_vals = _leading_numbers(l0, n0)
    if not m_vals or m_vals[0] != int(m_vals[0]) or m_vals[0] < 1:
        raise SdpaFormatError("mDIM must be a positive integer", n0)
    m = int(m_vals[0])
    n1, l1 = body[1]
    nb = _leading_numbers(l1, n1)
    if not nb or nb[0] != int(nb[0]) or nb[0] < 1:
        raise SdpaFormatError("nBLOCK must be a positive integer", n1)
    nblock = int(nb[0])
    n2, l2 = body[2]
    bs = _leading_numbers(l2, n2)
    if len(bs) < nblock or any(b != int(b) or b == 0 for b in bs[:nblock]):
        raise SdpaFormatError(f"blockStruct needs {nblock} nonzero integers", n2)
    block_struct = [int(b) for b in bs[:nblock]]
    # the c vector may wrap over several lines
    c: List[float] = []
    idx = 3
    while len(c) < m:
        if idx >= len(body):
            raise SdpaFormatError(f"c vector has {len(c)} of {m} entries", body[-1][0])
        c.extend(_numbers(body[idx][1], body[idx][0]))
        idx += 1
    if len(c) != m:
        raise SdpaFormatError(f"c vector has {len(c)} entries, expected {m}", body[idx - 1][0])
    data = SdpaData(block_struct, c)
    for lineno, line in body[idx:]:
        vals = _numbers(line, lineno)
        if len(vals) != 5:
            raise SdpaFormatError("entry lines have the form 'k blk i j value'", lineno)
        k, blk, i, j, v = vals
        if any(x != int(x) for x in (k, blk, i, j)):
            raise SdpaFormatError("indices must be integers", lineno)
        k, blk, i, j = int(k), int(blk), int(i), int(j)
        if not (0 <= k <= m and 1 <= blk <= nblock):
            raise SdpaFormatError("constraint or block index out of range", lineno)
        size = abs(block_struct[blk - 1])
        if not (1 <= i <= size and 1 <= j <= size):
            raise SdpaFormatError(f"entry ({i}, {j}) outside block {blk} of size {size}", lineno)
        if block_struct[blk - 1] < 0 and i != j:
            raise SdpaFormatError("off-diagonal entry in a diagonal block", lineno)
        if i > j:
            i, j = j, i
        data.entries.setdefault(k, []).append((blk, i, j, v))
    return data


def sdpa_read_problem(path: PathLike) -> SdpaData:
    return sdpa_parse_problem(Path(path).read_text())


def _brace_section(text: str, start: int, lineno_of) -> Tuple[object, int]:
    """Parse one brace-nested group of numbers starting at text[start] == '{'."""
    stack: List[list] = []
    pos = start
    num = re.compile(_NUM)
    while pos < len(text):
        ch = text[pos]
        if ch == "{":
            stack.append([])
            pos += 1
        elif ch == "}":
            if not stack:
                raise SdpaFormatError("unbalanced '}'", lineno_of(pos))
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                return done, pos + 1
            pos += 1
        elif ch in " \t\r\n,":
            pos += 1
        else:
            mt = num.match(text, pos)
            if not mt or not stack:
                raise SdpaFormatError(f"unexpected text {text[pos:pos + 10]!r}", lineno_of(pos))
            stack[-1].append(float(mt.group()))
            pos = mt.end()
    raise SdpaFormatError("unterminated '{' group", lineno_of(start))


@dataclass
class SdpaSolution:
    phase: str
    primal_obj: float
    dual_obj: float
    x_vec: List[float]
    x_mat: List[np.ndarray]
    y_mat: List[np.ndarray]


def sdpa_parse_solution(text: str) -> SdpaSolution:
    """Parse SDPA / SDPA-GMP result text; diagonal blocks come back as 1-d arrays."""

    def lineno_of(pos: int) -> int:
        return text.count("\n", 0, pos) + 1

    def section(name: str):
        mt = re.search(rf"^\s*{name}\s*=", text, re.M)
        if not mt:
            raise SdpaFormatError(f"no {name} section in solver output", lineno_of(len(text)))
        brace = text.find("{", mt.end())
        if brace < 0:
            raise SdpaFormatError(f"{name} has no '{{' group", lineno_of(mt.end()))
        return _brace_section(text, brace, lineno_of)[0]

    def scalar(name: str) -> float:
        mt = re.search(rf"^\s*{name}\s*=\s*({_NUM})", text, re.M)
        return float(mt.group(1)) if mt else float("nan")

    mt = re.search(r"^\s*phase\.value\s*=\s*(\S+)", text, re.M)
    phase = mt.group(1) if mt else "unknown"

    def blocks(raw) -> List[np.ndarray]:
        return [np.array(blk, dtype=float) for blk in raw]

    x_vec = section("xVec")
    if any(isinstance(v, list) for v in x_vec):
        raise SdpaFormatError("xVec must be a flat vector", 1)
    return SdpaSolution(
        phase=phase,
        primal_obj=scalar("objValPrimal"),
        dual_obj=scalar("objValDual"),
        x_vec=list(x_vec),
        x_mat=blocks(section("xMat")),
        y_mat=blocks(section("yMat")),
    )


def gram_from_blocks(prob: SdpProblem, blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Undo the lift: G = Y + (s - T) I from the two solution blocks."""
    if len(blocks) < 2:
        raise SdpaFormatError("expected two solution blocks", 1)
    y = np.asarray(blocks[0], dtype=float)
    if y.shape != (prob.dim, prob.dim):
        raise SdpaFormatError(f"block 1 has shape {y.shape}, expected {(prob.dim, prob.dim)}", 1)
    s = float(np.ravel(blocks[1])[0])
    shift = float(lift(prob).shift)
    return (y + y.T) / 2 + (s - shift) * np.eye(prob.dim)


def sdpa_read_solution(path: PathLike, prob: SdpProblem, precision_bits: int = 53) -> SymMatrix:
    """Gram matrix for ``prob`` from a solver result file for ``sdpa_write(prob)``."""
    sol = sdpa_parse_solution(Path(path).read_text())
    return SymMatrix.from_float(gram_from_blocks(prob, sol.y_mat), precision_bits)


def format_solution(data: SdpaData, X: np.ndarray, y: Sequence[float], Z: np.ndarray, phase: str = "pdOPT") -> str:
    """Render an internal-solver result in SDPA's output layout (used by the file shim)."""
    C, _, c = data.to_standard()

    def fmt_blocks(M):
        parts = []
        for b, blk in zip(data.block_struct, data.split_blocks(M)):
            if b < 0:
                parts.append("{" + ", ".join(f"{v:+.16e}" for v in blk) + " }")
            else:
                rows = ["{" + ", ".join(f"{v:+.16e}" for v in row) + " }" for row in blk]
                parts.append("{\n" + ",\n".join(rows) + "   }")
        return "{\n" + "\n".join(parts) + "\n}"

    # SDPA's primal vector is minus our dual multipliers
    x = [-float(v) for v in y]
    pobj = float(np.dot(c, x))
    dobj = float(-np.sum(C * X))
    return "\n".join([
        f"phase.value  = {phase}",
        f"objValPrimal = {pobj:+.16e}",
        f"objValDual   = {dobj:+.16e}",
        "xVec = ",
        "{" + ", ".join(f"{v:+.16e}" for v in x) + "}",
        "xMat = ",
        fmt_blocks(Z),
        "yMat = ",
        fmt_blocks(X),
        "",
    ])
