"""Client for an external SDPA-family solver run as a subprocess."""

from __future__ import annotations

import logging
import os
import shutil
import subprocess
import tempfile
from pathlib import Path
from typing import Callable, Optional

import mpmath
import numpy as np

from .errors import ConfigError, SdpaFormatError, SolverError
from .sdp.feasible import MaxMinEigResult, solve_max_min_eig
from .sdp.matrix import SdpProblem, SymMatrix
from .sdp.sdpa import gram_from_blocks, sdpa_parse_solution, sdpa_write

log = logging.getLogger(__name__)

# SDPA 7 parameter file; 16-digit output so the Gram matrix survives the round trip
PARAMS = """\
100\tunsigned int maxIteration;
1.0E-10\tdouble 0.0 < epsilonStar;
1.0E2\tdouble 0.0 < lambdaStar;
2.0\tdouble 1.0 < omegaStar;
-1.0E5\tdouble lowerBound;
1.0E5\tdouble upperBound;
0.1\tdouble 0.0 <= betaStar < 1.0;
0.2\tdouble 0.0 <= betaBar < 1.0, betaStar <= betaBar;
0.9\tdouble 0.0 < gammaStar < 1.0;
1.0E-10\tdouble 0.0 < epsilonDash;
%+.16e\tchar* xPrint
%+.16e\tchar* XPrint
%+.16e\tchar* YPrint
%+.16e\tchar* infPrint
"""


def resolve_executable(solver_path: str) -> str:
    found = shutil.which(solver_path)
    if found is None:
        p = Path(solver_path)
        if p.is_file() and os.access(p, os.X_OK):
            found = str(p)
    if found is None:
        raise ConfigError(f"SDP solver executable {solver_path!r} not found")
    return found


def external_gram(prob: SdpProblem, solver_path: str, timeout: float = 600.0) -> np.ndarray:
    """Float Gram matrix of the max-min-eigenvalue problem, solved by the external program."""
    exe = resolve_executable(solver_path)
    with tempfile.TemporaryDirectory(prefix="ratsos-sdpa-") as tmp:
        inp, out, par = (os.path.join(tmp, name) for name in ("problem.dat-s", "problem.out", "param.sdpa"))
        sdpa_write(prob, inp)
        Path(par).write_text(PARAMS)
        try:
            proc = subprocess.run(
                [exe, "-ds", inp, "-o", out, "-p", par], capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired as e:
            raise SolverError(f"{exe} timed out after {timeout} s") from e
        except OSError as e:
            raise ConfigError(f"cannot run {exe}: {e}") from e
        if proc.returncode != 0:
            raise SolverError(f"{exe} exited with status {proc.returncode}: {proc.stderr.strip()[-500:]}")
        try:
            text = Path(out).read_text()
        except OSError as e:
            raise SolverError(f"{exe} wrote no result file") from e
    try:
        sol = sdpa_parse_solution(text)
        g = gram_from_blocks(prob, sol.y_mat)
    except SdpaFormatError as e:
        raise SolverError(f"unparseable solver output: {e}") from e
    if not np.all(np.isfinite(g)):
        raise SolverError("solver output contains non-finite entries")
    return g


def external_solver_client(prob: SdpProblem, solver_path: str, precision_bits: int = 53, timeout: float = 600.0) -> SymMatrix:
    """The external solution rounded to multiples of 2**-precision_bits."""
    return SymMatrix.from_float(external_gram(prob, solver_path, timeout), precision_bits)


def external_max_min_eig(solver_path: str, timeout: float = 600.0, fallback: bool = False) -> Callable[[SdpProblem, int], MaxMinEigResult]:
    """A drop-in replacement for the internal max-min-eigenvalue solver.

    With ``fallback`` a configuration or solver failure is logged and the
    internal solver is used instead.
    """
    resolve_executable(solver_path)

    def solve(prob: SdpProblem, bits: int) -> MaxMinEigResult:
        prob.check_consistent()
        try:
            g = external_gram(prob, solver_path, timeout)
        except (ConfigError, SolverError) as e:
            if not fallback:
                raise
            log.warning("external solver failed (%s); using the internal solver", e)
            return solve_max_min_eig(prob, bits)
        min_eig = float(np.linalg.eigvalsh(g)[0])
        if bits > 53:
            with mpmath.workprec(bits + 32):
                g = np.array([[mpmath.mpf(float(v)) for v in row] for row in g], dtype=object)
        return MaxMinEigResult(g, min_eig, None)

    return solve


def make_solver(choice: Optional[str], timeout: float = 600.0, fallback: bool = False):
    """``None``/"internal" -> None (internal solver); "sdpa:PATH" -> external client."""
    if choice is None or choice == "internal":
        return None
    if choice.startswith("sdpa:") and len(choice) > 5:
        try:
            return external_max_min_eig(choice[5:], timeout, fallback)
        except ConfigError:
            if fallback:
                log.warning("solver %s not found; using the internal solver", choice[5:])
                return None
            raise
    raise ConfigError(f"unknown solver {choice!r}; expected 'internal' or 'sdpa:PATH'")
