"""Benchmark suites: the worked quartic examples and random polynomials inside the SOS cone."""

from __future__ import annotations

import itertools
import json
import random
import re
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .certificate import bit_size, verify_exact
from .certify import CertifyConfig, certify
from .errors import BudgetExhausted, ConfigError, NotNonNegative, RatSosError
from .newton import newton_half_support
from .parse import parse_poly_with_vars
from .poly import Monomial, MPoly

QUARTIC = "1+X+X^2+X^3+X^4"
BIVARIATE_QUARTIC = "4*X1^4 + 4*X1^3*X2 - 7*X1^2*X2^2 - 2*X1*X2^3 + 10*X2^4"


@dataclass(frozen=True)
class Instance:
    name: str
    poly: MPoly
    variables: Tuple[str, ...]
    mode: str = "auto"


@dataclass
class BenchRow:
    name: str
    nvars: int
    degree: int
    mode: str
    success: bool
    tau: Optional[int]
    seconds: float
    status: str


def _monomial(n: int, a: Monomial, c=1) -> MPoly:
    return MPoly(n, {a: Fraction(c)})


def random_sos(n: int, d: int, rng: random.Random) -> MPoly:
    """sum_i q_i^2 + 1/4 sum_{alpha in Q} X^(2 alpha) of degree d (even), q_i supported in Q.

    Q is the half Newton polytope of sum_{alpha in S} X^(2 alpha) for a random
    monomial set S, so f lies in the interior of the SOS cone over its own
    half Newton polytope.
    """
    if d < 2 or d % 2:
        raise ConfigError(f"random-sos degree must be even and at least 2, got {d}")
    k = d // 2
    monos = [a for a in itertools.product(range(k + 1), repeat=n) if sum(a) <= k]
    top = [a for a in monos if sum(a) == k]
    size = rng.randint(1, min(len(monos), n + 2))
    chosen = {rng.choice(top)} | set(rng.sample(monos, size))
    shape = MPoly(n, {tuple(2 * x for x in a): Fraction(1) for a in chosen})
    Q = newton_half_support(shape).points
    f = MPoly(n, {tuple(2 * x for x in a): Fraction(1, 4) for a in Q})
    for _ in range(rng.randint(1, min(4, len(Q)))):
        terms = {}
        for a in rng.sample(Q, rng.randint(1, min(len(Q), 4))):
            terms[a] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
        q = MPoly(n, terms)
        f = f + q * q
    return f


def _names(n: int) -> Tuple[str, ...]:
    return ("X",) if n == 1 else tuple(f"X{i + 1}" for i in range(n))


def worked_examples() -> List[Instance]:
    u, uv = parse_poly_with_vars(QUARTIC)
    b, bv = parse_poly_with_vars(BIVARIATE_QUARTIC)
    return [
        Instance("quartic-univsos1", u, uv, "univsos1"),
        Instance("quartic-univsos2", u, uv, "univsos2"),
        Instance("bivariate-quartic", b, bv, "multivsos"),
    ]


def random_suite(n: int, d: int, count: int, seed: int = 0) -> List[Instance]:
    out = []
    for i in range(count):
        rng = random.Random(f"random-sos:{seed}:{n}:{d}:{i}")
        out.append(Instance(f"random-sos-n{n}-d{d}-{i}", random_sos(n, d, rng), _names(n)))
    return out


_RANDOM = re.compile(r"^random-sos\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")


def parse_suite(suite: str, seed: int = 0) -> List[Instance]:
    suite = suite.strip()
    if suite == "paper-examples":
        return worked_examples()
    mt = _RANDOM.match(suite)
    if mt:
        n, d, count = (int(g) for g in mt.groups())
        if n < 1:
            raise ConfigError("random-sos needs at least one variable")
        return random_suite(n, d, count, seed)
    raise ConfigError(f"unknown suite {suite!r}; expected paper-examples or random-sos(n,d,count)")


def run_instance(inst: Instance, config: CertifyConfig = CertifyConfig()) -> BenchRow:
    cfg = CertifyConfig(**{**{k: getattr(config, k) for k in config.__dataclass_fields__}, "mode": inst.mode})
    t0 = time.perf_counter()
    tau: Optional[int] = None
    try:
        cert = certify(inst.poly, inst.variables, cfg)
        ok = verify_exact(cert).verified
        tau = bit_size(cert).tau
        status = "verified" if ok else "verification failed"
    except NotNonNegative as e:
        ok, status = False, f"negative at {e.witness}"
    except BudgetExhausted as e:
        ok, status = False, f"budget exhausted: {e}"
    except RatSosError as e:
        ok, status = False, f"{type(e).__name__}: {e}"
    dt = time.perf_counter() - t0
    return BenchRow(inst.name, inst.poly.nvars, inst.poly.degree, cfg.mode, ok, tau, dt, status)


def run_bench(instances: Sequence[Instance], config: CertifyConfig = CertifyConfig()) -> List[BenchRow]:
    return [run_instance(inst, config) for inst in instances]


COLUMNS = ("name", "nvars", "degree", "mode", "success", "tau", "seconds", "status")


def to_tsv(rows: Sequence[BenchRow]) -> str:
    lines = ["\t".join(COLUMNS)]
    for r in rows:
        cells = [r.name, str(r.nvars), str(r.degree), r.mode, str(r.success).lower(),
                 "" if r.tau is None else str(r.tau), f"{r.seconds:.4f}", r.status.replace("\t", " ").replace("\n", " ")]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def to_json(rows: Sequence[BenchRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"
