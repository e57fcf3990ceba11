"""Mode dispatch: pick the univariate or multivariate pipeline and return a certificate."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .certificate import Certificate, verify_exact
from .errors import BudgetExhausted, ConfigError, NotNonNegative, NotStrictlyPositive
from .multivsos import MultiCertParams, multivsos
from .poly import MPoly
from .univsos import steps_to_certificate, univsos1, univsos2

log = logging.getLogger(__name__)

MODES = ("auto", "univsos1", "univsos2", "multivsos")


@dataclass(frozen=True)
class CertifyConfig:
    mode: str = "auto"
    epsilon_init: Fraction = Fraction(1)
    precision_bits: int = 53
    seed: int = 0
    strategy: str = "cholesky"
    max_epsilon_halvings: int = 20
    max_precision_escalations: int = 2
    solver: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if not Fraction(self.epsilon_init) > 0:
            raise ConfigError("epsilon must be positive")
        if self.precision_bits < 1:
            raise ConfigError("precision must be a positive number of bits")

    def multi_params(self) -> MultiCertParams:
        return MultiCertParams(
            epsilon_init=Fraction(self.epsilon_init),
            precision_bits_init=self.precision_bits,
            max_epsilon_halvings=self.max_epsilon_halvings,
            max_precision_escalations=self.max_precision_escalations,
            strategy=self.strategy,
            seed=self.seed,
            solver=self.solver,
        )


def _univariate(f: MPoly, names: Sequence[str], mode: str, config: CertifyConfig) -> Certificate:
    if f.nvars != 1:
        raise ConfigError(f"mode {mode} needs a univariate polynomial, got {f.nvars} variables")
    u = f.to_upoly()
    if mode == "univsos1":
        return steps_to_certificate(u, univsos1(u), "univsos1", names[0])
    steps = univsos2(u, epsilon_init=Fraction(config.epsilon_init), precision_bits=config.precision_bits)
    return steps_to_certificate(u, steps, "univsos2", names[0])


def certify(f: MPoly, variables: Optional[Sequence[str]] = None, config: CertifyConfig = CertifyConfig()) -> Certificate:
    """Exactly verified certificate for f, or a CertificationError subclass.

    Auto mode sends univariate input to univsos2 and retries with univsos1
    when f has real roots (or the root-precision budget runs out).
    """
    names = tuple(variables) if variables is not None else (("X",) if f.nvars == 1 else tuple(f"X{i + 1}" for i in range(f.nvars)))
    if len(names) != f.nvars:
        raise ConfigError(f"{len(names)} variable names for a {f.nvars}-variable polynomial")
    mode = config.mode
    if mode == "auto":
        mode = "univsos2" if f.nvars == 1 else "multivsos"
        if mode == "univsos2":
            try:
                cert = _univariate(f, names, "univsos2", config)
            except NotNonNegative:
                raise
            except (NotStrictlyPositive, BudgetExhausted) as e:
                log.info("univsos2 failed (%s); falling back to univsos1", e)
                cert = _univariate(f, names, "univsos1", config)
            return _gate(cert)
    if mode == "multivsos":
        return _gate(multivsos(f, config.multi_params(), names))
    return _gate(_univariate(f, names, mode, config))


def _gate(cert: Certificate) -> Certificate:
    res = verify_exact(cert)
    if not res.verified:
        raise AssertionError(f"refusing to return an unverified certificate (diff {res.diff})")
    return cert
