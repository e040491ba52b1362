"""Meta-analytic Bayes factor for a common effect size across studies.

Compares delta = 0 against a single shared standardized effect delta with a
Cauchy prior, using products of (non)central t densities over the M input
studies. Per-study density products are accumulated in log space so large M
cannot underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import DEFAULT_CAUCHY_SCALE, TTestSummary, posterior_prob
from .numerics import (
    DomainError,
    Interval,
    cauchy_logpdf,
    central_t_logpdf,
    integrate,
    noncentral_t_logpdf,
)

__all__ = ["MetaInput", "MetaResult", "meta_bf"]

REAL_LINE = "real_line"
ONE_SIDED_POSITIVE = "one_sided_positive"


@dataclass(frozen=True)
class MetaInput:
    studies: tuple[TTestSummary, ...]
    r: float = DEFAULT_CAUCHY_SCALE

    def __post_init__(self):
        if len(self.studies) < 1:
            raise DomainError("meta-analysis requires at least one study")
        if not self.r > 0:
            raise DomainError(f"prior scale r must be > 0, got {self.r}")
        object.__setattr__(self, "studies", tuple(self.studies))


@dataclass(frozen=True)
class MetaResult:
    bf10: float
    bf01: float
    posterior_h1: float
    quadrature_error: float


def meta_bf(
    data: MetaInput,
    prior_h1: float = 0.5,
    delta_support: str = REAL_LINE,
) -> MetaResult:
    """Combined Bayes factor across the input studies.

    The shared effect size is integrated over the full real line (two-sided
    Cauchy prior) by default; delta_support="one_sided_positive" restricts
    it to delta > 0 with a half-Cauchy prior instead.
    """
    if delta_support not in (REAL_LINE, ONE_SIDED_POSITIVE):
        raise DomainError(f"unknown delta support {delta_support!r}")

    studies = [(s.t, s.nu_bf, math.sqrt(s.n_eff)) for s in data.studies]
    ln_null = sum(central_t_logpdf(t, nu) for t, nu, _ in studies)
    r = data.r
    # Half-Cauchy doubles the density to stay normalized on delta > 0.
    ln_fold = math.log(2.0) if delta_support == ONE_SIDED_POSITIVE else 0.0

    def integrand(delta: float) -> float:
        ln = cauchy_logpdf(delta, r) + ln_fold - ln_null
        for t, nu, root_n in studies:
            ln += noncentral_t_logpdf(t, nu, delta * root_n)
        return math.exp(ln)

    domain = (
        Interval.real_line()
        if delta_support == REAL_LINE
        else Interval.half_line_positive()
    )
    marginal = integrate(integrand, domain, 1e-8)
    bf10 = marginal.value
    return MetaResult(
        bf10=bf10,
        bf01=1.0 / bf10,
        posterior_h1=posterior_prob(bf10, prior_h1),
        quadrature_error=marginal.abs_error_estimate,
    )
