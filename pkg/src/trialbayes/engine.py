"""Single-study evidence engine.

Turns a published (n, p) or (n, t) summary into a JZS Bayes factor, a
posterior probability, and a Jeffreys evidence label. The Bayes factor is
computed two mathematically equivalent ways (an integral over the prior
mixing variance g and an integral over the effect size delta) and the two
routes are cross-checked against each other on every analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .numerics import (
    LN_2PI,
    DomainError,
    Interval,
    cauchy_logpdf,
    central_t_pdf,
    integrate,
    noncentral_t_logpdf,
    student_t_quantile,
)

__all__ = [
    "TWO_SAMPLE_EQUAL_ARMS",
    "ONE_SAMPLE",
    "TWO_SIDED",
    "ONE_SIDED",
    "DEFAULT_CAUCHY_SCALE",
    "InternalConsistencyError",
    "StudyRecord",
    "TTestSummary",
    "AnalysisConfig",
    "EvidenceLabel",
    "BayesFactorResult",
    "t_from_p",
    "summarize",
    "jzs_bf_g_form",
    "jzs_bf_delta_form",
    "posterior_prob",
    "classify_evidence",
    "analyze_summary",
    "analyze_study",
]

TWO_SAMPLE_EQUAL_ARMS = "two_sample_equal_arms"
ONE_SAMPLE = "one_sample"
TWO_SIDED = "two_sided"
ONE_SIDED = "one_sided"

DEFAULT_CAUCHY_SCALE = math.sqrt(2.0) / 2.0

# Jeffreys bins on B = max(BF10, 1/BF10); half-open [lower, upper).
JEFFREYS_BINS = (
    (1.0, 3.0, "anecdotal"),
    (3.0, 10.0, "moderate"),
    (10.0, 30.0, "strong"),
    (30.0, 100.0, "very_strong"),
    (100.0, math.inf, "extreme"),
)


class InternalConsistencyError(RuntimeError):
    """The two Bayes factor computations disagree beyond tolerance."""


@dataclass(frozen=True)
class StudyRecord:
    """One trial arm's summary statistics as published."""

    trial: str
    arm: str
    n: int
    p_value: float | None = None
    t_value: float | None = None
    design: str = TWO_SAMPLE_EQUAL_ARMS

    def __post_init__(self):
        if (self.p_value is None) == (self.t_value is None):
            raise DomainError(
                f"study {self.trial}/{self.arm}: exactly one of p_value and "
                f"t_value must be given"
            )
        if not (isinstance(self.n, int) and self.n >= 2):
            raise DomainError(
                f"study {self.trial}/{self.arm}: n must be an integer >= 2, "
                f"got {self.n!r}"
            )
        if self.design not in (TWO_SAMPLE_EQUAL_ARMS, ONE_SAMPLE):
            raise DomainError(
                f"study {self.trial}/{self.arm}: unknown design {self.design!r}"
            )
        if self.p_value is not None and not 0.0 < self.p_value < 1.0:
            raise DomainError(
                f"study {self.trial}/{self.arm}: p out of range: {self.p_value}"
            )


@dataclass(frozen=True)
class TTestSummary:
    """Derived inferential quantities for one study.

    nu_inversion is the df used for the p -> t inversion (N - 1), nu_bf the
    df inside the Bayes factor (n1 + n2 - 2), n_eff the effective sample
    size n1*n2/(n1+n2) that scales the noncentrality.
    """

    t: float
    nu_inversion: float
    nu_bf: float
    n_eff: float

    def __post_init__(self):
        if not (self.nu_inversion > 0 and self.nu_bf > 0 and self.n_eff > 0):
            raise DomainError(f"invalid t-test summary: {self}")


@dataclass(frozen=True)
class AnalysisConfig:
    cauchy_scale_r: float = DEFAULT_CAUCHY_SCALE
    prior_h1: float = 0.5
    sidedness: str = TWO_SIDED
    rel_tol: float = 1e-8

    def __post_init__(self):
        if not self.cauchy_scale_r > 0:
            raise DomainError(f"cauchy_scale_r must be > 0, got {self.cauchy_scale_r}")
        if not 0.0 <= self.prior_h1 <= 1.0:
            raise DomainError(f"prior_h1 must be in [0, 1], got {self.prior_h1}")
        if self.sidedness not in (TWO_SIDED, ONE_SIDED):
            raise DomainError(f"unknown sidedness {self.sidedness!r}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")


@dataclass(frozen=True)
class EvidenceLabel:
    strength: str  # anecdotal | moderate | strong | very_strong | extreme
    direction: str  # favors_h1 | favors_h0 | exactly_even

    def __str__(self) -> str:
        if self.direction == "exactly_even":
            return "evidence exactly even"
        side = "H1" if self.direction == "favors_h1" else "H0"
        return f"{self.strength.replace('_', ' ')} evidence for {side}"


@dataclass(frozen=True)
class BayesFactorResult:
    bf10: float
    bf01: float
    ln_bf10: float
    quadrature_error: float
    posterior_h1: float
    label: EvidenceLabel
    summary: TTestSummary = field(repr=False, default=None)


def t_from_p(p: float, nu: float, sidedness: str = TWO_SIDED) -> float:
    """Recover the (nonnegative) t statistic from a published p-value."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if p <= 1e-300:
        raise OverflowError(f"p={p} is too small to invert without overflow")
    if sidedness == TWO_SIDED:
        q = 1.0 - p / 2.0
    elif sidedness == ONE_SIDED:
        q = 1.0 - p
    else:
        raise DomainError(f"unknown sidedness {sidedness!r}")
    return max(student_t_quantile(q, nu), 0.0)


def summarize(record: StudyRecord, config: AnalysisConfig = AnalysisConfig()) -> TTestSummary:
    """Derive t, degrees of freedom and effective sample size for a record.

    For the two-sample design the published n is read as the size of each
    arm (n1 = n2 = n), so nu_bf = 2n - 2 and n_eff = n/2, while the p -> t
    inversion uses nu = n - 1.
    """
    n = record.n
    if record.design == TWO_SAMPLE_EQUAL_ARMS:
        nu_inversion = float(n - 1)
        nu_bf = float(2 * n - 2)
        n_eff = n / 2.0
    else:
        nu_inversion = nu_bf = float(n - 1)
        n_eff = float(n)
    if record.t_value is not None:
        t = float(record.t_value)
    else:
        t = t_from_p(record.p_value, nu_inversion, config.sidedness)
    return TTestSummary(t=t, nu_inversion=nu_inversion, nu_bf=nu_bf, n_eff=n_eff)


def _jzs_g_integral(t: float, nu: float, n_eff: float, r: float, rel_tol: float):
    """Denominator of the g-form B01: marginal of the data under H1."""
    ln_r = math.log(r)
    half_r2 = 0.5 * r * r
    c = -0.5 * LN_2PI

    def integrand(g: float) -> float:
        if g <= 0.0:
            return 0.0
        shrink = 1.0 + n_eff * g
        ln = (
            -0.5 * math.log(shrink)
            - 0.5 * (nu + 1.0) * math.log1p(t * t / (shrink * nu))
            + c + ln_r
            - 1.5 * math.log(g)
            - half_r2 / g
        )
        return math.exp(ln)

    return integrate(integrand, Interval.half_line_positive(), rel_tol)


def jzs_bf_g_form(
    t: float,
    summary: TTestSummary,
    r: float = DEFAULT_CAUCHY_SCALE,
    rel_tol: float = 1e-8,
) -> float:
    """B01 via the JZS integral over the prior mixing variance g."""
    if not r > 0:
        raise DomainError(f"prior scale r must be > 0, got {r}")
    nu, n_eff = summary.nu_bf, summary.n_eff
    ln_null = -0.5 * (nu + 1.0) * math.log1p(t * t / nu)
    marginal = _jzs_g_integral(t, nu, n_eff, r, rel_tol)
    return math.exp(ln_null) / marginal.value


def _jzs_delta_integral(t: float, nu: float, n_eff: float, r: float, rel_tol: float):
    """Marginal density of t under H1: noncentral t mixed over Cauchy delta."""
    root_n = math.sqrt(n_eff)

    def integrand(delta: float) -> float:
        ln = noncentral_t_logpdf(t, nu, delta * root_n) + cauchy_logpdf(delta, r)
        return math.exp(ln)

    return integrate(integrand, Interval.real_line(), rel_tol)


def jzs_bf_delta_form(
    t: float,
    summary: TTestSummary,
    r: float = DEFAULT_CAUCHY_SCALE,
    rel_tol: float = 1e-8,
) -> float:
    """BF10 via the marginal-likelihood integral over the effect size delta."""
    if not r > 0:
        raise DomainError(f"prior scale r must be > 0, got {r}")
    nu, n_eff = summary.nu_bf, summary.n_eff
    marginal = _jzs_delta_integral(t, nu, n_eff, r, rel_tol)
    return marginal.value / central_t_pdf(t, nu)


def posterior_prob(bf10: float, prior_h1: float) -> float:
    """P(H1 | data) from the Bayes factor and the prior P(H1)."""
    if not bf10 > 0:
        raise DomainError(f"bf10 must be > 0, got {bf10}")
    if not 0.0 <= prior_h1 <= 1.0:
        raise DomainError(f"prior_h1 must be in [0, 1], got {prior_h1}")
    num = bf10 * prior_h1
    return num / (num + (1.0 - prior_h1))


def classify_evidence(bf10: float) -> EvidenceLabel:
    """Jeffreys evidence label for a Bayes factor."""
    if not bf10 > 0:
        raise DomainError(f"bf10 must be > 0, got {bf10}")
    if bf10 == 1.0:
        direction = "exactly_even"
    elif bf10 > 1.0:
        direction = "favors_h1"
    else:
        direction = "favors_h0"
    b = max(bf10, 1.0 / bf10)
    for lower, upper, name in JEFFREYS_BINS:
        if lower <= b < upper:
            return EvidenceLabel(strength=name, direction=direction)
    return EvidenceLabel(strength="extreme", direction=direction)


def analyze_summary(
    summary: TTestSummary,
    config: AnalysisConfig = AnalysisConfig(),
) -> BayesFactorResult:
    """Bayes factor pipeline for an already-derived t-test summary.

    The delta-form result is primary; the g-form serves as an independent
    cross-check and a relative disagreement above 1e-4 raises
    InternalConsistencyError.
    """
    r = config.cauchy_scale_r
    nu, n_eff = summary.nu_bf, summary.n_eff

    marginal = _jzs_delta_integral(summary.t, nu, n_eff, r, config.rel_tol)
    null_density = central_t_pdf(summary.t, nu)
    bf10 = marginal.value / null_density

    bf01_check = jzs_bf_g_form(summary.t, summary, r, config.rel_tol)
    if abs(bf10 * bf01_check - 1.0) > 1e-4:
        raise InternalConsistencyError(
            f"g-form and delta-form Bayes factors disagree: "
            f"BF10={bf10!r}, 1/BF01={1.0 / bf01_check!r}"
        )

    return BayesFactorResult(
        bf10=bf10,
        bf01=1.0 / bf10,
        ln_bf10=math.log(bf10),
        quadrature_error=marginal.abs_error_estimate / null_density,
        posterior_h1=posterior_prob(bf10, config.prior_h1),
        label=classify_evidence(bf10),
        summary=summary,
    )


def analyze_study(
    record: StudyRecord,
    config: AnalysisConfig = AnalysisConfig(),
) -> BayesFactorResult:
    """Full pipeline for a study record: summarize then analyze_summary."""
    return analyze_summary(summarize(record, config), config)
