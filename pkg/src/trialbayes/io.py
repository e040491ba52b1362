"""Dataset ingestion, report rendering and chart emission.

Bundles the aducanumab CDR-SB summary dataset, parses user-supplied CSV or
JSON study files, runs the full reanalysis (per-study Bayes factors plus
meta-analytic pooling), and renders results as a text table, JSON, or a
pair of deterministic SVG charts.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import math
from dataclasses import dataclass
from importlib import resources

from . import __version__
from .engine import (
    ONE_SAMPLE,
    TWO_SAMPLE_EQUAL_ARMS,
    AnalysisConfig,
    BayesFactorResult,
    StudyRecord,
    analyze_study,
)
from .meta import MetaInput, MetaResult, meta_bf
from .numerics import DomainError

__all__ = [
    "DatasetError",
    "Dataset",
    "Report",
    "parse_dataset",
    "render_dataset",
    "load_bundled_dataset",
    "run_reanalysis",
    "report_to_dict",
    "render_report",
    "emit_charts",
    "ADUCANUMAB_META_GROUPS",
]

CSV_COLUMNS = ("trial", "arm", "n", "p", "t", "design")

# CSV/JSON design spellings -> StudyRecord designs.
_DESIGNS = {
    "two_sample": TWO_SAMPLE_EQUAL_ARMS,
    "two_sample_equal_arms": TWO_SAMPLE_EQUAL_ARMS,
    "one_sample": ONE_SAMPLE,
}
_DESIGN_NAMES = {TWO_SAMPLE_EQUAL_ARMS: "two_sample", ONE_SAMPLE: "one_sample"}

# Pooling used by the aducanumab reanalysis: by dose across the two trials.
ADUCANUMAB_META_GROUPS = {
    "low": (("EMERGE", "low"), ("ENGAGE", "low")),
    "high": (("EMERGE", "high"), ("ENGAGE", "high")),
}


class DatasetError(ValueError):
    """Malformed or invalid study dataset."""


@dataclass(frozen=True)
class Dataset:
    name: str
    records: tuple[StudyRecord, ...]

    def __post_init__(self):
        if not self.records:
            raise DatasetError("dataset has no records")
        object.__setattr__(self, "records", tuple(self.records))
        keys = [(r.trial, r.arm) for r in self.records]
        if len(set(keys)) != len(keys):
            raise DatasetError("duplicate (trial, arm) pairs in dataset")

    def find(self, trial: str, arm: str) -> StudyRecord:
        for record in self.records:
            if record.trial == trial and record.arm == arm:
                return record
        raise DatasetError(f"no record for ({trial}, {arm})")


@dataclass(frozen=True)
class StudyResult:
    record: StudyRecord
    result: BayesFactorResult


@dataclass(frozen=True)
class MetaGroupResult:
    group: str
    members: tuple[tuple[str, str], ...]
    result: MetaResult


@dataclass(frozen=True)
class Report:
    dataset_name: str
    config: AnalysisConfig
    studies: tuple[StudyResult, ...]
    meta: tuple[MetaGroupResult, ...]
    version: str


def _record_from_row(row: dict, where: str) -> StudyRecord:
    design_name = (row.get("design") or "two_sample").strip()
    if design_name not in _DESIGNS:
        raise DatasetError(f"{where}: unknown design {design_name!r}")
    p_raw, t_raw = row.get("p"), row.get("t")
    has_p = p_raw is not None and str(p_raw).strip() != ""
    has_t = t_raw is not None and str(t_raw).strip() != ""
    if has_p == has_t:
        raise DatasetError(f"{where}: exactly one of p and t must be present")
    try:
        n = int(str(row["n"]).strip())
    except (KeyError, ValueError) as exc:
        raise DatasetError(f"{where}: bad sample size {row.get('n')!r}") from exc
    try:
        p = float(p_raw) if has_p else None
        t = float(t_raw) if has_t else None
    except ValueError as exc:
        raise DatasetError(f"{where}: non-numeric p/t value") from exc
    if p is not None and not 0.0 < p < 1.0:
        raise DatasetError(f"{where}: p out of range: {p}")
    try:
        return StudyRecord(
            trial=str(row["trial"]).strip(),
            arm=str(row["arm"]).strip(),
            n=n,
            p_value=p,
            t_value=t,
            design=_DESIGNS[design_name],
        )
    except DomainError as exc:
        raise DatasetError(f"{where}: {exc}") from exc


def parse_dataset(data: bytes | str, format: str = "csv", name: str = "dataset") -> Dataset:
    """Parse and validate a study dataset from CSV or JSON bytes."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if format == "csv":
        reader = csv.reader(_stdio.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty CSV input") from None
        header = [h.strip() for h in header]
        if tuple(header) != CSV_COLUMNS:
            raise DatasetError(
                f"CSV header must be {','.join(CSV_COLUMNS)}, got {','.join(header)}"
            )
        records = []
        for line_no, cells in enumerate(reader, start=2):
            if not cells or all(c.strip() == "" for c in cells):
                continue
            if len(cells) != len(CSV_COLUMNS):
                raise DatasetError(f"row {line_no}: expected {len(CSV_COLUMNS)} columns")
            row = dict(zip(CSV_COLUMNS, cells))
            records.append(_record_from_row(row, f"row {line_no}"))
        return Dataset(name=name, records=tuple(records))
    if format == "json":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON: {exc}") from exc
        if not isinstance(payload, dict) or "records" not in payload:
            raise DatasetError("JSON dataset must be an object with a 'records' array")
        records = [
            _record_from_row(row, f"records[{i}]")
            for i, row in enumerate(payload["records"])
        ]
        return Dataset(name=str(payload.get("name", name)), records=tuple(records))
    raise DatasetError(f"unknown dataset format {format!r}")


def render_dataset(dataset: Dataset, format: str = "csv") -> bytes:
    """Serialize a dataset; parse_dataset(render_dataset(d)) == d."""
    if format == "csv":
        buf = _stdio.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in dataset.records:
            writer.writerow([
                r.trial,
                r.arm,
                r.n,
                "" if r.p_value is None else repr(r.p_value),
                "" if r.t_value is None else repr(r.t_value),
                _DESIGN_NAMES[r.design],
            ])
        return buf.getvalue().encode("utf-8")
    if format == "json":
        payload = {
            "name": dataset.name,
            "records": [
                {
                    "trial": r.trial,
                    "arm": r.arm,
                    "n": r.n,
                    "p": r.p_value,
                    "t": r.t_value,
                    "design": _DESIGN_NAMES[r.design],
                }
                for r in dataset.records
            ],
        }
        return json.dumps(payload, indent=2).encode("utf-8")
    raise DatasetError(f"unknown dataset format {format!r}")


def load_bundled_dataset() -> Dataset:
    """The EMERGE/ENGAGE CDR-SB summary statistics shipped with the package."""
    data = resources.files("trialbayes").joinpath("data/aducanumab.csv").read_bytes()
    return parse_dataset(data, "csv", name="aducanumab")


def _normalize_groups(dataset, meta_groups):
    normalized = {}
    for group, members in (meta_groups or {}).items():
        pairs = []
        for member in members:
            if isinstance(member, str):
                trial, sep, arm = member.partition(".")
                if not sep:
                    raise DatasetError(
                        f"meta group {group!r}: member {member!r} is not 'trial.arm'"
                    )
            else:
                trial, arm = member
            dataset.find(trial, arm)  # raises if missing
            pairs.append((trial, arm))
        if not pairs:
            raise DatasetError(f"meta group {group!r} is empty")
        normalized[group] = tuple(pairs)
    return normalized


def run_reanalysis(
    dataset: Dataset,
    config: AnalysisConfig = AnalysisConfig(),
    meta_groups: dict | None = None,
) -> Report:
    """Analyze every record, then pool each configured meta group."""
    groups = _normalize_groups(dataset, meta_groups)
    studies = []
    by_key = {}
    for record in dataset.records:
        try:
            result = analyze_study(record, config)
        except Exception as exc:
            raise type(exc)(f"{record.trial}/{record.arm}: {exc}") from exc
        studies.append(StudyResult(record=record, result=result))
        by_key[(record.trial, record.arm)] = result
    meta_results = []
    for group, members in groups.items():
        summaries = tuple(by_key[key].summary for key in members)
        result = meta_bf(MetaInput(studies=summaries, r=config.cauchy_scale_r),
                         prior_h1=config.prior_h1)
        meta_results.append(MetaGroupResult(group=group, members=members, result=result))
    return Report(
        dataset_name=dataset.name,
        config=config,
        studies=tuple(studies),
        meta=tuple(meta_results),
        version=__version__,
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _fmt_bf(x: float) -> str:
    return f"{x:.2f}"


def _fmt_pct(x: float) -> str:
    return f"{round(x * 100):d}%"


def report_to_dict(report: Report) -> dict:
    """Full-precision report payload with display strings, stable key order."""
    cfg = report.config
    return {
        "config": {
            "cauchy_scale_r": cfg.cauchy_scale_r,
            "prior_h1": cfg.prior_h1,
            "sidedness": cfg.sidedness,
            "rel_tol": cfg.rel_tol,
        },
        "studies": [
            {
                "trial": s.record.trial,
                "arm": s.record.arm,
                "n": s.record.n,
                "p": s.record.p_value,
                "t": s.result.summary.t,
                "bf10": s.result.bf10,
                "bf01": s.result.bf01,
                "posterior_h1": s.result.posterior_h1,
                "quadrature_error": s.result.quadrature_error,
                "label": {
                    "strength": s.result.label.strength,
                    "direction": s.result.label.direction,
                },
                "display": {
                    "bf10": _fmt_bf(s.result.bf10),
                    "posterior_h1": _fmt_pct(s.result.posterior_h1),
                },
            }
            for s in report.studies
        ],
        "meta": [
            {
                "group": m.group,
                "members": [f"{trial}.{arm}" for trial, arm in m.members],
                "bf10": m.result.bf10,
                "bf01": m.result.bf01,
                "posterior_h1": m.result.posterior_h1,
                "quadrature_error": m.result.quadrature_error,
                "display": {
                    "bf10": _fmt_bf(m.result.bf10),
                    "posterior_h1": _fmt_pct(m.result.posterior_h1),
                },
            }
            for m in report.meta
        ],
        "version": report.version,
    }


def render_report(report: Report, format: str = "text_table") -> bytes:
    """Render a report as a text table (2-dp BF, whole-percent posteriors)
    or as JSON carrying full-precision values plus the display strings."""
    if format == "json":
        return json.dumps(report_to_dict(report), indent=2).encode("utf-8")
    if format != "text_table":
        raise DatasetError(f"unknown report format {format!r}")

    lines = []
    cfg = report.config
    lines.append(f"Bayesian reanalysis of dataset '{report.dataset_name}'")
    lines.append(
        f"config: r = {cfg.cauchy_scale_r:.6f}, P(H1) = {cfg.prior_h1}, "
        f"{cfg.sidedness}"
    )
    lines.append("")
    header = f"{'trial':<10}{'arm':<8}{'n':>6}{'p':>8}{'t':>7}{'BF10':>8}{'BF01':>8}{'P(H1|D)':>9}  label"
    lines.append(header)
    lines.append("-" * len(header))
    for s in report.studies:
        r = s.result
        p_disp = "" if s.record.p_value is None else f"{s.record.p_value:g}"
        lines.append(
            f"{s.record.trial:<10}{s.record.arm:<8}{s.record.n:>6}{p_disp:>8}"
            f"{r.summary.t:>7.2f}{_fmt_bf(r.bf10):>8}{_fmt_bf(r.bf01):>8}"
            f"{_fmt_pct(r.posterior_h1):>9}  {r.label}"
        )
    if report.meta:
        lines.append("")
        lines.append("meta-analysis (common effect size, Cauchy prior):")
        for m in report.meta:
            members = " + ".join(f"{t}.{a}" for t, a in m.members)
            lines.append(
                f"  {m.group:<8} BF10 = {_fmt_bf(m.result.bf10)}  "
                f"P(H1|D) = {_fmt_pct(m.result.posterior_h1)}  [{members}]"
            )
    lines.append("")
    return "\n".join(lines).encode("utf-8")


# ---------------------------------------------------------------------------
# SVG charts
# ---------------------------------------------------------------------------

SVG_WIDTH = 640
SVG_HEIGHT = 400
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 20
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 60
_BAR_FILL = ("#4878a8", "#c44e52")


def _svg_header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{SVG_WIDTH / 2:.1f}" y="24" font-family="sans-serif" '
        f'font-size="16" text-anchor="middle">{title}</text>',
    ]


def _bar(x: float, y: float, w: float, h: float, fill: str) -> str:
    return (
        f'<rect class="bar" x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" '
        f'height="{h:.2f}" fill="{fill}"/>'
    )


def _text(x: float, y: float, s: str, size: int = 12, anchor: str = "middle") -> str:
    return (
        f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" '
        f'font-size="{size}" text-anchor="{anchor}">{s}</text>'
    )


def _bf_chart(report: Report) -> bytes:
    """Bar chart of BF10 per (trial, arm) on a log axis, reference at BF=1."""
    entries = [
        (f"{s.record.trial} {s.record.arm}", s.result.bf10, s.record.arm)
        for s in report.studies
    ]
    logs = [math.log10(v) for _, v, _ in entries] + [0.0]
    lo = min(logs) - 0.3
    hi = max(logs) + 0.3
    plot_w = SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def y_of(log_bf: float) -> float:
        return _MARGIN_TOP + (hi - log_bf) / (hi - lo) * plot_h

    parts = _svg_header("Bayes factors (BF10) by trial and dose")
    # log-scale gridlines at decades within range
    tick = math.ceil(lo)
    while tick <= hi:
        y = y_of(tick)
        parts.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{y:.2f}" x2="{SVG_WIDTH - _MARGIN_RIGHT}" '
            f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(_text(_MARGIN_LEFT - 8, y + 4, f"{10.0 ** tick:g}", 11, "end"))
        tick += 1
    y_ref = y_of(0.0)
    parts.append(
        f'<line class="bf-one" x1="{_MARGIN_LEFT}" y1="{y_ref:.2f}" '
        f'x2="{SVG_WIDTH - _MARGIN_RIGHT}" y2="{y_ref:.2f}" '
        f'stroke="#333333" stroke-width="1.5" stroke-dasharray="6,3"/>'
    )
    parts.append(_text(SVG_WIDTH - _MARGIN_RIGHT, y_ref - 5, "BF = 1", 11, "end"))

    n = len(entries)
    slot = plot_w / n
    bar_w = slot * 0.55
    y_base = _MARGIN_TOP + plot_h
    arms = sorted({arm for _, _, arm in entries})
    for i, (label, bf, arm) in enumerate(entries):
        x = _MARGIN_LEFT + slot * i + (slot - bar_w) / 2
        y_top = y_of(math.log10(bf))
        fill = _BAR_FILL[arms.index(arm) % len(_BAR_FILL)]
        parts.append(_bar(x, y_top, bar_w, y_base - y_top, fill))
        parts.append(_text(x + bar_w / 2, y_base + 16, label, 11))
        parts.append(_text(x + bar_w / 2, y_top - 5, _fmt_bf(bf), 11))
    parts.append(_text(16, _MARGIN_TOP + plot_h / 2, "BF10 (log scale)", 12, "middle"))
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")


def _posterior_chart(report: Report) -> bytes:
    """Bar chart of posterior P(H1|D) per condition plus meta-analysis bars."""
    entries = [
        (f"{s.record.trial} {s.record.arm}", s.result.posterior_h1, False)
        for s in report.studies
    ]
    entries += [
        (f"meta {m.group}", m.result.posterior_h1, True) for m in report.meta
    ]
    plot_w = SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM
    y_base = _MARGIN_TOP + plot_h

    def y_of(p: float) -> float:
        return y_base - p * plot_h

    parts = _svg_header("Posterior probability of efficacy P(H1|D)")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y_of(frac)
        parts.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{y:.2f}" x2="{SVG_WIDTH - _MARGIN_RIGHT}" '
            f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(_text(_MARGIN_LEFT - 8, y + 4, f"{frac * 100:.0f}%", 11, "end"))

    n = len(entries)
    slot = plot_w / n
    bar_w = slot * 0.55
    for i, (label, posterior, is_meta) in enumerate(entries):
        x = _MARGIN_LEFT + slot * i + (slot - bar_w) / 2
        y_top = y_of(posterior)
        fill = "#55a868" if is_meta else "#4878a8"
        parts.append(_bar(x, y_top, bar_w, y_base - y_top, fill))
        parts.append(_text(x + bar_w / 2, y_base + 16, label, 11))
        parts.append(_text(x + bar_w / 2, y_top - 5, _fmt_pct(posterior), 11))
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")


def emit_charts(report: Report) -> tuple[bytes, bytes]:
    """Two SVG 1.1 charts: Bayes factors and posterior probabilities.

    Output is byte-deterministic for identical reports.
    """
    return _bf_chart(report), _posterior_chart(report)
