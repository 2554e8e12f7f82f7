"""Detection procedures over computed neighbor-rank profiles.

Three findings are supported, each a pure function of a run plus a rule:

* outliers: records whose near neighbors predominantly carry a different
  output, i.e. F_EU at the window end reaches the rule threshold;
* isolated records: records whose window contains any rank beyond the input
  threshold (UE or UU appears), reported with the rank where that starts;
* local groups of identical output: records whose F_EE stays within a small
  tolerance of the main diagonal over the group-size window.

A requirements file turns detector outputs into a pass/fail gate, e.g. for
CI pipelines: each line states a detector, its parameters, and a bound on
the finding count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import EcsRun, PairClass

__all__ = [
    "OutlierRule",
    "IsolationRule",
    "GroupRule",
    "Finding",
    "DetectionReport",
    "Requirement",
    "RequirementCheck",
    "RequirementsVerdict",
    "detect_outliers",
    "detect_isolated",
    "detect_groups",
    "fulfillment_histogram",
    "default_buckets",
    "parse_requirements",
    "check_requirements",
    "run_requirement_detectors",
]


@dataclass(frozen=True)
class OutlierRule:
    """Finding when F_EU(window) >= min_eu."""

    window: int
    min_eu: int

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if not 1 <= self.min_eu <= self.window:
            raise ValueError(f"min_eu must lie in 1..window, got {self.min_eu}")

    def to_dict(self) -> dict:
        return {"window": self.window, "min_eu": self.min_eu}


@dataclass(frozen=True)
class IsolationRule:
    """Finding when fewer than ``window`` neighbors lie within the input
    threshold, i.e. a UE or UU rank appears inside the window."""

    window: int

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")

    def to_dict(self) -> dict:
        return {"window": self.window}


@dataclass(frozen=True)
class GroupRule:
    """Finding when F_EE(group_size) >= group_size - tolerance."""

    group_size: int
    tolerance: int

    def __post_init__(self) -> None:
        if self.group_size < 1:
            raise ValueError(f"group_size must be >= 1, got {self.group_size}")
        if not 0 <= self.tolerance < self.group_size:
            raise ValueError(
                f"tolerance must lie in 0..group_size-1, got {self.tolerance}"
            )

    def to_dict(self) -> dict:
        return {"group_size": self.group_size, "tolerance": self.tolerance}


@dataclass(frozen=True)
class Finding:
    id: int
    score: int
    onset: Optional[int] = None  # 1-based rank, isolation only

    def to_dict(self) -> dict:
        d = {"id": self.id, "score": self.score}
        if self.onset is not None:
            d["onset"] = self.onset
        return d


@dataclass
class DetectionReport:
    """Findings plus the rule they were derived from.

    ``findings`` is the primary list (for isolation: the UE/UU union);
    ``sections`` carries named sub-lists where the detector produces several
    (isolation keeps its UE and UU lists). Findings are sorted by descending
    score, ties by ascending id.
    """

    detector: str
    rule: dict
    findings: list
    sections: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)

    def ids(self, section: Optional[str] = None) -> np.ndarray:
        src = self.findings if section is None else self.sections[section]
        return np.asarray(sorted(f.id for f in src), dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "detector": self.detector,
            "rule": self.rule,
            "counts": self.counts,
            "findings": [f.to_dict() for f in self.findings],
            "sections": {
                name: [f.to_dict() for f in fs] for name, fs in self.sections.items()
            },
        }


def _sorted_findings(findings: list) -> list:
    return sorted(findings, key=lambda f: (-f.score, f.id))


def detect_outliers(run: EcsRun, rule: OutlierRule) -> DetectionReport:
    """Records whose window end has at least ``min_eu`` EU ranks."""
    scores = run.counts_at(PairClass.EU, rule.window)
    ids = np.flatnonzero(scores >= rule.min_eu)
    findings = _sorted_findings([Finding(int(i), int(scores[i])) for i in ids])
    return DetectionReport(
        detector="outliers",
        rule=rule.to_dict(),
        findings=findings,
        counts={"findings": len(findings), "records": run.n},
    )


def _onset_findings(run: EcsRun, window: int, member: np.ndarray) -> list:
    """Findings for anchors with any ``member``-class rank inside the window.

    Onset is the first such rank (1-based); the score counts how many of the
    window's ranks are not input-close neighbors seen before the onset.
    """
    hit = member[:, :window]
    has = hit.any(axis=1)
    findings = []
    for i in np.flatnonzero(has):
        onset = int(np.argmax(hit[i])) + 1
        codes_before = run.class_codes[i, : onset - 1]
        within_before = int(np.count_nonzero(codes_before < 2))  # EE or EU ranks
        findings.append(Finding(int(i), score=window - within_before, onset=onset))
    return _sorted_findings(findings)


def detect_isolated(run: EcsRun, rule: IsolationRule) -> DetectionReport:
    """Records with fewer than ``window`` input-close neighbors.

    Ranks are ordered by ascending input distance, so all ranks from the
    first UE-or-UU onward lie beyond the input threshold; a record is
    isolated under the rule iff such a rank exists inside the window. The
    UE-based and UU-based lists are kept separately, ``findings`` is their
    union with the earliest onset of either kind.
    """
    codes = run.class_codes
    run._check_window(rule.window)
    ue = _onset_findings(run, rule.window, codes == int(PairClass.UE))
    uu = _onset_findings(run, rule.window, codes == int(PairClass.UU))
    merged = _onset_findings(run, rule.window, codes >= 2)
    return DetectionReport(
        detector="isolated",
        rule=rule.to_dict(),
        findings=merged,
        sections={"UE": ue, "UU": uu},
        counts={
            "findings": len(merged),
            "UE": len(ue),
            "UU": len(uu),
            "records": run.n,
        },
    )


def detect_groups(run: EcsRun, rule: GroupRule) -> DetectionReport:
    """Records sitting in a local group of identical output of at least
    ``group_size`` members, allowing ``tolerance`` deviating ranks."""
    scores = run.counts_at(PairClass.EE, rule.group_size)
    ids = np.flatnonzero(scores >= rule.group_size - rule.tolerance)
    findings = _sorted_findings([Finding(int(i), int(scores[i])) for i in ids])
    return DetectionReport(
        detector="groups",
        rule=rule.to_dict(),
        findings=findings,
        counts={"findings": len(findings), "records": run.n},
    )


def default_buckets(window: int) -> list:
    """Default fulfillment buckets: a partition of 0..window.

    For windows from 20 up: 0 alone, then 1..5%, ..25%, ..50%, ..100% of the
    window (for window 200: 0, 1-10, 11-50, 51-100, 101-200). Small windows
    get one bucket per value.
    """
    if window < 20:
        return [(v, v) for v in range(window + 1)]
    edges = [0, window // 20, window // 4, window // 2, window]
    buckets = [(0, 0)]
    lo = 1
    for hi in edges[1:]:
        buckets.append((lo, hi))
        lo = hi + 1
    return buckets


def fulfillment_histogram(
    run: EcsRun,
    set_: PairClass,
    window: int,
    buckets: Optional[Sequence] = None,
) -> list:
    """Tabulate F_set(window) over all records into (lo, hi) buckets."""
    values = run.counts_at(set_, window)
    if buckets is None:
        buckets = default_buckets(window)
    out = []
    for lo, hi in buckets:
        out.append(((lo, hi), int(np.count_nonzero((values >= lo) & (values <= hi)))))
    return out


# ---------------------------------------------------------------------------
# requirements gate

_DETECTOR_PARAM_ALIASES = {
    "outliers": {"K": "window", "k": "window", "t": "min_eu",
                 "window": "window", "min_eu": "min_eu"},
    "isolated": {"m": "window", "window": "window"},
    "groups": {"g": "group_size", "size": "group_size", "group_size": "group_size",
               "tol": "tolerance", "tolerance": "tolerance"},
}

_RULE_TYPES = {"outliers": OutlierRule, "isolated": IsolationRule, "groups": GroupRule}


def normalize_rule_params(detector: str, params: dict) -> dict:
    """Resolve parameter aliases (K/t, m, g/tol) to canonical names."""
    if detector not in _DETECTOR_PARAM_ALIASES:
        valid = ", ".join(sorted(_DETECTOR_PARAM_ALIASES))
        raise ValueError(f"unknown detector {detector!r} (valid: {valid})")
    aliases = _DETECTOR_PARAM_ALIASES[detector]
    out = {}
    for key, value in params.items():
        if key not in aliases:
            raise ValueError(f"unknown parameter {key!r} for detector {detector!r}")
        canonical = aliases[key]
        if canonical in out and out[canonical] != value:
            raise ValueError(f"conflicting values for parameter {canonical!r}")
        out[canonical] = int(value)
    return out


def build_rule(detector: str, params: dict):
    normalized = normalize_rule_params(detector, params)  # validates the name too
    return _RULE_TYPES[detector](**normalized)


@dataclass(frozen=True)
class Requirement:
    """A bound on one detector's finding count.

    ``key`` selects which count is bounded: the primary findings list, or for
    isolation one of its UE / UU sections.
    """

    detector: str
    params: dict
    op: str  # "max" | "min"
    bound: int
    key: str = "findings"

    def describe(self) -> str:
        ps = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        sel = "" if self.key == "findings" else f" [{self.key}]"
        return f"{self.detector} {ps}{sel} {self.op}={self.bound}"


@dataclass(frozen=True)
class RequirementCheck:
    requirement: Requirement
    observed: int
    ok: bool

    def to_dict(self) -> dict:
        return {
            "requirement": self.requirement.describe(),
            "detector": self.requirement.detector,
            "params": self.requirement.params,
            "key": self.requirement.key,
            "bound": {self.requirement.op: self.requirement.bound},
            "observed": self.observed,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class RequirementsVerdict:
    passed: bool
    checks: tuple

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def parse_requirements(text: str) -> list:
    """Parse the requirements file format, one requirement per line:

        <detector> <param>=<value> ... [list=UE|UU|merged] <max|min>=<bound>

    ``#`` starts a comment. Example::

        outliers window=200 min_eu=181 max=1000
        isolated m=200 list=UE max=0
        groups g=100 tol=5 min=500
    """
    requirements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        detector = tokens[0]
        params: dict = {}
        key = "findings"
        op = None
        bound = None
        try:
            for token in tokens[1:]:
                name, _, value = token.partition("=")
                if not value:
                    raise ValueError(f"expected name=value, got {token!r}")
                if name in ("max", "min"):
                    if op is not None:
                        raise ValueError("only one bound per requirement")
                    op, bound = name, int(value)
                elif name == "list":
                    if value not in ("UE", "UU", "merged"):
                        raise ValueError(f"list must be UE, UU or merged, got {value!r}")
                    key = "findings" if value == "merged" else value
                else:
                    params[name] = int(value)
            if op is None:
                raise ValueError("missing max=/min= bound")
            params = normalize_rule_params(detector, params)
            build_rule(detector, params)  # validate early
        except ValueError as exc:
            raise ValueError(f"requirements line {lineno}: {exc}") from None
        requirements.append(Requirement(detector=detector, params=params, op=op,
                                        bound=bound, key=key))
    return requirements


def _report_key(detector: str, rule: dict) -> tuple:
    return (detector, tuple(sorted(rule.items())))


def run_requirement_detectors(run: EcsRun, requirements: Sequence) -> list:
    """Produce one report per distinct (detector, params) in ``requirements``."""
    dispatch = {"outliers": detect_outliers, "isolated": detect_isolated,
                "groups": detect_groups}
    reports = {}
    for req in requirements:
        key = _report_key(req.detector, req.params)
        if key not in reports:
            reports[key] = dispatch[req.detector](run, build_rule(req.detector, req.params))
    return list(reports.values())


def check_requirements(reports: Sequence, requirements: Sequence) -> RequirementsVerdict:
    """Check declarative bounds against produced reports.

    Every requirement must reference a report produced with exactly its
    detector and parameters; a missing report is an error, not a failure.
    """
    by_key = {_report_key(r.detector, r.rule): r for r in reports}
    checks = []
    for req in requirements:
        report = by_key.get(_report_key(req.detector, req.params))
        if report is None:
            raise ValueError(f"no report matches requirement: {req.describe()}")
        observed = report.counts["findings"] if req.key == "findings" else report.counts[req.key]
        ok = observed <= req.bound if req.op == "max" else observed >= req.bound
        checks.append(RequirementCheck(requirement=req, observed=observed, ok=ok))
    return RequirementsVerdict(passed=all(c.ok for c in checks), checks=tuple(checks))
