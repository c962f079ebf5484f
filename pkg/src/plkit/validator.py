"""Model validity battery: structure, contradiction patterns, satisfiability,
and solver-backed anomaly detection.

Pattern checks give precise element-level blame; the solver checks complete
them (a pattern-level finding is always confirmed by the solver level).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .compiler import compile_model
from .model import FeatureModel, structural_issues
from .solver import Unsat, first_solution, is_consistent

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    subject: tuple
    message: str

    def line(self) -> str:
        subjects = " ".join(self.subject)
        head = f"{self.severity.upper()} {self.code}"
        if subjects:
            head += f" {subjects}"
        return f"{head} : {self.message}"

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "subject": list(self.subject),
            "message": self.message,
        }


@dataclass(frozen=True)
class SatisfiabilityResult:
    diagnostic: Optional[Diagnostic]
    witness: Optional[frozenset]

    @property
    def ok(self) -> bool:
        return self.diagnostic is None


def check_structure(model) -> list:
    """Structural diagnostics on raw (possibly invalid) model data: cycles,
    isolated features, duplicate or out-of-range group cardinalities, and
    reference integrity. Accepts a draft or a built model; an empty list
    means structurally valid."""
    return [Diagnostic(ERROR, issue.code, issue.subjects, issue.message)
            for issue in structural_issues(model)]


def _ancestors(model: FeatureModel, fid: str) -> frozenset:
    seen = set()
    current = model.parent_of(fid)
    while current is not None and current not in seen:
        seen.add(current)
        current = model.parent_of(current)
    return frozenset(seen)


def check_contradictions(model: FeatureModel) -> list:
    """Pattern scan for contradictory dependencies: requires+mutex on one
    pair, mutex between always-selected features, an optional feature
    required by an always-selected one, and redundant requires edges."""
    diagnostics = []
    mandatory = model.mandatory_path_features()
    mutex_pairs = {c.pair() for c in model.constraints if c.kind == "mutex"}
    for c in model.constraints:
        if c.kind == "requires":
            if c.pair() in mutex_pairs:
                diagnostics.append(Diagnostic(
                    ERROR, "CONTRA_REQ_MUTEX", (c.a, c.b),
                    f"requires {c.a} {c.b} contradicts mutex between the same features"))
            if c.a in mandatory and c.b not in mandatory:
                diagnostics.append(Diagnostic(
                    WARNING, "FALSE_OPTIONAL", (c.b,),
                    f"{c.b} is required by {c.a}, which is selected in every configuration"))
            if c.b in _ancestors(model, c.a):
                diagnostics.append(Diagnostic(
                    WARNING, "REQUIRES_SELF_ANCESTOR", (c.a, c.b),
                    f"requires {c.a} {c.b} is redundant: {c.b} is an ancestor of {c.a}"))
        else:
            if c.a in mandatory and c.b in mandatory:
                diagnostics.append(Diagnostic(
                    ERROR, "MUTEX_MANDATORY", (c.a, c.b),
                    f"mutex {c.a} {c.b} links two features that are mandatory from the root"))
    return diagnostics


def check_satisfiable(model: FeatureModel) -> SatisfiabilityResult:
    """Search for one valid configuration; UNSAT_MODEL when none exists."""
    outcome = first_solution(compile_model(model))
    if isinstance(outcome, Unsat):
        return SatisfiabilityResult(
            Diagnostic(ERROR, "UNSAT_MODEL", (model.root,),
                       "no valid configuration can be derived from the model"),
            None)
    return SatisfiabilityResult(None, outcome)


def check_anomalies(model: FeatureModel) -> list:
    """Solver-backed scan of a satisfiable model: dead features (in no
    configuration) and false optionals (syntactically optional but in every
    configuration)."""
    system = compile_model(model)
    if isinstance(first_solution(system), Unsat):
        return []
    diagnostics = []
    mandatory = model.mandatory_path_features()
    from .model import PartialConfiguration

    empty = PartialConfiguration()
    for fid in model.feature_ids:
        can_select, _ = is_consistent(system, empty, (fid, "in"))
        if not can_select:
            diagnostics.append(Diagnostic(
                WARNING, "DEAD_FEATURE", (fid,),
                f"{fid} appears in no valid configuration"))
            continue
        if fid not in mandatory:
            can_drop, _ = is_consistent(system, empty, (fid, "out"))
            if not can_drop:
                diagnostics.append(Diagnostic(
                    WARNING, "FALSE_OPTIONAL", (fid,),
                    f"{fid} is syntactically optional but appears in every valid configuration"))
    return diagnostics


def _declaration_index(model) -> dict:
    index = {}
    for i, f in enumerate(model.features):
        index[f.id if hasattr(f, "id") else f] = i
    offset = len(index)
    for j, g in enumerate(model.groups):
        index.setdefault(g.id, offset + j)
    return index


def sort_diagnostics(model, diagnostics) -> list:
    index = _declaration_index(model)
    fallback = len(index) + len(model.groups) + 1

    def key(d: Diagnostic):
        return (d.code, tuple(index.get(s, fallback) for s in d.subject))

    return sorted(diagnostics, key=key)


def validate_model(model: FeatureModel) -> list:
    """Full battery on a structurally valid model, deduplicated and in
    canonical (code, subject declaration) order."""
    diagnostics = list(check_contradictions(model))
    sat = check_satisfiable(model)
    if sat.diagnostic is not None:
        diagnostics.append(sat.diagnostic)
    else:
        diagnostics.extend(check_anomalies(model))
    seen = set()
    unique = []
    for d in sort_diagnostics(model, diagnostics):
        fingerprint = (d.severity, d.code, d.subject)
        if fingerprint not in seen:
            seen.add(fingerprint)
            unique.append(d)
    return unique


def validate_draft(draft):
    """(model, diagnostics) for raw model data: structure first, the full
    battery only when a model can actually be built."""
    structure = sort_diagnostics(draft, check_structure(draft))
    if structure:
        return None, structure
    model = FeatureModel(
        name=draft.name, root=draft.root, features=tuple(draft.features),
        edges=tuple(draft.edges), groups=tuple(draft.groups),
        constraints=tuple(draft.constraints))
    return model, validate_model(model)


def has_errors(diagnostics) -> bool:
    return any(d.severity == ERROR for d in diagnostics)
