"""Stateful derivation wizard engine.

A session records analyst decisions over one model, keeps probing-depth
consequences current after every step, and supports undo, what-if probes,
must-requirement application, optimal completion and product export. A
conflicting decision stays on the stack with the conflict trail attached;
undo is the only recovery path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .compiler import ConstraintSystem, compile_model
from .matcher import MatchReport
from .model import FeatureModel, PartialConfiguration, is_valid_configuration
from .rational import format_rational
from .solver import (
    Conflict,
    Consequences,
    Objective,
    TrailEntry,
    Unsat,
    consequences as solve_consequences,
    optimize,
)
from .validator import has_errors, validate_model

OPEN = "open"
CONFLICTED = "conflicted"
COMPLETE = "complete"


class SessionError(ValueError):
    """An operation that the session's current state does not allow."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or []
        super().__init__(message)


class AmbiguousMustError(SessionError):
    """Must-requirements whose match is ambiguous need explicit resolution."""

    def __init__(self, ambiguous):
        self.ambiguous = dict(ambiguous)
        listing = "; ".join(f"{rid} ~ {', '.join(fids)}" for rid, fids in ambiguous.items())
        super().__init__(f"ambiguous must requirements need explicit resolution: {listing}")


@dataclass(frozen=True)
class Decision:
    feature: str
    state: str  # "in" | "out"
    origin: str  # "user" | "must-requirement"


@dataclass(frozen=True)
class DerivedProduct:
    model: str
    configuration: frozenset
    features_in_order: tuple  # selected features, model declaration order
    objective_values: dict  # attribute -> Fraction total
    provenance: dict  # feature id -> "user" | "forced" | "search"
    capitalization: tuple = ()  # StakeholderRequirement entries

    @property
    def capitalization_candidates(self):
        return [req.id for req in self.capitalization]


class DerivationSession:
    def __init__(self, model: FeatureModel):
        diagnostics = validate_model(model)
        if has_errors(diagnostics):
            raise SessionError(
                "model rejected: " + "; ".join(d.line() for d in diagnostics if d.severity == "error"),
                diagnostics=diagnostics)
        self.model = model
        self.system: ConstraintSystem = compile_model(model)
        self.decisions: list = []
        self.capitalization: list = []
        self.warnings: list = []
        self.consequences: Consequences = None
        self.status = OPEN
        self._recompute()

    # -- state ------------------------------------------------------------

    def partial(self) -> PartialConfiguration:
        return PartialConfiguration(
            frozenset(d.feature for d in self.decisions if d.state == "in"),
            frozenset(d.feature for d in self.decisions if d.state == "out"))

    def _recompute(self, forced_conflict: Conflict | None = None) -> None:
        if forced_conflict is not None:
            decided = {d.feature for d in self.decisions}
            self.consequences = Consequences(
                forced_in=frozenset(d.feature for d in self.decisions if d.state == "in"),
                forced_out=frozenset(d.feature for d in self.decisions if d.state == "out"),
                open=frozenset(self.model.feature_ids) - decided,
                status="conflict", conflict=forced_conflict)
        else:
            self.consequences = solve_consequences(self.system, self.partial(), depth="probing")
        if self.consequences.status == "conflict":
            self.status = CONFLICTED
        elif not self.consequences.open:
            self.status = COMPLETE
        else:
            self.status = OPEN

    def _determination(self, feature: str) -> str | None:
        for d in self.decisions:
            if d.feature == feature:
                return f"decided {d.state} ({d.origin})"
        if feature in self.consequences.forced_in:
            return "forced in"
        if feature in self.consequences.forced_out:
            return "forced out"
        return None

    # -- operations -------------------------------------------------------

    def _gate_decision(self, feature: str, state: str) -> None:
        """Reject decisions that restate an existing determination.

        Contradicting a forced value is allowed on purpose: it yields a
        conflicted session whose trail shows why the value was forced."""
        if self.status == CONFLICTED:
            raise SessionError("session is conflicted; undo the offending decision first")
        if feature not in self.model.feature_set:
            raise SessionError(f"unknown feature {feature!r}")
        if state not in ("in", "out"):
            raise SessionError(f"state must be 'in' or 'out', got {state!r}")
        if any(d.feature == feature for d in self.decisions):
            raise SessionError(f"{feature} is not open: {self._determination(feature)}")
        forced_same = (feature in self.consequences.forced_in and state == "in") or (
            feature in self.consequences.forced_out and state == "out")
        if forced_same:
            raise SessionError(f"{feature} is not open: {self._determination(feature)}")

    def decide(self, feature: str, state: str) -> "DerivationSession":
        self._gate_decision(feature, state)
        self.decisions.append(Decision(feature, state, "user"))
        self._recompute()
        return self

    def undo(self) -> "DerivationSession":
        if not self.decisions:
            raise SessionError("nothing to undo")
        self.decisions.pop()
        self._recompute()
        return self

    def what_if(self, feature: str, state: str) -> Consequences:
        """Probing consequences of a hypothetical decision; the session is
        left untouched."""
        self._gate_decision(feature, state)
        return solve_consequences(self.system, self.partial().with_decision(feature, state),
                                  depth="probing")

    def apply_musts(self, requirements, report: MatchReport) -> "DerivationSession":
        """Push an in-decision for every matched must requirement.

        Unmatched musts become capitalization candidates (warning, session
        unchanged); ambiguous musts are rejected up front; a conflicting
        must leaves the session conflicted with the trail showing both
        decisions.
        """
        if report.model != self.model.name:
            raise SessionError(
                f"match report is for model {report.model!r}, session holds {self.model.name!r}")
        musts = [r for r in requirements if r.priority == "must"]
        ambiguous = {r.id: report.classification[r.id].features
                     for r in musts
                     if r.id in report.classification
                     and report.classification[r.id].kind == "ambiguous"}
        if ambiguous:
            raise AmbiguousMustError(ambiguous)
        for req in musts:
            classification = report.classification.get(req.id)
            if classification is None:
                raise SessionError(f"requirement {req.id} is missing from the match report")
            if classification.kind == "unmatched":
                self.warnings.append(
                    f"must requirement {req.id} matches nothing; kept as a capitalization candidate")
                if all(existing.id != req.id for existing in self.capitalization):
                    self.capitalization.append(req)
                continue
            feature = classification.features[0]
            if self.status == CONFLICTED:
                break
            decided = {d.feature: d for d in self.decisions}
            if feature in decided:
                if decided[feature].state == "in":
                    continue
                trail = (TrailEntry(feature, 0, "user decision"),
                         TrailEntry(feature, 1, f"must requirement {req.id}"))
                self._recompute(forced_conflict=Conflict(None, "decision contradiction", trail))
                break
            if feature in self.consequences.forced_in:
                continue
            self.decisions.append(Decision(feature, "in", "must-requirement"))
            self._recompute()
        return self

    def complete_optimal(self, objective: Objective) -> DerivedProduct:
        """Optimal completion of the current decisions, with provenance and
        totals for every numeric attribute in the model."""
        if self.status == CONFLICTED:
            raise SessionError("session is conflicted; undo the offending decision first")
        before = self.consequences
        outcome = optimize(self.system, self.partial(), objective)
        if isinstance(outcome, Unsat):
            self.status = CONFLICTED
            raise SessionError("no configuration extends the current decisions")
        configuration, _ = outcome
        return self._product(configuration, before)

    def _product(self, configuration: frozenset, consequences_before: Consequences) -> DerivedProduct:
        assert is_valid_configuration(self.model, configuration)
        decided = {d.feature for d in self.decisions}
        provenance = {}
        for fid in configuration:
            if fid in decided:
                provenance[fid] = "user"
            elif fid in consequences_before.forced_in:
                provenance[fid] = "forced"
            else:
                provenance[fid] = "search"
        totals = {
            attr: sum((self.model.attribute_value(fid, attr) for fid in configuration), Fraction(0))
            for attr in self.model.attribute_names()
        }
        in_order = tuple(fid for fid in self.model.feature_ids if fid in configuration)
        return DerivedProduct(self.model.name, configuration, in_order, totals, provenance,
                              tuple(self.capitalization))

    def derived_product(self) -> DerivedProduct:
        """The product of a complete session (its unique remaining solution)."""
        if self.status != COMPLETE:
            raise SessionError(f"session is {self.status}, not complete")
        return self._product(self.consequences.forced_in, self.consequences)


def new_session(model: FeatureModel) -> DerivationSession:
    return DerivationSession(model)


def decide(session: DerivationSession, feature: str, state: str) -> DerivationSession:
    return session.decide(feature, state)


def undo(session: DerivationSession) -> DerivationSession:
    return session.undo()


def what_if(session: DerivationSession, feature: str, state: str) -> Consequences:
    return session.what_if(feature, state)


def apply_musts(session: DerivationSession, requirements, report: MatchReport) -> DerivationSession:
    return session.apply_musts(requirements, report)


def complete_optimal(session: DerivationSession, objective: Objective) -> DerivedProduct:
    return session.complete_optimal(objective)


def export_product(source) -> "SourceDocument":
    """Product requirements document for a DerivedProduct or a complete
    session: selected features with provenance, attribute totals, and the
    capitalization-candidates section."""
    from .modelio import SourceDocument

    if isinstance(source, DerivationSession):
        product = source.derived_product()
    elif isinstance(source, DerivedProduct):
        product = source
    else:
        raise TypeError(f"cannot export {type(source).__name__}")
    lines = [f"product {product.model}" if product.model else "product"]
    for fid in product.features_in_order:
        lines.append(f"feature {fid} {product.provenance[fid]}")
    for attr in sorted(product.objective_values):
        lines.append(f"total {attr} {format_rational(product.objective_values[attr])}")
    for req in product.capitalization:
        lines.append(f"capitalize: {req.id} " + " ".join(sorted(req.terms)))
    return SourceDocument(tuple(lines), origin=f"<product {product.model or 'model'}>")
