"""Translation of a feature model into a 0-1 linear constraint system.

Every feature becomes a 0-1 variable (1 = selected). The translation rules:

    root                    R = 1
    mandatory edge a->b     Ra = Rb
    optional edge a->b      Rb <= Ra
    group g under a         Rm <= Ra for each member,
                            Cardmin * Ra <= sum(members) <= Cardmax
    requires a b            Ra <= Rb
    mutex a b               Ra + Rb <= 1

The group upper bound is deliberately unconditioned on the parent: the
member bounds already force the sum to 0 when the parent is out. Every
constraint carries the model element it came from.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import FeatureModel
from .rational import format_rational


@dataclass(frozen=True)
class Var:
    feature: str


@dataclass(frozen=True)
class LinearConstraint:
    """sum(lhs) (=|<=) sum(rhs) + rhs_const, integer coefficients."""

    kind: str  # "eq" | "le"
    lhs: tuple  # ((coefficient, feature), ...)
    rhs: tuple = ()
    rhs_const: int = 0
    provenance: str = ""


class ConstraintSystem:
    """Compiled 0-1 system; mutations (added bounds) bump `revision`, which
    invalidates outstanding solution cursors."""

    def __init__(self, model: FeatureModel, constraints):
        self.model = model
        self.feature_ids = model.feature_ids
        self.vars = tuple(Var(fid) for fid in self.feature_ids)
        self.constraints = list(constraints)
        self.revision = 0

    def add_constraint(self, constraint: LinearConstraint) -> None:
        self.constraints.append(constraint)
        self.revision += 1

    def provenance(self) -> dict:
        return {c: c.provenance for c in self.constraints}

    def var_index(self) -> dict:
        return {fid: i for i, fid in enumerate(self.feature_ids)}


def compile_model(model: FeatureModel) -> ConstraintSystem:
    """Emit the translation of every model element, in declaration order:
    root first, then decomposition edges, groups, cross-tree constraints."""
    constraints = [
        LinearConstraint("eq", ((1, model.root),), (), 1, "root"),
    ]
    for e in model.edges:
        if e.kind == "mandatory":
            constraints.append(
                LinearConstraint("eq", ((1, e.parent),), ((1, e.child),), 0,
                                 f"mandatory {e.parent} {e.child}"))
        else:
            constraints.append(
                LinearConstraint("le", ((1, e.child),), ((1, e.parent),), 0,
                                 f"optional {e.parent} {e.child}"))
    for g in model.groups:
        for m in g.members:
            constraints.append(
                LinearConstraint("le", ((1, m),), ((1, g.parent),), 0, f"member {g.id} {m}"))
        members = tuple((1, m) for m in g.members)
        constraints.append(
            LinearConstraint("le", ((g.card_min, g.parent),), members, 0, f"group {g.id} min"))
        constraints.append(
            LinearConstraint("le", members, (), g.card_max, f"group {g.id} max"))
    for c in model.constraints:
        if c.kind == "requires":
            constraints.append(
                LinearConstraint("le", ((1, c.a),), ((1, c.b),), 0, f"requires {c.a} {c.b}"))
        else:
            constraints.append(
                LinearConstraint("le", ((1, c.a), (1, c.b)), (), 1, f"mutex {c.a} {c.b}"))
    return ConstraintSystem(model, constraints)


def _term_text(coefficient, feature, explicit=False) -> str:
    if coefficient == 1 and not explicit:
        return feature
    return f"{format_rational(coefficient)}*{feature}"


def render_constraint(c: LinearConstraint) -> str:
    """One-line text for a constraint, shaped after its source element."""
    if c.provenance.startswith("bound "):
        if c.lhs:
            terms = " + ".join(_term_text(k, f) for k, f in c.lhs if k != 0) or "0"
            return f"{terms} <= {format_rational(c.rhs_const)}"
        terms = " + ".join(_term_text(k, f) for k, f in c.rhs if k != 0) or "0"
        return f"{terms} >= {format_rational(-c.rhs_const)}"
    group_min = c.provenance.startswith("group ") and c.provenance.endswith(" min")
    lhs = " + ".join(_term_text(k, f, explicit=group_min) for k, f in c.lhs)
    rhs_parts = [_term_text(k, f) for k, f in c.rhs]
    if c.rhs_const != 0 or not rhs_parts:
        rhs_parts.append(format_rational(c.rhs_const))
    rhs = " + ".join(rhs_parts)
    op = "=" if c.kind == "eq" else "<="
    return f"{lhs} {op} {rhs}"


def dump_system(system: ConstraintSystem):
    """Human-readable listing, one constraint per line with its provenance."""
    from .modelio import SourceDocument

    lines = tuple(f"{render_constraint(c)}  # {c.provenance}" for c in system.constraints)
    return SourceDocument(lines, origin=f"<constraints {system.model.name or 'model'}>")
