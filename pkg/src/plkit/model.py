"""Feature-model and configuration data types plus the direct validity oracle.

A feature model is a rooted decomposition tree (mandatory/optional edges and
cardinality groups) with cross-tree `requires`/`mutex` constraints and
numeric attributes. `is_valid_configuration` checks a total selection
directly against the model, independent of the constraint solver, and
`enumerate_brute_force` exhausts all subsets; together they are the oracle
the solver is tested against.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, TypeAlias

from .terms import TermBag, tokenize

ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")

#: A total selection: a feature is in the product iff its id is in the set.
Configuration: TypeAlias = frozenset

MAX_BRUTE_FORCE_FEATURES = 24


class InvalidModelError(ValueError):
    """Raised when constructing a model that violates a structural invariant."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(i.message for i in self.issues))


class UnknownFeatureError(ValueError):
    """A configuration or query referenced a feature the model does not declare."""


class ModelTooLargeError(ValueError):
    """Brute-force enumeration refused: too many features."""


@dataclass(frozen=True)
class Issue:
    """One structural problem found in (possibly raw) model data."""

    code: str
    subjects: tuple
    message: str


@dataclass(frozen=True)
class Feature:
    id: str
    display_name: str = ""
    attributes: dict = field(default_factory=dict)
    terms: TermBag = frozenset()

    def __post_init__(self):
        if not ID_RE.match(self.id):
            raise InvalidModelError([_bad_id(self.id)])
        if not self.display_name:
            object.__setattr__(self, "display_name", self.id)
        for name, value in self.attributes.items():
            if not ID_RE.match(name):
                raise InvalidModelError([Issue("BAD_ID", (name,), f"bad attribute name {name!r}")])
            if not isinstance(value, Fraction):
                self.attributes[name] = Fraction(value)
        if not self.terms:
            object.__setattr__(self, "terms", tokenize(self.display_name))

    def __eq__(self, other):
        if not isinstance(other, Feature):
            return NotImplemented
        return (
            self.id == other.id
            and self.display_name == other.display_name
            and self.attributes == other.attributes
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(self.id)


@dataclass(frozen=True)
class DecompositionEdge:
    parent: str
    child: str
    kind: str  # "mandatory" | "optional"

    def __post_init__(self):
        if self.kind not in ("mandatory", "optional"):
            raise ValueError(f"bad edge kind {self.kind!r}")
        if self.parent == self.child:
            raise InvalidModelError(
                [Issue("SELF_EDGE", (self.parent,), f"edge {self.parent} -> {self.child} loops")]
            )


@dataclass(frozen=True)
class Group:
    id: str
    parent: str
    members: tuple
    card_min: int
    card_max: int


@dataclass(frozen=True)
class CrossTreeConstraint:
    kind: str  # "requires" | "mutex"
    a: str
    b: str

    def __post_init__(self):
        if self.kind not in ("requires", "mutex"):
            raise ValueError(f"bad constraint kind {self.kind!r}")
        if self.a == self.b:
            raise InvalidModelError(
                [Issue("SELF_EDGE", (self.a,), f"{self.kind} relates {self.a} to itself")]
            )

    def pair(self):
        """Unordered pair for mutex comparisons."""
        return frozenset((self.a, self.b))


@dataclass
class ModelDraft:
    """Raw model data as parsed, before structural validation.

    May violate any invariant; `structural_issues` reports what is wrong.
    """

    name: str = ""
    root: Optional[str] = None
    features: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    groups: list = field(default_factory=list)
    constraints: list = field(default_factory=list)


@dataclass(frozen=True)
class FeatureModel:
    name: str
    root: str
    features: tuple
    edges: tuple
    groups: tuple
    constraints: tuple

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        issues = structural_issues(self)
        if issues:
            raise InvalidModelError(issues)
        by_id = {f.id: f for f in self.features}
        object.__setattr__(self, "features", tuple(by_id[i] for i in _attachment_order(self)))
        self._index()

    def _index(self):
        feature_ids = tuple(f.id for f in self.features)
        parent = {}
        mandatory_children = {}
        for e in self.edges:
            parent[e.child] = e.parent
            if e.kind == "mandatory":
                mandatory_children.setdefault(e.parent, []).append(e.child)
        member_sets = []
        for g in self.groups:
            member_sets.append(frozenset(g.members))
            for m in g.members:
                parent[m] = g.parent
        object.__setattr__(self, "_feature_ids", feature_ids)
        object.__setattr__(self, "_feature_set", frozenset(feature_ids))
        object.__setattr__(self, "_by_id", {f.id: f for f in self.features})
        object.__setattr__(self, "_parent", parent)
        object.__setattr__(self, "_mandatory_children", {p: tuple(c) for p, c in mandatory_children.items()})
        object.__setattr__(self, "_group_members", tuple(member_sets))

    @property
    def feature_ids(self):
        return self._feature_ids

    @property
    def feature_set(self):
        return self._feature_set

    def feature(self, feature_id: str) -> Feature:
        try:
            return self._by_id[feature_id]
        except KeyError:
            raise UnknownFeatureError(f"unknown feature {feature_id!r}") from None

    def parent_of(self, feature_id: str) -> Optional[str]:
        """Decomposition parent (edge or group), None for the root."""
        return self._parent.get(feature_id)

    def attribute_names(self):
        names = set()
        for f in self.features:
            names.update(f.attributes)
        return sorted(names)

    def attribute_value(self, feature_id: str, attribute: str) -> Fraction:
        """Attribute value with the documented default of 0 when absent."""
        return self.feature(feature_id).attributes.get(attribute, Fraction(0))

    def mandatory_path_features(self):
        """Features reachable from the root through mandatory edges only.

        These are selected in every valid configuration by construction.
        """
        reached = {self.root}
        frontier = [self.root]
        while frontier:
            parent = frontier.pop()
            for child in self._mandatory_children.get(parent, ()):
                if child not in reached:
                    reached.add(child)
                    frontier.append(child)
        return frozenset(reached)


@dataclass(frozen=True)
class PartialConfiguration:
    """In/out decisions over a subset of features; the rest is undecided."""

    decided_in: frozenset = frozenset()
    decided_out: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "decided_in", frozenset(self.decided_in))
        object.__setattr__(self, "decided_out", frozenset(self.decided_out))
        overlap = self.decided_in & self.decided_out
        if overlap:
            raise ValueError(f"features decided both in and out: {sorted(overlap)}")

    def with_decision(self, feature_id: str, state: str) -> "PartialConfiguration":
        if state == "in":
            return PartialConfiguration(self.decided_in | {feature_id}, self.decided_out)
        if state == "out":
            return PartialConfiguration(self.decided_in, self.decided_out | {feature_id})
        raise ValueError(f"state must be 'in' or 'out', got {state!r}")

    def decided(self):
        return self.decided_in | self.decided_out


def _bad_id(token: str) -> Issue:
    return Issue("BAD_ID", (token,), f"identifier {token!r} does not match [A-Za-z_][A-Za-z0-9_-]*")


def _decomposition_arcs(model) -> list:
    arcs = [(e.parent, e.child) for e in model.edges]
    for g in model.groups:
        arcs.extend((g.parent, m) for m in g.members)
    return arcs


def _attachment_order(model) -> list:
    """Canonical feature order: root first, then attachment declaration order.

    The solver's variable order and every serialized artifact follow this
    order, so two models with the same structure always behave identically.
    """
    order = [model.root]
    seen = {model.root}
    for parent, child in _decomposition_arcs(model):
        if child not in seen:
            seen.add(child)
            order.append(child)
    return order


def structural_issues(model) -> list:
    """All structural problems in raw model data (a draft or a model).

    Checks identifier grammar, reference integrity, the one-incoming-edge
    rule, group cardinality ranges, duplicate group cardinalities,
    decomposition acyclicity, and reachability from the root.
    """
    issues = []
    declared = []
    declared_set = set()
    for f in model.features:
        if not ID_RE.match(f.id):
            issues.append(_bad_id(f.id))
        if f.id in declared_set:
            issues.append(Issue("DUP_FEATURE", (f.id,), f"feature {f.id} declared twice"))
        else:
            declared_set.add(f.id)
            declared.append(f.id)

    if model.root is None or model.root not in declared_set:
        issues.append(Issue("NO_ROOT", (), "model has no declared root feature"))
        return issues

    def known(token, context):
        if token not in declared_set:
            issues.append(Issue("REF_UNKNOWN", (token,), f"{context} references unknown feature {token}"))
            return False
        return True

    incoming = {}
    for e in model.edges:
        if e.parent == e.child:
            issues.append(Issue("SELF_EDGE", (e.parent,), f"edge {e.parent} -> {e.child} loops"))
            continue
        if known(e.parent, f"{e.kind} edge") and known(e.child, f"{e.kind} edge"):
            incoming.setdefault(e.child, []).append(f"{e.kind} {e.parent} {e.child}")

    group_ids = set()
    for g in model.groups:
        if not ID_RE.match(g.id):
            issues.append(_bad_id(g.id))
        if g.id in group_ids:
            issues.append(Issue("DUP_CARD", (g.id,), f"duplicate cardinality for {g.id}"))
        group_ids.add(g.id)
        known(g.parent, f"group {g.id}")
        if len(g.members) < 2:
            issues.append(Issue("GROUP_SIZE", (g.id,), f"group {g.id} needs at least 2 members"))
        if not (1 <= g.card_min <= g.card_max <= max(len(g.members), 1)):
            issues.append(
                Issue(
                    "CARD_RANGE",
                    (g.id,),
                    f"group {g.id} cardinality [{g.card_min}..{g.card_max}]"
                    f" not within 1..{len(g.members)}",
                )
            )
        for m in g.members:
            if known(m, f"group {g.id}"):
                incoming.setdefault(m, []).append(f"member {g.id} {m}")

    for c in model.constraints:
        known(c.a, c.kind)
        known(c.b, c.kind)
        if c.a == c.b:
            issues.append(Issue("SELF_EDGE", (c.a,), f"{c.kind} relates {c.a} to itself"))

    for fid in declared:
        n = len(incoming.get(fid, ()))
        if fid == model.root and n > 0:
            issues.append(Issue("ROOT_ATTACHED", (fid,), f"root {fid} has an incoming decomposition"))
        elif fid != model.root and n > 1:
            issues.append(
                Issue("MULTI_ATTACH", (fid,), f"feature {fid} has {n} incoming decompositions: "
                      + ", ".join(incoming[fid]))
            )

    arcs = [(p, c) for p, c in _decomposition_arcs(model) if p in declared_set and c in declared_set and p != c]
    for cycle in _cycles(declared, arcs):
        issues.append(Issue("CYCLE", tuple(cycle), "decomposition cycle: " + " -> ".join(cycle + [cycle[0]])))

    reachable = {model.root}
    adjacency = {}
    for p, c in arcs:
        adjacency.setdefault(p, []).append(c)
    frontier = [model.root]
    while frontier:
        node = frontier.pop()
        for child in adjacency.get(node, ()):
            if child not in reachable:
                reachable.add(child)
                frontier.append(child)
    for fid in declared:
        if fid not in reachable:
            issues.append(Issue("ISOLATED", (fid,), f"feature {fid} is not reachable from the root"))

    return issues


def _cycles(nodes, arcs):
    """Strongly connected components of size > 1, each reported once."""
    adjacency = {}
    for p, c in arcs:
        adjacency.setdefault(p, []).append(c)
    index = {}
    low = {}
    on_stack = set()
    stack = []
    counter = [0]
    sccs = []

    def strongconnect(start):
        work = [(start, iter(adjacency.get(start, ())))]
        index[start] = low[start] = counter[0]
        counter[0] += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(adjacency.get(succ, ()))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent_node = work[-1][0]
                low[parent_node] = min(low[parent_node], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1:
                    sccs.append(list(reversed(component)))

    for node in nodes:
        if node not in index:
            strongconnect(node)
    return sccs


def is_valid_configuration(model: FeatureModel, config: Iterable) -> bool:
    """Direct check of the validity conditions, independent of the solver.

    A total selection is valid iff the root is in, every selected feature's
    parent is in, mandatory children of selected features are in, group
    cardinalities are met exactly when the group parent is in (and no member
    is in otherwise), and every requires/mutex constraint holds.
    """
    selected = frozenset(config)
    unknown = selected - model.feature_set
    if unknown:
        raise UnknownFeatureError(f"unknown features in configuration: {sorted(unknown)}")
    return _check_selection(model, selected)


def _check_selection(model: FeatureModel, selected: frozenset) -> bool:
    if model.root not in selected:
        return False
    parent = model._parent
    mandatory_children = model._mandatory_children
    for fid in selected:
        p = parent.get(fid)
        if p is not None and p not in selected:
            return False
        for child in mandatory_children.get(fid, ()):
            if child not in selected:
                return False
    for g, members in zip(model.groups, model._group_members):
        chosen = len(members & selected)
        if g.parent in selected:
            if not (g.card_min <= chosen <= g.card_max):
                return False
        elif chosen:
            return False
    for c in model.constraints:
        if c.kind == "requires":
            if c.a in selected and c.b not in selected:
                return False
        else:
            if c.a in selected and c.b in selected:
                return False
    return True


def enumerate_brute_force(model: FeatureModel):
    """All valid configurations by exhaustive iteration over 2^n subsets.

    The independent oracle for the solver: no propagation, no search, just
    `is_valid_configuration` applied to every subset. Guarded to 24 features.
    """
    ids = model.feature_ids
    n = len(ids)
    if n > MAX_BRUTE_FORCE_FEATURES:
        raise ModelTooLargeError(f"{n} features exceeds the brute-force limit of {MAX_BRUTE_FORCE_FEATURES}")
    solutions = set()
    for mask in range(1 << n):
        subset = frozenset(ids[i] for i in range(n) if mask >> i & 1)
        if _check_selection(model, subset):
            solutions.add(subset)
    return solutions
