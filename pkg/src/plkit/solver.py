"""Finite-domain boolean solving over compiled constraint systems.

One engine drives everything: bounds-consistent propagation over the
integer rows of the system (which subsumes the per-rule propagation of
edges, groups, requires and mutex), a resumable depth-first search with
declaration-order variables and exclude-first values, failed-literal
probing for exact consequence sets, and branch-and-bound optimization in
exact integer arithmetic.

Solutions are therefore emitted in a fixed order: lexicographic in the
0/1 vector over feature declaration order, 0 before 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .compiler import ConstraintSystem, LinearConstraint
from .model import FeatureModel, PartialConfiguration, UnknownFeatureError
from .rational import format_rational


class StaleCursorError(RuntimeError):
    """The system changed after this cursor was created."""


@dataclass(frozen=True)
class TrailEntry:
    feature: str
    value: int  # 0 or 1
    reason: str  # "user decision", "search choice", or the forcing constraint


@dataclass(frozen=True)
class Conflict:
    violated: object  # LinearConstraint, or None for a decision contradiction
    provenance: str
    trail: tuple


@dataclass(frozen=True)
class Unsat:
    conflict: object = None  # Conflict | None


@dataclass(frozen=True)
class Assignment:
    values: dict  # feature id -> 1 | 0 | None

    def decided_in(self):
        return frozenset(f for f, v in self.values.items() if v == 1)

    def decided_out(self):
        return frozenset(f for f, v in self.values.items() if v == 0)

    def undecided(self):
        return frozenset(f for f, v in self.values.items() if v is None)


@dataclass(frozen=True)
class Consequences:
    """Deduced state of every feature under the current decisions.

    forced_in holds the features present in every completion (including the
    in-decisions themselves), forced_out those present in none; open is the
    rest. At probing depth the sets are exact.
    """

    forced_in: frozenset
    forced_out: frozenset
    open: frozenset
    status: str  # "consistent" | "conflict"
    conflict: object = None

    def __eq__(self, other):
        if not isinstance(other, Consequences):
            return NotImplemented
        return (self.forced_in, self.forced_out, self.open, self.status) == (
            other.forced_in, other.forced_out, other.open, other.status)

    def __hash__(self):
        return hash((self.forced_in, self.forced_out, self.open, self.status))


@dataclass(frozen=True)
class Objective:
    attribute: str
    direction: str  # "minimize" | "maximize"
    coefficients: dict  # feature id -> Fraction (absent means 0)

    def __post_init__(self):
        if self.direction not in ("minimize", "maximize"):
            raise ValueError(f"direction must be minimize or maximize, got {self.direction!r}")

    @classmethod
    def from_model(cls, model: FeatureModel, attribute: str, direction: str) -> "Objective":
        coefficients = {f.id: f.attributes[attribute] for f in model.features if attribute in f.attributes}
        return cls(attribute, direction, coefficients)

    @classmethod
    def feature_count(cls, model: FeatureModel, direction: str = "minimize") -> "Objective":
        return cls("feature-count", direction, {fid: Fraction(1) for fid in model.feature_ids})


class _Engine:
    """Integer rows in <= form plus incremental bounds propagation."""

    __slots__ = ("n", "index", "feature_ids", "rows", "bounds", "sources", "watch",
                 "row_min", "values", "trail", "flip", "obj_coef", "obj_cur", "obj_pool")

    def __init__(self, system: ConstraintSystem, objective_int=None):
        self.feature_ids = system.feature_ids
        self.index = {fid: i for i, fid in enumerate(self.feature_ids)}
        self.n = len(self.feature_ids)
        self.rows = []
        self.bounds = []
        self.sources = []
        self.watch = [[] for _ in range(self.n)]
        for constraint in system.constraints:
            coeffs = {}
            for k, f in constraint.lhs:
                coeffs[self.index[f]] = coeffs.get(self.index[f], 0) + k
            for k, f in constraint.rhs:
                coeffs[self.index[f]] = coeffs.get(self.index[f], 0) - k
            terms = tuple((i, k) for i, k in coeffs.items() if k != 0)
            self._add_row(terms, constraint.rhs_const, constraint)
            if constraint.kind == "eq":
                self._add_row(tuple((i, -k) for i, k in terms), -constraint.rhs_const, constraint)
        self.row_min = [sum(min(0, k) for _, k in terms) for terms in self.rows]
        self.values = [None] * self.n
        self.trail = []
        self.flip = None
        self.obj_coef = objective_int
        self.obj_cur = 0
        self.obj_pool = sum(min(0, k) for k in objective_int) if objective_int else 0

    def _add_row(self, terms, bound, source):
        row_id = len(self.rows)
        self.rows.append(terms)
        self.bounds.append(bound)
        self.sources.append(source)
        for i, _ in terms:
            self.watch[i].append(row_id)

    def assign(self, var: int, value: int, reason) -> int | None:
        """Assign and propagate to fixpoint; returns a violated row id or None.

        When the assignment contradicts an already forced literal, the row
        that forced it is blamed and the contradicting decision is attached
        to the reported trail."""
        self.flip = None
        queue = [(var, value, reason)]
        while queue:
            v, val, why = queue.pop()
            if self.values[v] is not None:
                if self.values[v] == val:
                    continue
                self.flip = (v, val, why)
                for row_id in self.watch[v]:
                    if self.row_min[row_id] > self.bounds[row_id]:
                        return row_id
                for tv, _tval, twhy in self.trail:
                    if tv == v and isinstance(twhy, int) and twhy >= 0:
                        return twhy
                return self.watch[v][0] if self.watch[v] else 0
            self.values[v] = val
            self.trail.append((v, val, why))
            if self.obj_coef is not None:
                k = self.obj_coef[v]
                self.obj_cur += k * val
                self.obj_pool -= min(0, k)
            # First apply every row delta, so the trail entry is fully
            # accounted for even when a violation cuts propagation short;
            # backtracking relies on that.
            violated = None
            for row_id in self.watch[v]:
                k = next(c for i, c in self.rows[row_id] if i == v)
                self.row_min[row_id] += k * val - min(0, k)
                if violated is None and self.row_min[row_id] > self.bounds[row_id]:
                    violated = row_id
            if violated is not None:
                return violated
            for row_id in self.watch[v]:
                terms = self.rows[row_id]
                bound = self.bounds[row_id]
                current = self.row_min[row_id]
                for j, c in terms:
                    if self.values[j] is not None:
                        continue
                    if c > 0 and current + c > bound:
                        queue.append((j, 0, row_id))
                    elif c < 0 and current - c > bound:
                        queue.append((j, 1, row_id))
        return None

    def initial_propagate(self) -> int | None:
        """Fire every row once, so constraints that force literals with no
        trigger assignment (the pinned root, mandatory chains) take effect."""
        for row_id, terms in enumerate(self.rows):
            current = self.row_min[row_id]
            bound = self.bounds[row_id]
            if current > bound:
                return row_id
            for j, c in terms:
                if self.values[j] is not None:
                    continue
                conflict = None
                if c > 0 and current + c > bound:
                    conflict = self.assign(j, 0, row_id)
                elif c < 0 and current - c > bound:
                    conflict = self.assign(j, 1, row_id)
                if conflict is not None:
                    return conflict
                current = self.row_min[row_id]
        return None

    def backtrack_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            v, val, _ = self.trail.pop()
            self.values[v] = None
            if self.obj_coef is not None:
                k = self.obj_coef[v]
                self.obj_cur -= k * val
                self.obj_pool += min(0, k)
            for row_id in self.watch[v]:
                k = next(c for i, c in self.rows[row_id] if i == v)
                self.row_min[row_id] -= k * val - min(0, k)

    def seed(self, partial: PartialConfiguration) -> int | None:
        conflict = self.initial_propagate()
        if conflict is not None:
            return conflict
        for fid in sorted(partial.decided_in):
            conflict = self.assign(self._var(fid), 1, None)
            if conflict is not None:
                return conflict
        for fid in sorted(partial.decided_out):
            conflict = self.assign(self._var(fid), 0, None)
            if conflict is not None:
                return conflict
        return None

    def _var(self, fid: str) -> int:
        try:
            return self.index[fid]
        except KeyError:
            raise UnknownFeatureError(f"unknown feature {fid!r}") from None

    def snapshot(self) -> frozenset:
        return frozenset(fid for fid, v in zip(self.feature_ids, self.values) if v == 1)

    def conflict_object(self, row_id: int) -> Conflict:
        source = self.sources[row_id]
        return Conflict(violated=source, provenance=source.provenance, trail=self.trail_entries())

    def _reason_text(self, why) -> str:
        if why is None:
            return "user decision"
        if why == -1:
            return "search choice"
        return self.sources[why].provenance

    def trail_entries(self) -> tuple:
        entries = [TrailEntry(self.feature_ids[v], val, self._reason_text(why))
                   for v, val, why in self.trail]
        if self.flip is not None:
            v, val, why = self.flip
            entries.append(TrailEntry(self.feature_ids[v], val, self._reason_text(why)))
        return tuple(entries)


class SolutionCursor:
    """Resumable depth-first enumeration of the valid configurations that
    extend a partial configuration. `next_solution` returns None when
    exhausted. Any mutation of the system invalidates the cursor."""

    def __init__(self, system: ConstraintSystem, partial: PartialConfiguration | None = None):
        self._system = system
        self._revision = system.revision
        partial = partial or PartialConfiguration()
        self._engine = _Engine(system)
        root_row = self._engine.seed(partial)
        self.root_conflict = self._engine.conflict_object(root_row) if root_row is not None else None
        self.last_conflict = self.root_conflict
        self._frames = []  # [var, trail mark, last value tried]
        self._state = "start"

    def next_solution(self) -> frozenset | None:
        if self._revision != self._system.revision:
            raise StaleCursorError("the constraint system changed; start a new enumeration")
        if self._state == "exhausted":
            return None
        if self._state == "start":
            self._state = "running"
            if self.root_conflict is not None:
                self._state = "exhausted"
                return None
            solution = self._descend()
        else:
            solution = self._descend() if self._advance() else None
        if solution is None:
            self._state = "exhausted"
        return solution

    def _next_undecided(self) -> int | None:
        start = self._frames[-1][0] + 1 if self._frames else 0
        values = self._engine.values
        for v in range(start, self._engine.n):
            if values[v] is None:
                return v
        return None

    def _apply(self, var: int, value: int, mark: int) -> bool:
        row = self._engine.assign(var, value, -1)
        if row is None:
            return True
        self.last_conflict = self._engine.conflict_object(row)
        self._engine.backtrack_to(mark)
        return False

    def _descend(self) -> frozenset | None:
        while True:
            var = self._next_undecided()
            if var is None:
                return self._engine.snapshot()
            mark = len(self._engine.trail)
            self._frames.append([var, mark, 0])
            if not self._apply(var, 0, mark) and not self._advance():
                return None

    def _advance(self) -> bool:
        """Undo frames until one still has value 1 untried, and take it."""
        while self._frames:
            var, mark, last = self._frames[-1]
            self._engine.backtrack_to(mark)
            if last == 0:
                self._frames[-1][2] = 1
                if self._apply(var, 1, mark):
                    return True
            else:
                self._frames.pop()
        return False


def iterate(system: ConstraintSystem, partial: PartialConfiguration | None = None) -> SolutionCursor:
    return SolutionCursor(system, partial)


def next_solution(cursor: SolutionCursor):
    return cursor.next_solution()


def first_solution(system: ConstraintSystem, partial: PartialConfiguration | None = None):
    """First valid configuration in search order, or Unsat carrying the
    conflict that closed the search."""
    cursor = SolutionCursor(system, partial)
    solution = cursor.next_solution()
    if solution is None:
        return Unsat(conflict=cursor.last_conflict)
    return solution


def enumerate_solutions(system: ConstraintSystem, partial: PartialConfiguration | None = None,
                        limit: int | None = None) -> list:
    """All (or the first `limit`) configurations extending the partial, in
    deterministic search order; answers inclusion and exclusion queries."""
    cursor = SolutionCursor(system, partial)
    solutions = []
    while limit is None or len(solutions) < limit:
        solution = cursor.next_solution()
        if solution is None:
            break
        solutions.append(solution)
    return solutions


def count(system: ConstraintSystem, partial: PartialConfiguration | None = None) -> int:
    cursor = SolutionCursor(system, partial)
    total = 0
    while cursor.next_solution() is not None:
        total += 1
    return total


def propagate(system: ConstraintSystem, partial: PartialConfiguration | None = None):
    """Fixpoint of rule propagation and cardinality counting over the rows.

    Returns the least decided extension (every forced literal holds in all
    completions) or a Conflict with the violated constraint and the trail
    that produced it.
    """
    engine = _Engine(system)
    row = engine.seed(partial or PartialConfiguration())
    if row is not None:
        return engine.conflict_object(row)
    return Assignment({fid: v for fid, v in zip(engine.feature_ids, engine.values)})


def _conflict_consequences(system, partial, conflict) -> Consequences:
    decided = partial.decided_in | partial.decided_out
    return Consequences(
        forced_in=frozenset(partial.decided_in),
        forced_out=frozenset(partial.decided_out),
        open=frozenset(system.feature_ids) - decided,
        status="conflict",
        conflict=conflict,
    )


def consequences(system: ConstraintSystem, partial: PartialConfiguration | None = None,
                 depth: str = "probing") -> Consequences:
    """Forced-in / forced-out / open partition of the features.

    Propagation depth applies the constraint rules to a fixpoint (fast,
    sound, not complete). Probing depth additionally tests both values of
    every open feature by search, so its sets are exactly the intersection
    and the complement-of-union of all remaining configurations.
    """
    if depth not in ("propagation", "probing"):
        raise ValueError(f"depth must be propagation or probing, got {depth!r}")
    partial = partial or PartialConfiguration()
    outcome = propagate(system, partial)
    if isinstance(outcome, Conflict):
        return _conflict_consequences(system, partial, outcome)
    forced_in = set(outcome.decided_in())
    forced_out = set(outcome.decided_out())
    open_features = set(outcome.undecided())
    if depth == "probing" and open_features:
        witness = first_solution(system, partial)
        if isinstance(witness, Unsat):
            return _conflict_consequences(system, partial, witness.conflict)
        witnesses = [witness]
        for fid in system.feature_ids:
            if fid not in open_features:
                continue
            seen_in = any(fid in w for w in witnesses)
            seen_out = any(fid not in w for w in witnesses)
            if seen_in and seen_out:
                continue
            if seen_in:
                probe = first_solution(system, partial.with_decision(fid, "out"))
                if isinstance(probe, Unsat):
                    forced_in.add(fid)
                    open_features.discard(fid)
                else:
                    witnesses.append(probe)
            else:
                probe = first_solution(system, partial.with_decision(fid, "in"))
                if isinstance(probe, Unsat):
                    forced_out.add(fid)
                    open_features.discard(fid)
                else:
                    witnesses.append(probe)
    elif depth == "probing":
        # Everything is decided by propagation; confirm a completion exists.
        witness = first_solution(system, partial)
        if isinstance(witness, Unsat):
            return _conflict_consequences(system, partial, witness.conflict)
    return Consequences(
        forced_in=frozenset(forced_in),
        forced_out=frozenset(forced_out),
        open=frozenset(open_features),
        status="consistent",
        conflict=None,
    )


def is_consistent(system: ConstraintSystem, partial: PartialConfiguration,
                  decision: tuple) -> tuple:
    """(True, None) when at least one valid configuration extends the
    partial plus the decision, decided by search; otherwise (False, conflict)."""
    fid, state = decision
    if state not in ("in", "out"):
        raise ValueError(f"state must be 'in' or 'out', got {state!r}")
    opposite = partial.decided_out if state == "in" else partial.decided_in
    if fid in opposite:
        trail = (TrailEntry(fid, 0 if state == "in" else 1, "user decision"),
                 TrailEntry(fid, 1 if state == "in" else 0, "user decision"))
        return False, Conflict(violated=None, provenance="decision contradiction", trail=trail)
    extended = partial.with_decision(fid, state)
    outcome = first_solution(system, extended)
    if isinstance(outcome, Unsat):
        return False, outcome.conflict
    return True, None


def filter_features(model: FeatureModel, attribute: str, comparator: str, bound) -> frozenset:
    """Features whose attribute value (default 0) satisfies the predicate."""
    ops = {
        "<": lambda v: v < bound, "<=": lambda v: v <= bound, "≤": lambda v: v <= bound,
        ">": lambda v: v > bound, ">=": lambda v: v >= bound, "≥": lambda v: v >= bound,
        "=": lambda v: v == bound, "==": lambda v: v == bound,
    }
    if comparator not in ops:
        raise ValueError(f"comparator must be one of <, <=, >, >=, =, got {comparator!r}")
    test = ops[comparator]
    return frozenset(fid for fid in model.feature_ids
                     if test(model.attribute_value(fid, attribute)))


def add_attribute_bound(system: ConstraintSystem, attribute: str, direction: str,
                        bound) -> ConstraintSystem:
    """Extend the system in place with sum(value_f * x_f) <=|>= bound.

    Rational inputs are scaled to integers, so the solver stays exact. The
    mutation bumps the system revision and invalidates open cursors.
    """
    if direction in ("≤",):
        direction = "<="
    if direction in ("≥",):
        direction = ">="
    if direction not in ("<=", ">="):
        raise ValueError(f"direction must be <= or >=, got {direction!r}")
    bound = Fraction(bound)
    coefficients = [(fid, system.model.attribute_value(fid, attribute))
                    for fid in system.feature_ids]
    scale = lcm(bound.denominator, *(v.denominator for _, v in coefficients))
    terms = tuple((int(v * scale), fid) for fid, v in coefficients if v != 0)
    scaled_bound = int(bound * scale)
    if not terms:
        terms = ((0, system.model.root),)
    label = f"bound {attribute} {direction} {format_rational(bound)}"
    if direction == "<=":
        constraint = LinearConstraint("le", terms, (), scaled_bound, label)
    else:
        constraint = LinearConstraint("le", (), terms, -scaled_bound, label)
    system.add_constraint(constraint)
    return system


def optimize(system: ConstraintSystem, partial: PartialConfiguration | None = None,
             objective: Objective | None = None):
    """Branch-and-bound over the search of `first_solution`.

    Returns the configuration achieving the global optimum of the objective
    total, with ties resolved to the first optimum in enumeration order,
    plus the exact optimal value; Unsat when nothing extends the partial.
    """
    if objective is None:
        raise ValueError("an objective is required")
    partial = partial or PartialConfiguration()
    coefficients = [Fraction(objective.coefficients.get(fid, 0)) for fid in system.feature_ids]
    sign = 1 if objective.direction == "minimize" else -1
    scale = lcm(1, *(c.denominator for c in coefficients))
    int_coefficients = [sign * int(c * scale) for c in coefficients]

    engine = _Engine(system, objective_int=int_coefficients)
    root_row = engine.seed(partial)
    if root_row is not None:
        return Unsat(conflict=engine.conflict_object(root_row))

    best = None
    best_value = None
    frames = []  # [var, mark, last value tried]

    def prunable() -> bool:
        return best_value is not None and engine.obj_cur + engine.obj_pool >= best_value

    def apply(var, value, mark) -> bool:
        if engine.assign(var, value, -1) is not None or prunable():
            engine.backtrack_to(mark)
            return False
        return True

    def advance() -> bool:
        while frames:
            var, mark, last = frames[-1]
            engine.backtrack_to(mark)
            if last == 0:
                frames[-1][2] = 1
                if apply(var, 1, mark):
                    return True
            else:
                frames.pop()
        return False

    if prunable():
        descending = False
    else:
        descending = True
    while descending:
        var = None
        start = frames[-1][0] + 1 if frames else 0
        for v in range(start, engine.n):
            if engine.values[v] is None:
                var = v
                break
        if var is None:
            if best_value is None or engine.obj_cur < best_value:
                best = engine.snapshot()
                best_value = engine.obj_cur
            descending = advance()
            continue
        mark = len(engine.trail)
        frames.append([var, mark, 0])
        if not apply(var, 0, mark):
            descending = advance()

    if best is None:
        return Unsat(conflict=None)
    return best, Fraction(sign * best_value, scale)
