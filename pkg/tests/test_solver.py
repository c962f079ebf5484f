import random
from fractions import Fraction

import pytest

from plkit.compiler import compile_model
from plkit.model import PartialConfiguration, UnknownFeatureError
from plkit.modelio import SourceDocument, parse_model
from plkit.solver import (
    Assignment,
    Conflict,
    Objective,
    StaleCursorError,
    Unsat,
    add_attribute_bound,
    consequences,
    count,
    enumerate_solutions,
    filter_features,
    first_solution,
    is_consistent,
    iterate,
    optimize,
    propagate,
)


def partial(select="", exclude=""):
    return PartialConfiguration(frozenset(select), frozenset(exclude))


SOLVER_ORDER = [
    frozenset("RAE"), frozenset("RAD"), frozenset("RAC"), frozenset("RACE"),
    frozenset("RACD"), frozenset("RABC"), frozenset("RABCE"), frozenset("RABCD"),
]


class TestPropagate:
    def test_select_e(self, press_system):
        a = propagate(press_system, partial(select="E"))
        assert isinstance(a, Assignment)
        assert a.decided_in() == frozenset("RAE")
        assert a.decided_out() == frozenset("D")
        assert a.undecided() == frozenset("BC")

    def test_exclude_group_conflict(self, press_system):
        c = propagate(press_system, partial(exclude="CDE"))
        assert isinstance(c, Conflict)
        assert c.provenance == "group g1 min"
        assert any(t.feature == "R" and t.value == 1 for t in c.trail)

    def test_root_only_all_decided(self):
        m = parse_model(SourceDocument.from_text("root R"))
        a = propagate(compile_model(m))
        assert a.values == {"R": 1}

    def test_contradictory_partial_rejected(self, press_system):
        with pytest.raises(ValueError):
            propagate(press_system, PartialConfiguration(frozenset("D"), frozenset("D")))

    def test_unknown_feature_rejected(self, press_system):
        with pytest.raises(UnknownFeatureError):
            propagate(press_system, partial(select="Z"))


class TestSearch:
    def test_first_empty(self, press_system):
        assert first_solution(press_system) == frozenset("RAE")

    def test_first_with_b(self, press_system):
        assert first_solution(press_system, partial(select="B")) == frozenset("RABC")

    def test_mutex_unsat(self, press_system):
        outcome = first_solution(press_system, partial(select="DE"))
        assert isinstance(outcome, Unsat)
        assert outcome.conflict.provenance == "mutex D E"

    def test_solution_order_and_exhaustion(self, press_system):
        cursor = iterate(press_system)
        seen = []
        while True:
            solution = cursor.next_solution()
            if solution is None:
                break
            seen.append(solution)
        assert seen == SOLVER_ORDER
        assert cursor.next_solution() is None

    def test_single_root_exhausts(self):
        m = parse_model(SourceDocument.from_text("root R"))
        cursor = iterate(compile_model(m))
        assert cursor.next_solution() == frozenset("R")
        assert cursor.next_solution() is None

    def test_stale_cursor(self, press_system):
        cursor = iterate(press_system)
        cursor.next_solution()
        add_attribute_bound(press_system, "cost", "<=", 5)
        with pytest.raises(StaleCursorError):
            cursor.next_solution()


class TestEnumerate:
    def test_all(self, press_system, press_solutions):
        assert set(enumerate_solutions(press_system)) == press_solutions

    def test_inclusion(self, press_system):
        sols = enumerate_solutions(press_system, partial(select="B"))
        assert set(sols) == {frozenset("RABC"), frozenset("RABCD"), frozenset("RABCE")}

    def test_exclusion(self, press_system):
        sols = enumerate_solutions(press_system, partial(exclude="C"))
        assert set(sols) == {frozenset("RAD"), frozenset("RAE")}

    def test_limit(self, press_system):
        assert enumerate_solutions(press_system, limit=2) == SOLVER_ORDER[:2]

    def test_preserved_under_propagation(self, press_system):
        base = partial(select="E")
        a = propagate(press_system, base)
        propagated = PartialConfiguration(a.decided_in(), a.decided_out())
        assert set(enumerate_solutions(press_system, base)) == set(
            enumerate_solutions(press_system, propagated))


class TestCount:
    def test_total(self, press_system):
        assert count(press_system) == 8

    def test_with_d(self, press_system, press_solutions):
        expected = sum(1 for s in press_solutions if "D" in s)
        assert expected == 3  # {R,A,D}, {R,A,C,D}, {R,A,B,C,D}
        assert count(press_system, partial(select="D")) == expected

    def test_unsat_partial(self, press_system):
        assert count(press_system, partial(select="DE")) == 0


class TestConsequences:
    def test_probing_select_e(self, press_system):
        c = consequences(press_system, partial(select="E"), depth="probing")
        assert c.forced_in == frozenset("RAE")
        assert c.forced_out == frozenset("D")
        assert c.open == frozenset("BC")
        assert c.status == "consistent"

    def test_probing_empty(self, press_system):
        c = consequences(press_system, depth="probing")
        assert c.forced_in == frozenset("RA")
        assert c.forced_out == frozenset()
        assert c.open == frozenset("BCDE")

    def test_conflict_status(self, press_system):
        c = consequences(press_system, partial(select="DE"))
        assert c.status == "conflict"
        assert c.conflict.provenance == "mutex D E"

    def test_probing_beats_propagation(self):
        # B requires C and B requires D with mutex C D: propagation alone
        # cannot see that B is impossible; probing must.
        text = ("root R\noptional R B\noptional R C\noptional R D\n"
                "requires B C\nrequires B D\nmutex C D")
        system = compile_model(parse_model(SourceDocument.from_text(text)))
        prop = consequences(system, depth="propagation")
        probe = consequences(system, depth="probing")
        assert "B" in prop.open
        assert "B" in probe.forced_out


class TestIsConsistent:
    def test_mutex_blocks(self, press_system):
        ok, conflict = is_consistent(press_system, partial(select="E"), ("D", "in"))
        assert not ok
        assert conflict.provenance == "mutex D E"

    def test_witness_exists(self, press_system):
        ok, conflict = is_consistent(press_system, partial(select="E"), ("B", "in"))
        assert ok and conflict is None

    def test_mandatory_core(self, press_system):
        ok, conflict = is_consistent(press_system, partial(), ("A", "out"))
        assert not ok
        assert conflict.provenance == "mandatory R A"

    def test_decision_contradiction(self, press_system):
        ok, conflict = is_consistent(press_system, partial(exclude="B"), ("B", "in"))
        assert not ok
        assert conflict.provenance == "decision contradiction"


class TestOptimize:
    def test_min_cost(self, press_model, press_system):
        objective = Objective.from_model(press_model, "cost", "minimize")
        assert optimize(press_system, None, objective) == (frozenset("RAD"), Fraction(4))

    def test_min_cost_with_b(self, press_model, press_system):
        objective = Objective.from_model(press_model, "cost", "minimize")
        assert optimize(press_system, partial(select="B"), objective) == (
            frozenset("RABC"), Fraction(8))

    def test_feature_count_tie_breaks_to_enumeration_order(self, press_model, press_system):
        objective = Objective.feature_count(press_model)
        assert optimize(press_system, None, objective) == (frozenset("RAE"), Fraction(3))

    def test_maximize(self, press_model, press_system):
        objective = Objective.from_model(press_model, "cost", "maximize")
        configuration, value = optimize(press_system, None, objective)
        assert value == Fraction(12)
        assert configuration == frozenset("RABCE")

    def test_unsat(self, press_model, press_system):
        objective = Objective.from_model(press_model, "cost", "minimize")
        assert isinstance(optimize(press_system, partial(select="DE"), objective), Unsat)


class TestAttributeQueries:
    def test_filter_lt(self, press_model):
        assert filter_features(press_model, "cost", "<", 5) == frozenset("RABDE")

    def test_filter_ge(self, press_model):
        assert filter_features(press_model, "cost", ">=", 5) == frozenset("C")

    def test_filter_absent_attribute_defaults_zero(self, press_model):
        assert filter_features(press_model, "weight", "<", 1) == press_model.feature_set

    def test_bound_cost_5(self, press_system):
        add_attribute_bound(press_system, "cost", "<=", 5)
        assert count(press_system) == 2
        assert set(enumerate_solutions(press_system)) == {frozenset("RAD"), frozenset("RAE")}

    def test_bound_cost_0_unsat(self, press_system):
        add_attribute_bound(press_system, "cost", "<=", 0)
        assert isinstance(first_solution(press_system), Unsat)

    def test_bound_slack(self, press_system):
        add_attribute_bound(press_system, "cost", "<=", 100)
        assert count(press_system) == 8

    def test_bound_ge(self, press_system):
        add_attribute_bound(press_system, "cost", ">=", 10)
        assert set(enumerate_solutions(press_system)) == {
            frozenset("RACE"), frozenset("RABCD"), frozenset("RABCE")}

    def test_rational_bound(self, press_system):
        add_attribute_bound(press_system, "cost", "<=", Fraction(9, 2))
        assert set(enumerate_solutions(press_system)) == {frozenset("RAD")}


class TestDeterminism:
    def test_same_inputs_same_order(self, press_system):
        first = enumerate_solutions(press_system, partial(select="B"))
        second = enumerate_solutions(press_system, partial(select="B"))
        assert first == second

    def test_no_repeats_on_corpus(self, small_corpus):
        for model, _ in small_corpus:
            sols = enumerate_solutions(compile_model(model))
            assert len(sols) == len(set(sols))


class TestSoundnessSpotChecks:
    def test_propagation_sound_on_corpus(self, small_corpus):
        rng = random.Random(99)
        for model, brute in small_corpus[:30]:
            system = compile_model(model)
            ids = list(model.feature_ids)
            for _ in range(5):
                chosen = rng.sample(ids, rng.randint(0, min(3, len(ids))))
                inc = frozenset(f for f in chosen if rng.random() < 0.5)
                exc = frozenset(chosen) - inc
                p = PartialConfiguration(inc, exc)
                remaining = [s for s in brute if inc <= s and not (exc & s)]
                outcome = propagate(system, p)
                if isinstance(outcome, Conflict):
                    assert remaining == []
                    continue
                for s in remaining:
                    assert outcome.decided_in() <= s
                    assert not (outcome.decided_out() & s)
