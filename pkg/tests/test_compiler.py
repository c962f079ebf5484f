from plkit.compiler import compile_model, dump_system, render_constraint
from plkit.solver import enumerate_solutions


def constraint_count(model) -> int:
    return (1 + sum(1 for _ in model.edges)
            + sum(len(g.members) + 2 for g in model.groups)
            + len(model.constraints))


class TestCompile:
    def test_press_constraint_count(self, press_model):
        # 1 root + 1 composition + 1 option + (3 members + 2 cardinality) + 1
        # requires + 1 mutex
        system = compile_model(press_model)
        assert len(system.constraints) == 10
        assert len(system.constraints) == constraint_count(press_model)

    def test_optional_edge_rule(self, press_system):
        rendered = {c.provenance: render_constraint(c) for c in press_system.constraints}
        assert rendered["optional R B"] == "B <= R"

    def test_mutex_rule(self, press_system):
        rendered = {c.provenance: render_constraint(c) for c in press_system.constraints}
        assert rendered["mutex D E"] == "D + E <= 1"

    def test_mandatory_requires_and_root(self, press_system):
        rendered = {c.provenance: render_constraint(c) for c in press_system.constraints}
        assert rendered["root"] == "R = 1"
        assert rendered["mandatory R A"] == "R = A"
        assert rendered["requires B C"] == "B <= C"

    def test_group_rules(self, press_system):
        rendered = {c.provenance: render_constraint(c) for c in press_system.constraints}
        assert rendered["group g1 min"] == "1*R <= C + D + E"
        assert rendered["group g1 max"] == "C + D + E <= 2"
        assert rendered["member g1 C"] == "C <= R"

    def test_count_formula_on_corpus(self, small_corpus):
        for model, _ in small_corpus:
            assert len(compile_model(model).constraints) == constraint_count(model)

    def test_provenance_complete(self, press_system):
        assert all(c.provenance for c in press_system.constraints)
        assert len(press_system.provenance()) == len(press_system.constraints)


class TestDump:
    def test_press_dump(self, press_system):
        lines = dump_system(press_system).lines
        assert len(lines) == 10
        assert lines[0] == "R = 1  # root"
        assert "D + E <= 1  # mutex D E" in lines
        assert "1*R <= C + D + E  # group g1 min" in lines
        assert "C + D + E <= 2  # group g1 max" in lines

    def test_root_only(self):
        from plkit.model import Feature, FeatureModel

        m = FeatureModel(name="S", root="R", features=(Feature("R"),), edges=(),
                         groups=(), constraints=())
        assert dump_system(compile_model(m)).lines == ("R = 1  # root",)


class TestSemanticEquivalence:
    def test_solutions_equal_brute_force(self, small_corpus):
        """The keystone property: compiled solutions are exactly the valid
        configurations of the direct oracle."""
        for model, brute in small_corpus:
            assert set(enumerate_solutions(compile_model(model))) == brute
