"""Walkthrough: the selection-query catalogue over the compiled 0-1 system:
enumeration, inclusion/exclusion filters, consequence deduction,
attribute bounds and optimization.

Run:  python demos/02_selection_queries.py
"""

from fractions import Fraction

from plkit import (
    Objective,
    add_attribute_bound,
    compile_model,
    consequences,
    count,
    dump_system,
    enumerate_solutions,
    filter_features,
    first_solution,
    optimize,
    parse_model,
)
from plkit.model import PartialConfiguration
from plkit.modelio import SourceDocument

model = parse_model(SourceDocument.from_path("tests/fixtures/press.fm"))
system = compile_model(model)

print("the model compiles to one 0-1 constraint per element:")
for line in dump_system(system).lines:
    print(" ", line)

print(f"\nhow many products exist? {count(system)}")
print(f"first product in search order: {sorted(first_solution(system))}")

print("\nproducts that must include B:")
for config in enumerate_solutions(system, PartialConfiguration(frozenset('B'), frozenset())):
    print(" ", sorted(config))

print("\nproducts that must not include C:")
for config in enumerate_solutions(system, PartialConfiguration(frozenset(), frozenset('C'))):
    print(" ", sorted(config))

print("\nafter selecting E, what is already settled and what remains open?")
result = consequences(system, PartialConfiguration(frozenset("E"), frozenset()))
print(f"  in: {sorted(result.forced_in)}  out: {sorted(result.forced_out)}"
      f"  open: {sorted(result.open)}")

print("\nfeatures cheaper than 5:")
print(" ", sorted(filter_features(model, "cost", "<", 5)))

print("\ncheapest product overall:")
config, value = optimize(system, None, Objective.from_model(model, "cost", "minimize"))
print(f"  {sorted(config)} at cost {value}")

print("\nadd a budget of 5 and re-count:")
add_attribute_bound(system, "cost", "<=", Fraction(5))
print(f"  {count(system)} products remain:")
for config in enumerate_solutions(system):
    print("   ", sorted(config))
