"""Walkthrough: an interactive derivation session, step by step: decide,
inspect consequences, probe what-ifs, undo, apply must-requirements,
complete optimally and export the product document.

Run:  python demos/04_derivation_session.py
"""

from fractions import Fraction

from plkit import Lexicon, Objective, export_product, match, new_session, parse_model
from plkit.modelio import SourceDocument, parse_requirements


def show(session, label):
    c = session.consequences
    print(f"{label}: status={session.status}")
    print(f"  in={sorted(c.forced_in)} out={sorted(c.forced_out)} open={sorted(c.open)}")


model = parse_model(SourceDocument.from_path("tests/fixtures/press_match.fm"))
session = new_session(model)
show(session, "fresh session")

print("\nwhat if we took D? (no commitment)")
hypothetical = session.what_if("D", "in")
print(f"  would force out {sorted(hypothetical.forced_out)},"
      f" leaving {sorted(hypothetical.open)} open")

session.decide("E", "in")
show(session, "\nafter deciding E in")

session.decide("B", "in")
show(session, "after deciding B in (requires pulls in C; nothing stays open)")

print("\nchanged our mind about B:")
session.undo()
show(session, "after undo")

print("\ncontradicting a forced value explains itself instead of refusing:")
session.decide("D", "in")
conflict = session.consequences.conflict
print(f"  conflict on: {conflict.provenance}")
for entry in conflict.trail:
    print(f"    {entry.feature} = {entry.value}  ({entry.reason})")
session.undo()

print("\nmust-requirements from stakeholders drive decisions through matching:")
requirements = parse_requirements(SourceDocument.from_text(
    "req M1 must cooler chiller\n"
    "req M2 must calibrate results\n", origin="demo"))
lexicon = Lexicon(b=Fraction("0.25"), hyponym_of=frozenset({("plasma", "blood")}))
report = match(requirements, model, lexicon)
session.apply_musts(requirements, report)
show(session, "after applying musts (M1 matched E; M2 unmatched)")
for warning in session.warnings:
    print(f"  warning: {warning}")

print("\ncomplete the product at minimal cost and export it:")
product = session.complete_optimal(Objective.from_model(model, "cost", "minimize"))
for line in export_product(product).lines:
    print(" ", line)
