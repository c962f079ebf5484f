"""Walkthrough: matching stakeholder requirements against the product line
with the adapted Dice / Jaccard / Cosine ratios over a term lexicon.

Run:  python demos/03_requirements_matching.py
"""

from fractions import Fraction

from plkit import Lexicon, cosine, dice, jaccard, match, parse_model, sim
from plkit.modelio import SourceDocument, parse_requirements

lexicon = Lexicon(
    a=Fraction("0.1"),
    b=Fraction("0.25"),
    hyponym_of=frozenset({("plasma", "blood")}),  # plasma is a kind of blood
)

print("term-level similarity under the lexicon:")
for pair in (("measure", "measure"), ("plasma", "blood"), ("blood", "plasma"),
             ("measure", "blood")):
    print(f"  sim{pair} = {sim(*pair, lexicon)}")

a = frozenset({"measure", "plasma"})
b = frozenset({"measure", "blood"})
print(f"\nbag-level ratios for {sorted(a)} vs {sorted(b)}:")
print(f"  dice    = {dice(a, b, lexicon)}")
print(f"  jaccard = {jaccard(a, b, lexicon)}")
print(f"  cosine  = {cosine(a, b, lexicon)}")

model = parse_model(SourceDocument.from_path("tests/fixtures/press_match.fm"))
requirements = parse_requirements(SourceDocument.from_text(
    "req S1 must measure plasma\n"
    "req S2 want calibrate results\n", origin="demo"))

report = match(requirements, model, lexicon, "dice",
               threshold_match=Fraction("0.5"), threshold_gap=Fraction("0.1"))

print(f"\nmatch report (metric={report.metric}, a={report.a}, b={report.b}):")
for entry in report.sorted_entries():
    if entry.score > 0:
        print(f"  {entry.requirement} ~ {entry.feature}: {entry.score}")
for rid, classification in sorted(report.classification.items()):
    if classification.kind == "matched":
        print(f"  {rid} -> matched feature {classification.features[0]}")
    elif classification.kind == "ambiguous":
        print(f"  {rid} -> ambiguous between {', '.join(classification.features)}")
    else:
        print(f"  {rid} -> unmatched; candidate for capitalizing into the product line")
