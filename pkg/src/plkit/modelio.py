"""Line-oriented DSL and JSON serialization for models, requirements, lexicons.

The DSL is one directive per line, `#` starts a comment, tokens are
whitespace-separated. Resolution is two-pass: a feature is declared by its
first mention anywhere, so cross-tree constraints may precede the tree.
Serialization is canonical: re-parsing a serialized model reproduces it
structurally, and serializing a canonical document is idempotent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .matcher import Lexicon
from .model import (
    CrossTreeConstraint,
    DecompositionEdge,
    Feature,
    FeatureModel,
    Group,
    ID_RE,
    ModelDraft,
    structural_issues,
)
from .rational import format_rational, parse_rational
from .terms import TermBag, tokenize

_INT_RE = re.compile(r"^[+-]?\d+$")

DIRECTIVES = (
    "model", "root", "mandatory", "optional", "group", "member",
    "requires", "mutex", "attr", "terms",
)


class ParseError(ValueError):
    """A syntax or semantic error, pointing at the offending 1-based line."""

    def __init__(self, message: str, line: int, column: Optional[int] = None, origin: str = "<inline>"):
        self.message = message
        self.line = line
        self.column = column
        self.origin = origin
        where = f"{origin}:{line}"
        if column is not None:
            where += f":{column}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class SourceDocument:
    lines: tuple
    origin: str = "<inline>"

    @classmethod
    def from_text(cls, text: str, origin: str = "<inline>") -> "SourceDocument":
        return cls(tuple(text.splitlines()), origin)

    @classmethod
    def from_path(cls, path) -> "SourceDocument":
        text = Path(path).read_text(encoding="utf-8")
        return cls(tuple(text.splitlines()), str(path))

    @property
    def text(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")


@dataclass(frozen=True)
class StakeholderRequirement:
    id: str
    terms: TermBag
    priority: Optional[str] = None  # "must" | "want" | None


def _tokens(line: str):
    """(token, 1-based column) pairs, comment stripped."""
    code = line.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", code)]


@dataclass
class _SourceMap:
    """Line bookkeeping so structural issues can point at source lines."""

    origin: str = "<inline>"
    first_mention: dict = field(default_factory=dict)
    attachment_lines: dict = field(default_factory=dict)
    group_lines: dict = field(default_factory=dict)
    arc_lines: list = field(default_factory=list)

    def line_for_issue(self, issue) -> int:
        code, subjects = issue.code, issue.subjects
        if code in ("DUP_CARD", "CARD_RANGE", "GROUP_SIZE") and subjects:
            lines = self.group_lines.get(subjects[0])
            if lines:
                return lines[-1] if code == "DUP_CARD" else lines[0]
        if code in ("MULTI_ATTACH", "ROOT_ATTACHED") and subjects:
            lines = self.attachment_lines.get(subjects[0])
            if lines:
                return lines[-1] if code == "MULTI_ATTACH" else lines[0]
        if code == "CYCLE":
            members = set(subjects)
            for (parent, child), line in self.arc_lines:
                if parent in members and child in members:
                    return line
        for subject in subjects:
            if subject in self.first_mention:
                return self.first_mention[subject]
        return 1


class _ModelParser:
    def __init__(self, doc: SourceDocument):
        self.doc = doc
        self.draft = ModelDraft()
        self.srcmap = _SourceMap(origin=doc.origin)
        self.feature_order = []
        self.attrs = {}
        self.attr_lines = {}
        self.explicit_terms = {}
        self.members = {}  # group id -> [(feature, line)]
        self.member_lines = []
        self.group_meta = {}  # group id -> (parent, min, max)
        self.have_model_line = False
        self.root_line = None

    def fail(self, message, line, column=None):
        raise ParseError(message, line, column, self.doc.origin)

    def mention(self, token, line, column):
        if not ID_RE.match(token):
            self.fail(f"bad identifier {token!r}", line, column)
        if token not in self.srcmap.first_mention:
            self.srcmap.first_mention[token] = line
            self.feature_order.append(token)
        return token

    def attach(self, feature, line):
        self.srcmap.attachment_lines.setdefault(feature, []).append(line)

    def parse(self) -> tuple:
        for lineno, raw in enumerate(self.doc.lines, start=1):
            tokens = _tokens(raw)
            if not tokens:
                continue
            directive, col = tokens[0]
            handler = getattr(self, f"_dir_{directive}", None)
            if handler is None:
                self.fail(f"unknown directive {directive!r}; expected one of: " + ", ".join(DIRECTIVES),
                          lineno, col)
            handler(tokens[1:], lineno)
        self._assemble()
        return self.draft, self.srcmap

    def _need(self, args, count, form, line):
        if len(args) != count:
            where = args[count][1] if len(args) > count else None
            self.fail(f"expected `{form}`", line, where)

    def _dir_model(self, args, line):
        self._need(args, 1, "model <name>", line)
        if self.have_model_line:
            self.fail("duplicate model directive", line)
        self.have_model_line = True
        self.draft.name = args[0][0]

    def _dir_root(self, args, line):
        self._need(args, 1, "root <feature>", line)
        if self.draft.root is not None:
            self.fail("duplicate root directive", line)
        self.draft.root = self.mention(args[0][0], line, args[0][1])
        self.root_line = line

    def _edge(self, kind, args, line):
        self._need(args, 2, f"{kind} <parent> <child>", line)
        parent = self.mention(args[0][0], line, args[0][1])
        child = self.mention(args[1][0], line, args[1][1])
        if parent == child:
            self.fail(f"{kind} edge relates {parent} to itself", line, args[1][1])
        self.draft.edges.append(DecompositionEdge(parent, child, kind))
        self.attach(child, line)
        self.srcmap.arc_lines.append(((parent, child), line))

    def _dir_mandatory(self, args, line):
        self._edge("mandatory", args, line)

    def _dir_optional(self, args, line):
        self._edge("optional", args, line)

    def _dir_group(self, args, line):
        self._need(args, 4, "group <parent> <groupid> <min> <max>", line)
        parent = self.mention(args[0][0], line, args[0][1])
        gid, gid_col = args[1]
        if not ID_RE.match(gid):
            self.fail(f"bad identifier {gid!r}", line, gid_col)
        if gid in self.group_meta:
            self.srcmap.group_lines[gid].append(line)
            self.fail(f"duplicate cardinality for {gid}", line, gid_col)
        bounds = []
        for token, col in args[2:]:
            if not _INT_RE.match(token):
                self.fail(f"expected an integer, got {token!r}", line, col)
            bounds.append(int(token))
        self.group_meta[gid] = (parent, bounds[0], bounds[1])
        self.srcmap.group_lines[gid] = [line]

    def _dir_member(self, args, line):
        self._need(args, 2, "member <groupid> <feature>", line)
        gid, gid_col = args[0]
        feature = self.mention(args[1][0], line, args[1][1])
        self.members.setdefault(gid, []).append(feature)
        self.member_lines.append((gid, gid_col, line))
        self.attach(feature, line)

    def _ctc(self, kind, args, line):
        self._need(args, 2, f"{kind} <a> <b>", line)
        a = self.mention(args[0][0], line, args[0][1])
        b = self.mention(args[1][0], line, args[1][1])
        if a == b:
            self.fail(f"{kind} relates {a} to itself", line, args[1][1])
        self.draft.constraints.append(CrossTreeConstraint(kind, a, b))

    def _dir_requires(self, args, line):
        self._ctc("requires", args, line)

    def _dir_mutex(self, args, line):
        self._ctc("mutex", args, line)

    def _dir_attr(self, args, line):
        self._need(args, 3, "attr <attrname> <feature> <rational>", line)
        name, name_col = args[0]
        if not ID_RE.match(name):
            self.fail(f"bad identifier {name!r}", line, name_col)
        feature = self.mention(args[1][0], line, args[1][1])
        value_token, value_col = args[2]
        try:
            value = parse_rational(value_token)
        except ValueError:
            self.fail(f"expected a rational literal, got {value_token!r}", line, value_col)
        key = (name, feature)
        if key in self.attrs:
            self.fail(f"duplicate attr {name} for {feature}", line, name_col)
        self.attrs[key] = value

    def _dir_terms(self, args, line):
        if len(args) < 2:
            self.fail("expected `terms <feature> <t1> ...`", line)
        feature = self.mention(args[0][0], line, args[0][1])
        if feature in self.explicit_terms:
            self.fail(f"duplicate terms for {feature}", line, args[0][1])
        bag = tokenize(" ".join(t for t, _ in args[1:]))
        if not bag:
            self.fail(f"terms for {feature} normalize to nothing", line)
        self.explicit_terms[feature] = bag

    def _assemble(self):
        for gid, gid_col, line in self.member_lines:
            if gid not in self.group_meta:
                self.fail(f"member references unknown group {gid}", line, gid_col)
        for gid, (parent, lo, hi) in self.group_meta.items():
            members = tuple(self.members.get(gid, ()))
            self.draft.groups.append(Group(gid, parent, members, lo, hi))
        for fid in self.feature_order:
            attrs = {name: value for (name, feature), value in self.attrs.items() if feature == fid}
            self.draft.features.append(
                Feature(fid, attributes=attrs, terms=self.explicit_terms.get(fid, frozenset()))
            )


def parse_draft(doc: SourceDocument) -> tuple:
    """Parse the directive grammar into a raw draft plus its source map.

    Only syntax-level and local semantic problems raise here; structural
    validation is the caller's job (`parse_model` does both).
    """
    return _ModelParser(doc).parse()


def parse_model(doc: SourceDocument) -> FeatureModel:
    """Parse and structurally validate; the first violated invariant raises
    a ParseError pointing at the offending line."""
    draft, srcmap = parse_draft(doc)
    issues = structural_issues(draft)
    if issues:
        first = min(issues, key=lambda i: (srcmap.line_for_issue(i), i.code))
        raise ParseError(f"{first.code}: {first.message}", srcmap.line_for_issue(first),
                         origin=doc.origin)
    return FeatureModel(
        name=draft.name,
        root=draft.root,
        features=tuple(draft.features),
        edges=tuple(draft.edges),
        groups=tuple(draft.groups),
        constraints=tuple(draft.constraints),
    )


def serialize_model(model: FeatureModel) -> SourceDocument:
    """Canonical text: model, root, edges, groups, members, constraints,
    attrs sorted by (attribute, feature), explicit terms last."""
    lines = []
    if model.name:
        lines.append(f"model {model.name}")
    lines.append(f"root {model.root}")
    for e in model.edges:
        lines.append(f"{e.kind} {e.parent} {e.child}")
    for g in model.groups:
        lines.append(f"group {g.parent} {g.id} {g.card_min} {g.card_max}")
    for g in model.groups:
        for m in g.members:
            lines.append(f"member {g.id} {m}")
    for c in model.constraints:
        lines.append(f"{c.kind} {c.a} {c.b}")
    attr_rows = []
    for f in model.features:
        for name, value in f.attributes.items():
            attr_rows.append((name, f.id, value))
    for name, fid, value in sorted(attr_rows, key=lambda row: (row[0], row[1])):
        lines.append(f"attr {name} {fid} {format_rational(value)}")
    for f in model.features:
        if f.terms != tokenize(f.display_name):
            lines.append(f"terms {f.id} " + " ".join(sorted(f.terms)))
    return SourceDocument(tuple(lines), origin=f"<serialized {model.name or 'model'}>")


def parse_requirements(doc: SourceDocument) -> list:
    """`req <id> [must|want] <t1> <t2> ...`, one requirement per line."""
    requirements = []
    seen = set()
    for lineno, raw in enumerate(doc.lines, start=1):
        tokens = _tokens(raw)
        if not tokens:
            continue
        directive, col = tokens[0]
        if directive != "req":
            raise ParseError(f"unknown directive {directive!r}; expected `req`", lineno, col, doc.origin)
        if len(tokens) < 3:
            raise ParseError("expected `req <id> [must|want] <t1> ...`", lineno, origin=doc.origin)
        rid, rid_col = tokens[1]
        if not ID_RE.match(rid):
            raise ParseError(f"bad identifier {rid!r}", lineno, rid_col, doc.origin)
        if rid in seen:
            raise ParseError(f"duplicate requirement id {rid}", lineno, rid_col, doc.origin)
        seen.add(rid)
        rest = tokens[2:]
        priority = None
        if rest and rest[0][0] in ("must", "want"):
            priority = rest[0][0]
            rest = rest[1:]
        bag = tokenize(" ".join(t for t, _ in rest))
        if not bag:
            raise ParseError(f"requirement {rid} has no terms after normalization", lineno, origin=doc.origin)
        requirements.append(StakeholderRequirement(rid, bag, priority))
    return requirements


def _single_term(token: str, lineno: int, col: int, origin: str) -> str:
    bag = tokenize(token)
    if len(bag) != 1:
        raise ParseError(f"{token!r} does not normalize to a single term", lineno, col, origin)
    return next(iter(bag))


def parse_lexicon(doc: SourceDocument) -> Lexicon:
    """`param a|b <v>`, `hom <t1> <t2>`, `hyp <child> <parent>`.

    Defaults a=0.1, b=0.25 apply when the parameters are absent; both must
    lie strictly between 0 and 1.
    """
    a = Fraction(1, 10)
    b = Fraction(1, 4)
    homonyms = set()
    hyponym_of = set()
    for lineno, raw in enumerate(doc.lines, start=1):
        tokens = _tokens(raw)
        if not tokens:
            continue
        directive, col = tokens[0]
        if directive == "param":
            if len(tokens) != 3 or tokens[1][0] not in ("a", "b"):
                raise ParseError("expected `param a|b <value>`", lineno, col, doc.origin)
            try:
                value = parse_rational(tokens[2][0])
            except ValueError:
                raise ParseError(f"expected a rational literal, got {tokens[2][0]!r}",
                                 lineno, tokens[2][1], doc.origin) from None
            if not (0 < value < 1):
                raise ParseError(f"parameter {tokens[1][0]} must lie strictly between 0 and 1",
                                 lineno, tokens[2][1], doc.origin)
            if tokens[1][0] == "a":
                a = value
            else:
                b = value
        elif directive in ("hom", "hyp"):
            if len(tokens) != 3:
                raise ParseError(f"expected `{directive} <t1> <t2>`", lineno, col, doc.origin)
            t1 = _single_term(tokens[1][0], lineno, tokens[1][1], doc.origin)
            t2 = _single_term(tokens[2][0], lineno, tokens[2][1], doc.origin)
            if t1 == t2:
                raise ParseError(f"{directive} must relate two distinct terms", lineno, col, doc.origin)
            if directive == "hom":
                homonyms.add(frozenset((t1, t2)))
            else:
                hyponym_of.add((t1, t2))
        else:
            raise ParseError(f"unknown directive {directive!r}; expected param, hom or hyp",
                             lineno, col, doc.origin)
    for pair in homonyms:
        t1, t2 = sorted(pair)
        if (t1, t2) in hyponym_of or (t2, t1) in hyponym_of:
            raise ParseError(f"{t1}/{t2} cannot be both homonyms and hyponyms", len(doc.lines) or 1,
                             origin=doc.origin)
    return Lexicon(a=a, b=b, homonyms=frozenset(homonyms), hyponym_of=frozenset(hyponym_of))


def model_to_json(model: FeatureModel) -> dict:
    """JSON mirror of the DSL: name, root, features[], edges[], groups[],
    constraints[], attrs{} with rational values as canonical strings."""
    attrs = {}
    for f in model.features:
        for name, value in f.attributes.items():
            attrs.setdefault(name, {})[f.id] = format_rational(value)
    features = []
    for f in model.features:
        entry = {"id": f.id}
        if f.terms != tokenize(f.display_name):
            entry["terms"] = sorted(f.terms)
        features.append(entry)
    return {
        "name": model.name,
        "root": model.root,
        "features": features,
        "edges": [{"kind": e.kind, "parent": e.parent, "child": e.child} for e in model.edges],
        "groups": [
            {"id": g.id, "parent": g.parent, "min": g.card_min, "max": g.card_max,
             "members": list(g.members)}
            for g in model.groups
        ],
        "constraints": [{"kind": c.kind, "a": c.a, "b": c.b} for c in model.constraints],
        "attrs": attrs,
    }


def _json_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise ValueError(f"not a rational value: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return parse_rational(value)
    raise ValueError(f"not a rational value: {value!r}")


def draft_from_json(payload: dict) -> ModelDraft:
    """Rebuild a raw draft from the JSON mirror; raises ValueError on shape
    problems (structural validation is separate)."""
    if not isinstance(payload, dict):
        raise ValueError("model JSON must be an object")
    draft = ModelDraft(name=str(payload.get("name", "")))
    root = payload.get("root")
    draft.root = str(root) if root is not None else None
    declared = []
    terms = {}
    for entry in payload.get("features", []):
        if isinstance(entry, str):
            fid, explicit = entry, None
        elif isinstance(entry, dict) and "id" in entry:
            fid, explicit = str(entry["id"]), entry.get("terms")
        else:
            raise ValueError(f"bad feature entry: {entry!r}")
        declared.append(fid)
        if explicit is not None:
            terms[fid] = frozenset(str(t) for t in explicit)
    attrs = payload.get("attrs", {})
    if not isinstance(attrs, dict):
        raise ValueError("attrs must be an object")
    per_feature = {}
    for name, values in attrs.items():
        if not isinstance(values, dict):
            raise ValueError(f"attrs.{name} must be an object")
        for fid, value in values.items():
            per_feature.setdefault(str(fid), {})[str(name)] = _json_rational(value)
    for e in payload.get("edges", []):
        draft.edges.append(DecompositionEdge(str(e["parent"]), str(e["child"]), str(e["kind"])))
    for g in payload.get("groups", []):
        draft.groups.append(
            Group(str(g["id"]), str(g["parent"]), tuple(str(m) for m in g.get("members", ())),
                  int(g["min"]), int(g["max"]))
        )
    for c in payload.get("constraints", []):
        draft.constraints.append(CrossTreeConstraint(str(c["kind"]), str(c["a"]), str(c["b"])))
    mentioned = []
    for fid in declared:
        mentioned.append(fid)
    if draft.root is not None:
        mentioned.append(draft.root)
    for e in draft.edges:
        mentioned.extend((e.parent, e.child))
    for g in draft.groups:
        mentioned.append(g.parent)
        mentioned.extend(g.members)
    for c in draft.constraints:
        mentioned.extend((c.a, c.b))
    mentioned.extend(per_feature)
    seen = set()
    for fid in mentioned:
        if fid not in seen:
            seen.add(fid)
            draft.features.append(
                Feature(fid, attributes=per_feature.get(fid, {}), terms=terms.get(fid, frozenset()))
            )
    return draft


def model_from_json(payload: dict) -> FeatureModel:
    draft = draft_from_json(payload)
    issues = structural_issues(draft)
    if issues:
        first = issues[0]
        raise ParseError(f"{first.code}: {first.message}", 1, origin="<json>")
    return FeatureModel(
        name=draft.name, root=draft.root, features=tuple(draft.features),
        edges=tuple(draft.edges), groups=tuple(draft.groups), constraints=tuple(draft.constraints),
    )
