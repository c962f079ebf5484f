"""Term normalization shared by the model parser and the matcher.

A term bag is a plain ``frozenset`` of lowercase tokens. Normalization is
deliberately simple (no stemming, no stop words) so that every similarity
score can be audited by hand.
"""

from __future__ import annotations

import re

TermBag = frozenset

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def normalize_term(token: str) -> str:
    """Lowercase a single already-split token."""
    return token.lower()


def tokenize(text: str) -> TermBag:
    """Split on non-alphanumerics, lowercase, drop tokens of length <= 1."""
    return frozenset(t for t in _TOKEN_RE.findall(text.lower()) if len(t) > 1)
