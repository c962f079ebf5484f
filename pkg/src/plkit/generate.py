"""Random feature-model generation for testing and benchmarking.

`random_model` produces small structurally valid models with a random mix
of edge kinds, groups, cross-tree constraints and integer costs;
unsatisfiable combinations are allowed on purpose. `layered_model` builds a
larger bounded-depth model that stays satisfiable, for responsiveness
checks.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .model import CrossTreeConstraint, DecompositionEdge, Feature, FeatureModel, Group


def random_model(rng: random.Random, n_features: int, max_groups: int = 2,
                 max_requires: int = 3, max_mutex: int = 2,
                 cost_range: tuple = (0, 9), name: str = "random") -> FeatureModel:
    """A structurally valid model with `n_features` features.

    Groups are planned first (2-3 members each), the remaining features
    attach by mandatory/optional edges to already placed features, then
    random requires/mutex pairs and integer costs are layered on top.
    """
    ids = [f"F{i}" for i in range(n_features)]
    root = ids[0]
    placed = [root]
    unplaced = ids[1:]
    edges = []
    groups = []

    n_groups = rng.randint(0, max_groups)
    for g in range(n_groups):
        size = rng.randint(2, 3)
        if len(unplaced) < size:
            break
        members = [unplaced.pop(0) for _ in range(size)]
        parent = rng.choice(placed)
        lo = rng.randint(1, size)
        hi = rng.randint(lo, size)
        groups.append(Group(f"g{g}", parent, tuple(members), lo, hi))
        placed.extend(members)

    while unplaced:
        child = unplaced.pop(0)
        parent = rng.choice(placed)
        kind = rng.choice(("mandatory", "optional"))
        edges.append(DecompositionEdge(parent, child, kind))
        placed.append(child)

    constraints = []
    seen_pairs = set()
    for kind, budget in (("requires", rng.randint(0, max_requires)),
                         ("mutex", rng.randint(0, max_mutex))):
        for _ in range(budget):
            a, b = rng.sample(ids, 2)
            if (kind, a, b) in seen_pairs or (kind == "mutex" and (kind, b, a) in seen_pairs):
                continue
            seen_pairs.add((kind, a, b))
            constraints.append(CrossTreeConstraint(kind, a, b))

    lo, hi = cost_range
    features = [Feature(fid, attributes={"cost": Fraction(rng.randint(lo, hi))}) for fid in ids]
    return FeatureModel(name=name, root=root, features=tuple(features),
                        edges=tuple(edges), groups=tuple(groups),
                        constraints=tuple(constraints))


def layered_model(n_features: int = 200, depth: int = 6, n_groups: int = 20,
                  n_constraints: int = 30, seed: int = 7,
                  name: str = "layered") -> FeatureModel:
    """A bounded-depth model that keeps at least one valid configuration.

    Mutex pairs are drawn between optional-subtree features only and
    requires edges point at features forced by the mandatory core or at
    optional features outside the source's mutex partners, so the model
    stays satisfiable by construction of the generator.
    """
    rng = random.Random(seed)
    ids = [f"N{i}" for i in range(n_features)]
    root = ids[0]
    levels = {root: 0}
    placed = [root]
    unplaced = ids[1:]
    edges = []
    groups = []
    optional_side = []  # features deletable without breaking the core

    for g in range(n_groups):
        size = rng.randint(2, 4)
        if len(unplaced) < size:
            break
        candidates = [p for p in placed if levels[p] < depth - 1]
        parent = rng.choice(candidates)
        members = [unplaced.pop(0) for _ in range(size)]
        lo = 1
        hi = rng.randint(1, size)
        groups.append(Group(f"g{g}", parent, tuple(members), lo, hi))
        for m in members:
            levels[m] = levels[parent] + 1
            placed.append(m)
            optional_side.append(m)

    while unplaced:
        child = unplaced.pop(0)
        candidates = [p for p in placed if levels[p] < depth - 1]
        parent = rng.choice(candidates)
        kind = "mandatory" if rng.random() < 0.4 else "optional"
        edges.append(DecompositionEdge(parent, child, kind))
        levels[child] = levels[parent] + 1
        placed.append(child)
        if kind == "optional":
            optional_side.append(child)

    constraints = []
    used = set()
    attempts = 0
    while len(constraints) < n_constraints and attempts < n_constraints * 20:
        attempts += 1
        kind = "mutex" if rng.random() < 0.4 else "requires"
        if kind == "mutex":
            a, b = rng.sample(optional_side, 2)
        else:
            a = rng.choice(optional_side)
            b = rng.choice([f for f in placed if f != a])
        if (a, b) in used or (b, a) in used:
            continue
        used.add((a, b))
        constraints.append(CrossTreeConstraint(kind, a, b))

    features = [Feature(fid, attributes={"cost": Fraction(rng.randint(0, 9))}) for fid in ids]
    return FeatureModel(name=name, root=root, features=tuple(features),
                        edges=tuple(edges), groups=tuple(groups),
                        constraints=tuple(constraints))
