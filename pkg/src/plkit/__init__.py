"""plkit: a product-line derivation toolkit.

Feature models compile into 0-1 constraint systems; a propagation-based
boolean solver answers validity, configuration and optimization queries;
parameterized similarity metrics match stakeholder requirements to the
product line; a session engine drives interactive derivation; a CLI and an
HTTP service expose everything.
"""

from .compiler import ConstraintSystem, LinearConstraint, Var, compile_model, dump_system
from .matcher import (
    Lexicon,
    MatchReport,
    cosine,
    dice,
    jaccard,
    match,
    sim,
)
from .model import (
    Configuration,
    CrossTreeConstraint,
    DecompositionEdge,
    Feature,
    FeatureModel,
    Group,
    InvalidModelError,
    ModelDraft,
    PartialConfiguration,
    UnknownFeatureError,
    enumerate_brute_force,
    is_valid_configuration,
)
from .modelio import (
    ParseError,
    SourceDocument,
    StakeholderRequirement,
    model_from_json,
    model_to_json,
    parse_lexicon,
    parse_model,
    parse_requirements,
    serialize_model,
)
from .session import (
    DerivationSession,
    DerivedProduct,
    SessionError,
    apply_musts,
    complete_optimal,
    decide,
    export_product,
    new_session,
    undo,
    what_if,
)
from .solver import (
    Assignment,
    Conflict,
    Consequences,
    Objective,
    SolutionCursor,
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
    next_solution,
    optimize,
    propagate,
)
from .validator import (
    Diagnostic,
    check_anomalies,
    check_contradictions,
    check_satisfiable,
    check_structure,
    validate_model,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
