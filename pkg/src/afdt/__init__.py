"""Attack-fault-defense tree toolkit.

Model security-and-safety scenarios as one DAG mixing attack steps,
component failures, and defenses; compute minimal cut sets under any
defense configuration, map every cut to the defenses that remove or harden
it, and quantify the top-level event exactly or by Monte-Carlo.
"""

from .analysis import (
    CutSet,
    Hardening,
    ImpactEntry,
    McsFamily,
    brute_force_mcs,
    defense_impact,
    mcs_table,
    minimal_cut_sets,
)
from .dsl import (
    ParseError,
    ParseFailure,
    SourceSpan,
    from_json,
    parse,
    read_model_file,
    serialize,
    to_dot,
    to_json,
)
from .errors import (
    AfdtError,
    BadProbError,
    BudgetExceededError,
    InvalidModelError,
    MissingProbError,
    SchemaError,
    TooLargeError,
    TooManyDefensesError,
    UnknownDefenseError,
    UnknownLeafError,
)
from .model import (
    GateKind,
    LeafKind,
    LeafPartition,
    Model,
    Node,
    Violation,
    and_,
    bas,
    bcf,
    bds,
    evaluate,
    inh,
    leaves,
    or_,
    topological_order,
    validate,
    vot,
)
from .quant import (
    Method,
    ProbResult,
    defense_probability_sweep,
    tle_probability_exact,
    tle_probability_mc,
)

__version__ = "0.1.0"

__all__ = [
    "AfdtError",
    "BadProbError",
    "BudgetExceededError",
    "CutSet",
    "GateKind",
    "Hardening",
    "ImpactEntry",
    "InvalidModelError",
    "LeafKind",
    "LeafPartition",
    "McsFamily",
    "Method",
    "MissingProbError",
    "Model",
    "Node",
    "ParseError",
    "ParseFailure",
    "ProbResult",
    "SchemaError",
    "SourceSpan",
    "TooLargeError",
    "TooManyDefensesError",
    "UnknownDefenseError",
    "UnknownLeafError",
    "Violation",
    "and_",
    "bas",
    "bcf",
    "bds",
    "brute_force_mcs",
    "defense_impact",
    "defense_probability_sweep",
    "evaluate",
    "from_json",
    "inh",
    "leaves",
    "mcs_table",
    "minimal_cut_sets",
    "or_",
    "parse",
    "read_model_file",
    "serialize",
    "tle_probability_exact",
    "tle_probability_mc",
    "to_dot",
    "to_json",
    "topological_order",
    "validate",
    "vot",
]
