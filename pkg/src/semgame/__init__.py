"""Model checking for first-order logic over partial structures, and for
its game-evaluated extension with model mutation and self-referential
claims: a compositional two-judgment evaluator, an exact game solver, a
budgeted semi-decision solver, a Turing-machine correspondence harness,
and interactive play over a CLI and an HTTP session service.
"""

from .game import (
    DEFAULT_CONFIG,
    GameConfig,
    Move,
    Position,
    Role,
    Terminal,
    Winner,
    adjudicate_atom,
    apply_move,
    initial_position,
    legal_moves,
    position_hash,
    position_key,
)
from .semantics import TruthStatus, UnsupportedConstructError, evaluate
from .solver import (
    BruteOutcome,
    ContainsInsertError,
    Outcome,
    Trace,
    Verdict,
    brute_force_enumerate,
    extract_trace,
    solve_auto,
    solve_bounded,
    solve_exact,
)
from .structure import (
    Assignment,
    ModelFormatError,
    PartialStructure,
    RelStatus,
    delete_element,
    delete_tuple,
    encode_model,
    eval_term,
    insert_element,
    insert_tuple,
    make_structure,
    parse_model,
)
from .syntax import (
    Formula,
    FormulaTable,
    ParseError,
    Term,
    Vocabulary,
    index_subformulas,
    parse_formula,
    print_formula,
    render_natural_language,
)
from .tm import (
    CorrespondenceReport,
    TMOutcome,
    TuringMachine,
    check_correspondence,
    curated_pairs,
    parse_machine,
    run_tm,
)

__version__ = "0.1.0"
