"""Attack-fault-defense trees, the AFDL query logic and the LangAFDL language."""

from .afdt_format import load_afdt, parse_afdt_text, serialize_afdt
from .dot import export_dot
from .engine import (
    AnalysisResult,
    QuantDomain,
    Stats,
    check_exists,
    check_forall,
    enumerate_mrs,
    evaluate_query,
    quant_domain,
)
from .errors import (
    AfdlError,
    AfdtSyntaxError,
    DomainTooLarge,
    LexError,
    MissingScenario,
    NestedQuantifier,
    ParseError,
    TranslationError,
    UnboundNode,
    UndeclaredDecorator,
    UnknownIdentifier,
    UnknownNode,
    ValidationError,
)
from .lang import compile_lang, parse_query, tokenize, translate
from .logic import (
    And,
    Atom,
    Evidence,
    EvidenceMap,
    Formula,
    Implies,
    MrsPred,
    Not,
    Or,
    Policy,
    Query,
    QueryKind,
    Vot,
    apply_evidence,
    eval_formula,
    free_leaves,
    is_minimal_scenario,
)
from .model import (
    Afdt,
    CounterDecl,
    GateDecl,
    LeafDecl,
    Node,
    NodeType,
    RiskScenario,
    build_afdt,
    cone_of_influence,
    structure_eval,
)
from .oracle import oracle_eval, oracle_mrs
from .syntax import parse_afdl_query, parse_formula, render_formula, render_query

pretty_print_afdl = render_query

__version__ = "0.1.0"
