"""Conditional term rewriting with retained side conditions.

Rules carry proved properties forward as `(rp 'prop x)` wrappers so later
hypotheses are relieved by lookup instead of backchaining; a parallel
dont-rw structure stops re-rewriting of rule outputs; quoted-key alists are
shadowed by constant-time lookup tables.
"""

from .evaluator import (
    EvalDomainError,
    EvalError,
    ExecRegistry,
    UnboundVariableError,
    UnknownFunctionError,
    default_registry,
    eval_term,
)
from .falist import fa_acons, fa_free, fa_get, falist_shadow, make_linear_get_meta
from .meta import MetaRegistry, MetaRule
from .rewriter import (
    OPEN,
    STOP,
    Context,
    DontRw,
    Leaf,
    Node,
    RewriteConfig,
    Rewriter,
    RewriteStats,
    dont_rw_from_template,
    dont_rw_from_value,
    unify,
)
from .rules import (
    AttachError,
    Rule,
    RuleFileError,
    RuleSet,
    Syntaxp,
    attach_sc,
    build_ruleset,
    defthm_lambda,
    parse_rule_file,
    validate_rule,
)
from .terms import (
    App,
    BetaReductionError,
    Cons,
    FalistShadow,
    LambdaApp,
    NIL_TERM,
    ParseError,
    Quote,
    T_TERM,
    Var,
    beta_reduce,
    format_term,
    format_value,
    parse_term,
    read_value,
    read_values,
    rp_termp,
    strip_rp,
    strip_rp_deep,
    substitute,
    term_from_value,
    term_to_value,
    trans_list,
)
from .util import run_deep
from .validate import (
    ValidityReport,
    check_preservation,
    check_run,
    sample_rule_soundness,
    valid_sc,
)

__version__ = "0.1.0"

__all__ = [
    "App",
    "AttachError",
    "BetaReductionError",
    "Cons",
    "Context",
    "DontRw",
    "EvalDomainError",
    "EvalError",
    "ExecRegistry",
    "FalistShadow",
    "LambdaApp",
    "Leaf",
    "MetaRegistry",
    "MetaRule",
    "NIL_TERM",
    "Node",
    "OPEN",
    "ParseError",
    "Quote",
    "RewriteConfig",
    "RewriteStats",
    "Rewriter",
    "Rule",
    "RuleFileError",
    "RuleSet",
    "STOP",
    "Syntaxp",
    "T_TERM",
    "UnboundVariableError",
    "UnknownFunctionError",
    "ValidityReport",
    "Var",
    "attach_sc",
    "beta_reduce",
    "build_ruleset",
    "check_preservation",
    "check_run",
    "default_registry",
    "defthm_lambda",
    "dont_rw_from_template",
    "dont_rw_from_value",
    "eval_term",
    "fa_acons",
    "fa_free",
    "fa_get",
    "falist_shadow",
    "format_term",
    "format_value",
    "make_linear_get_meta",
    "parse_rule_file",
    "parse_term",
    "read_value",
    "read_values",
    "rp_termp",
    "run_deep",
    "sample_rule_soundness",
    "strip_rp",
    "strip_rp_deep",
    "substitute",
    "term_from_value",
    "term_to_value",
    "trans_list",
    "unify",
    "valid_sc",
    "validate_rule",
]
