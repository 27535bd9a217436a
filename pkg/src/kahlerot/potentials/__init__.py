from .catalog import CATALOG, catalog, load_potential  # noqa:F401
from .expression import Expr, evaluate, format_expr  # noqa:F401
from .parser import parse_expression  # noqa:F401
from .spec import (  # noqa:F401
    DomainCheck,
    DomainPredicate,
    PotentialSpec,
    eval_bundle,
    format_spec,
    in_domain,
    parse,
)
