from enum import Enum


class DomainKind(str, Enum):
    ALL_SPACE = "all-space"
    HALF_SPACE = "half-space"
    STRICT_INEQUALITY = "strict-inequality"
    BOX = "box"


class DomainReason(str, Enum):
    OK = "ok"
    DOMAIN_PREDICATE = "domain-predicate"
    MARGIN = "margin"
    NOT_POSITIVE_DEFINITE = "not-positive-definite"
    NUMERICAL = "numerical"


class CostKind(str, Enum):
    PSI_COST = "psi-cost"
    D_ALPHA = "d-alpha"
    LOG_COST = "log-cost"
    ECF_COST = "ecf-cost"
    RAW = "raw"


class MtwRoute(str, Enum):
    DIRECT = "direct"
    POTENTIAL = "potential"
    CURVATURE = "curvature"


class CertifyMode(str, Enum):
    MTW0 = "mtw0"
    MTW_KAPPA = "mtw-kappa"
    NOAB = "noab"
    CROSS = "cross"

    @property
    def orthogonal(self) -> bool:
        return self is not CertifyMode.CROSS


class Verdict(str, Enum):
    HOLDS_EMPIRICALLY = "holds-empirically"
    VIOLATED = "violated"


class ConvexityMode(str, Enum):
    Y_RELATIVE_TO_X = "Y-relative-to-X"
    X_RELATIVE_TO_Y = "X-relative-to-Y"


class SolveMethod(str, Enum):
    EXACT = "exact"
    SINKHORN = "sinkhorn"


class SimplexDirection(str, Enum):
    TO_NATURAL = "to-natural"
    TO_WEIGHTS = "to-weights"


class SetKind(str, Enum):
    POLYTOPE = "polytope"
    POINTS = "points"
