from .certify import Certificate, CertifyBudget, certify, certify_psi  # noqa:F401
from .cgeometry import (  # noqa:F401
    ConvexityReport,
    c_exp,
    c_momentum,
    c_segment,
    c_segment_path,
    check_c_convexity,
)
from .cli.__main__ import main as cli  # noqa:F401
from .cli.__main__ import run  # noqa:F401
from .config import *  # noqa:F401, F403
from .costs import CostSpec, cost_value, d_alpha_cost, load_cost, log_cost, psi_cost  # noqa:F401
from .errors import *  # noqa:F401, F403
from .hessian import (  # noqa:F401
    dual_geodesic,
    from_dual,
    legendre_value,
    metric_point,
    riemann,
    to_dual,
)
from .kahler import (  # noqa:F401
    anti_bisectional,
    bisectional,
    holomorphic_sectional,
    kahler_curvature,
    orthogonal_anti_bisectional,
)
from .mtw import cross_curvature, mtw_curvature, mtw_direct, mtw_potential  # noqa:F401
from .potentials import catalog, load_potential, parse  # noqa:F401
from .transport import *  # noqa:F401, F403
