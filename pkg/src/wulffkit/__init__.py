"""Wulff shapes of isotropic measures, extremal ellipsoids and the sharp
volume inequalities relating them."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .geometry import (  # noqa: E402
    Ellipsoid,
    FacetData,
    HPolytope,
    VPolytope,
    centroid,
    convex_hull,
    halfspace_to_vertices,
    polar,
    support_function,
    surface_area_measure,
    unit_ball_volume,
    volume,
)
from .measures import (  # noqa: E402
    DiscreteMeasure,
    LiftedMeasure,
    WeightFn,
    canonicalize,
    f_center_defect,
    gen_cube_measure,
    gen_random_isotropic_fcentered,
    gen_simplex_measure,
    is_even,
    isotropy_defect,
    l2_norm,
    lift,
    symmetrize,
)
from .reports import InequalityReport  # noqa: E402
from .wulff import (  # noqa: E402
    WulffShape,
    build_wulff,
    displacement,
    equality_case_detect,
    polar_wulff,
    thm_1_report,
    thm_2_report,
    thm_3_1_report,
    thm_3_2_report,
    thm_5_1_report,
)
from .ballbarthe import (  # noqa: E402
    TransportSpec,
    bb_report,
    gaussian_cdf,
    gaussian_quantile,
    transport_eval,
    transport_identity_check,
    transport_inverse,
)
from .bodies import (  # noqa: E402
    ConvexBody,
    SpMeasure,
    corollary_6_1_and_6_3_reports,
    corollary_reports,
    cube_body,
    e1_ellipsoid,
    e2_ellipsoid,
    ep_ellipsoid,
    gen_random_body,
    john_contact_certificate,
    john_ellipsoid,
    loewner_ellipsoid,
    regular_simplex_body,
    s2_isotropy_defect,
    sp_measure,
    vp_mixed_volume,
    wulff_reconstruction_check,
)
from .serialization import load_measure, save_measure, save_report  # noqa: E402
