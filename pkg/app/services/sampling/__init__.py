from app.services.sampling.base import (
    NodeSet,
    Point2,
    RadiusField,
    Rect,
    RngStream,
    SamplerKind,
    SamplingError,
    UNIT_SQUARE,
)
from app.services.sampling.advancing_front import ff_generate
from app.services.sampling.quality import (
    SpacingStats,
    filter_inside,
    nn_spacing_stats,
    star_discrepancy_bruteforce,
)
from app.services.sampling.samplers import (
    sample_hammersley,
    sample_lhs,
    sample_random,
    van_der_corput,
)
