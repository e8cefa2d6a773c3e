from app.services.errormap.grid import (
    ErrorMapError,
    GridErrorMap,
    NormalizedErrorMap,
    cell_centers,
    nearest_value,
)
from app.services.errormap.arff import (
    ArffParams,
    BisectionBounds,
    CalibratedNodes,
    arff,
    calibrated_arff,
    radius_field_from,
    standardize_combine,
)
