from app.services.problems.base import (
    AnalyticProblem,
    LossWeights,
    PdeProblem,
    ProblemDefaults,
    ReferenceDataError,
    TestGrid,
)
from app.services.problems.reference import GridReference, load_grid_reference, write_grid_reference
from app.services.problems.registry import PROBLEM_NAMES, make_problem, normalize_problem_name
