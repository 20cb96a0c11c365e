# ---------------------------------------------------------
# Gridfree: gridless single-snapshot DOA estimation for
# planar arrays of arbitrary geometry.
# ---------------------------------------------------------

__version__ = "1.0.0"

from .interface import estimate
from .interface import run_preset
from .interface import run_scenario
from .interface import main
from .utils import GridfreeError
from .utils import StageError
from .pipeline import EstimatorConfig
from .pipeline import SourceEstimate

from . import geometry
from . import manifold
from . import conic
from . import poly
from . import prune
from . import pipeline
from . import simulate
from . import benchmark
from . import files
from . import svg
from . import utils
