"""Large-girth spanning subgraphs, Lipschitz subgraphs and bounded-displacement bijections.

The core is a variable-based local lemma resampling engine (:mod:`lipgirth.lll`)
driving subgraph extraction (:mod:`lipgirth.girth_subgraph`), the walk-power
Lipschitz pipeline (:mod:`lipgirth.lipschitz`), regularizing surgeries and the
two-factor bijections (:mod:`lipgirth.regularize`), and expansion-driven
matchings (:mod:`lipgirth.matching`). :mod:`lipgirth.verify` rechecks every
artifact from its file.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("lipgirth")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

from .errors import (
    CertificateError,
    LipgirthError,
    NonTerminationError,
    ParameterError,
    PreconditionError,
    StageError,
)
from .graph import Graph, generate, random_regular
from .girth_subgraph import ExtractionParams, extract
from .lipschitz import compute_L, lipschitz_extract
from .regularize import build_f2, regularize, word_check
from .matching import build_z_action, match_to_completion, orient_matching_lll

__all__ = [
    "__version__",
    "Graph",
    "generate",
    "random_regular",
    "ExtractionParams",
    "extract",
    "compute_L",
    "lipschitz_extract",
    "regularize",
    "build_f2",
    "word_check",
    "match_to_completion",
    "orient_matching_lll",
    "build_z_action",
    "LipgirthError",
    "ParameterError",
    "PreconditionError",
    "NonTerminationError",
    "CertificateError",
    "StageError",
]
