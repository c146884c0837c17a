"""ergolab: exact-arithmetic laws of Birkhoff sums over the dyadic odometer.

The package builds measurable subsets of [0, 1) whose normalized centered
Birkhoff sums under the von Neumann-Kakutani odometer realize prescribed
limit laws at prescribed times, and certifies every bound with exact
rational arithmetic.
"""

from .construct import (
    ConstructionCertificate,
    FlattenLedger,
    VerifiedClaim,
    approximate_on_disjoint,
    flatten_at,
    flatten_subsequence,
    realize_targets,
)
from .errors import (
    CapacityError,
    ConstructionError,
    DomainError,
    ErgolabError,
    ValidationError,
    VerificationError,
)
from .intervals import IntervalSet, combine, measure, normalize, split_at_mass, theta
from .laws import LawReport, exact_law, verify_law_bound
from .measures import (
    CenteredLattice,
    DiscreteMeasure,
    condition,
    dirac,
    dirac_bound,
    discretize_center,
    gaussian_target,
    levy_distance,
    levy_le,
    make_measure,
    realize_on_base,
    scale,
)
from .odometer import OdometerMap, odometer_image
from .sequences import (
    NormalizingSequence,
    explicit_sequence,
    make_sequence,
    pow34_sequence,
    sqrt_sequence,
)
from .systems import (
    LevelPartition,
    RokhlinTower,
    birkhoff_partition,
    exact_dyadic_tower,
    rokhlin_tower,
    sublevel_birkhoff,
)

__version__ = "0.1.0"
