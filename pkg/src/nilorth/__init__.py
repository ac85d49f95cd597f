"""nilorth: nilmanifold dynamics and multiplicative-function orthogonality
statistics.

Layers, bottom to top:

* liealg      -- exact nilpotent Lie algebras: brackets, central series,
                 BCH/Dynkin group law, Malcev coordinates
* nilmanifold -- lattices, fundamental-domain reduction, fibrations,
                 rotation vectors, suspension groups
* dynamics    -- affine unipotent systems, observables, lazy orbit series,
                 polynomial (Weyl) systems, suspensions
* arith       -- segmented Mobius/Liouville sieves, multiplicative weights
* stats       -- short-interval averages, bilinear prime sums, Birkhoff
                 means, joining probes, multicorrelations
* skewprod    -- cocycles, group extensions, selector cocycles, character
                 lattices
* harness     -- named reproducible experiments (also: the nilorth CLI)
"""

__version__ = "0.1.0"

from .arith import (  # noqa: F401
    liouville_segment,
    liouville_weight,
    mobius_segment,
    mobius_weight,
)
from .dynamics import (  # noqa: F401
    AffineSystem,
    Observable,
    SignalSeries,
    central_character,
    nil_translation,
    orbit_series,
    subsampled_orbit,
    torus_character,
    weyl_system,
)
from .liealg import (  # noqa: F401
    AlgebraVector,
    DerivationSpec,
    LieAlgebraSpec,
    bch_product,
    bracket,
    central_series,
)
from .nilmanifold import (  # noqa: F401
    GroupPoint,
    LatticeSpec,
    build_suspension,
    ergodicity_certificate,
    lattice_member,
    reduce,
    rotation_vector,
)
from .stats import (  # noqa: F401
    birkhoff_mean,
    joining_support_probe,
    kbsz_bilinear,
    multicorrelation_series,
    short_interval_avg,
    stabilizer_translation_test,
)
