"""Weak-value laboratory for pre- and post-selected Gaussian packets in 1D.

Closed-form packet algebra, a sampled-grid numerical oracle, weak values
of region-localized observables, an event-driven moving-element
interferometer tracer, and Monte-Carlo weak-measurement ensembles.
"""

from .errors import (
    ConfigError,
    NearOrthogonalSelection,
    NoCrossing,
    NonOrthogonalPackets,
    PostSelectionImpossible,
    RegimeError,
    SupportOverflow,
    TopologyMismatch,
    UnboundedBranch,
)
from .packets import (
    DEFAULT_CONSTANTS,
    ComplexGaussian,
    PacketRecipe,
    PhysicalConstants,
    f_pair_overlap,
    fourier_transform,
    free_evolve,
    galilean_boost,
    inner_product,
    inverse_fourier_transform,
    make_f,
    make_g,
    momentum_moment,
    reflect,
    translate,
)
from .states import (
    SuperposedState,
    Term,
    compose_custom,
    compose_phi,
    compose_psi,
    momentum_overlap,
    overlap,
)
from .weak_values import (
    LocalObservable,
    RegionProjector,
    WeakValueReport,
    counterparticle_decomposition,
    full_line,
    local_energy,
    local_momentum,
    packet_projector_weak_values,
    region_f,
    region_g,
    region_h,
    three_box_summary,
    weak_value,
)

__version__ = "0.1.0"
