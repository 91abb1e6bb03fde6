"""Number-field lattice codes: invariants, carved codebooks, channel
simulation, decoders, and capacity-gap analysis."""

__version__ = "0.1.0"

from .lattice import LatticeBasis, LatticeInvariants  # noqa: F401
from .numberfield import FieldSpec, IdealSpec, load_catalog, catalog_field  # noqa: F401
from .codebook import CodeConfig, Codebook, carve  # noqa: F401
from .channel import ChannelRealization, transmit  # noqa: F401
from .decoder import DecodeOutcome, ml_decode, nld_decode  # noqa: F401
from .analysis import RateBound, achievable_rate, sphere_bound  # noqa: F401
from .specfun import ChernoffSolution, chernoff_solve  # noqa: F401
