"""Brownian last passage percolation in KPZ-scaled coordinates."""
__version__ = "0.1.0"

from .env import BrownianField, GridSpec, sample_field, zero_field
from .errors import AlppError, ConfigError, DomainError, ModelConsistencyError
from .lpp import LEFTMOST, RIGHTMOST, Staircase, SweepTable, geodesic, passage_profile, passage_value
from .scale import Polymer, sample_scaled_field, scale_point, unscale_point, weight
