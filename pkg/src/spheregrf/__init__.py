"""Fast exact simulation of isotropic Gaussian random fields on the sphere and sphere x time.

Block circulant factorization of the covariance on regular longitude x
colatitude grids, with a dense oracle and variogram checks.
"""

from .circulant import (BlockRow, FieldRealization, SpectralBlocks, assemble_block_row,
                        block_diagonalize, factorize, sample_sphere, simulate_sphere, sqrt_blocks)
from .covmodels import (SpaceTimeModel, SpatialModel, TemporalCorrelation, calibrate_range,
                        model_from_spec, parse_model_spec, spacetime_correlation,
                        spatial_correlation, variogram_from_correlation)
from .errors import (CapExceeded, FieldFormatError, IndefiniteBlocks, NotPositiveDefinite,
                     RealnessViolation, ValidationError)
from .grid import (GridPoint, SphereGrid, TimeGrid, build_sphere_grid, build_time_grid,
                   geodesic_distance)
from .stcirculant import (EmbeddingConfig, SpaceTimeBlockRow, SpaceTimeSpectralBlocks,
                          assemble_st_block_row, reflect_time, sample_spheretime,
                          simulate_spheretime, st_block_diagonalize, st_sqrt_blocks)
from .variogram import VariogramEstimate, empirical_st_variogram, empirical_variogram

__version__ = "0.1.0"
