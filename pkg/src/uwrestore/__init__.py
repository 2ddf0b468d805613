"""Underwater image restoration.

The pipeline compensates and balances the color channels, estimates a
spatially varying ambient illumination and a transmission map, then recovers
the scene reflectance per channel with an ADMM solver that combines an
elastica regularizer on reflectance with a Laplacian penalty on illumination.
"""

from .admm import SolverDivergence, SolverParams, SolveReport, solve_channel
from .color import ColorParams, color_balance, compensate_channels, correct_color
from .config import PipelineConfig
from .guided import GuidedFilterParams, guided_filter
from .illumination import IlluminationParams, estimate_illumination
from .metrics import MetricReport, ciede2000, entropy, uciqe
from .pipeline import restore_image, run_batch, run_single
from .transmission import TransmissionParams, estimate_transmission

__version__ = "0.1.0"
