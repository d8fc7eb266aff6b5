"""Location-aware beam-forming toolkit for a ULA on a high-speed train."""

__version__ = "0.1.0"

from .array_model import (ArrayConfig, ArrayType, BeamGrid, dual_transform, directivity,
                          directivity_from_beamwidth, half_power_beamwidth, make_grid,
                          sector_width)
from .codebook import (PhaseMapper, array_factor, beam_weight, build_phase_mapper,
                       measure_pattern, steering_vector)
from .error_model import (PositioningErrorModel, effective_probability, interval_probability,
                          mc_effective_probability, q_function)
from .estimators import BeamCountOptimizer, LocationBeamSelector
from .exceptions import (ConfigError, DegenerateGeometryError, DualityError, HSTBeamError,
                         OutOfCoverageError, ResolutionError, StructuralLimitError)
from .optimizer import (OptimizerResult, search_beam_count, sweep_directivity_vs_sigma,
                        sweep_directivity_vs_theta, sweep_spacing_vs_theta, tradeoff_curve)
from .rail_geometry import (BeamWindow, DeploymentGeometry, angle_of_bs, beam_index,
                            beam_window, exact_beam_window)
from .traversal import (TraversalConfig, TraversalEvent, select_beam, simulate_traversal,
                        summarize)

__all__ = [
    "__version__",
    "ArrayConfig", "ArrayType", "BeamGrid", "dual_transform", "directivity",
    "directivity_from_beamwidth", "half_power_beamwidth", "make_grid", "sector_width",
    "PhaseMapper", "array_factor", "beam_weight", "build_phase_mapper", "measure_pattern",
    "steering_vector",
    "PositioningErrorModel", "effective_probability", "interval_probability",
    "mc_effective_probability", "q_function",
    "BeamCountOptimizer", "LocationBeamSelector",
    "ConfigError", "DegenerateGeometryError", "DualityError", "HSTBeamError",
    "OutOfCoverageError", "ResolutionError", "StructuralLimitError",
    "OptimizerResult", "search_beam_count", "sweep_directivity_vs_sigma",
    "sweep_directivity_vs_theta", "sweep_spacing_vs_theta", "tradeoff_curve",
    "BeamWindow", "DeploymentGeometry", "angle_of_bs", "beam_index", "beam_window",
    "exact_beam_window",
    "TraversalConfig", "TraversalEvent", "select_beam", "simulate_traversal", "summarize",
]
