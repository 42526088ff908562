"""Driven anisotropic XY spin chain simulator.

Exact mode-pair dynamics under time-dependent coupling J(t) and transverse
field h(t); magnetization, pfaffian spin correlators and two-site concurrence
at zero and finite temperature, with brute-force verification oracles, a CLI
and a FastAPI service.
"""

from .entanglement import (ConcurrenceValue, TwoSiteState, asymptotic_value,
                           concurrence_general, concurrence_x, two_site_state)
from .errors import ConfigError, ConsistencyError, IntegrationError, SizeLimitError
from .evolve import (ExactAngles, Propagator, evolve_state, exact_angles,
                     propagate_exact, propagate_numeric)
from .model import (ChainSpec, DrivingProfile, ModeBlock, ModeState,
                    evaluate_profile, hamiltonian_block, mode_blocks,
                    mode_phases, profile_antiderivative, thermal_state)
from .observables import (ContractionSet, ModeExpectations, contraction_set,
                          correlators, magnetization, mode_expectations,
                          pfaffian, pfaffian_by_expansion)
from .oracle import (FockOracle, SpinOracle, fock_evolve, fock_expectations,
                     spin_evolve_compare)
from .runner import (SweepResult, TimeseriesResult, detect_revival_time,
                     run_sweep, run_timeseries)
from .schemas import ChainModel, ProfileModel, RunConfig, SweepConfig
from .presets import PRESETS, expand_config, preset_infos

__version__ = "0.1.0"

__all__ = [
    "ChainModel", "ChainSpec", "ConcurrenceValue", "ConfigError",
    "ConsistencyError", "ContractionSet", "DrivingProfile", "ExactAngles",
    "FockOracle", "IntegrationError", "ModeBlock", "ModeExpectations",
    "ModeState", "PRESETS", "ProfileModel", "Propagator", "RunConfig",
    "SizeLimitError", "SpinOracle", "SweepConfig", "SweepResult",
    "TimeseriesResult", "TwoSiteState", "asymptotic_value", "concurrence_general",
    "concurrence_x", "contraction_set", "correlators", "detect_revival_time",
    "evaluate_profile", "evolve_state", "exact_angles", "expand_config",
    "fock_evolve", "fock_expectations", "hamiltonian_block", "magnetization",
    "mode_blocks", "mode_expectations", "mode_phases", "pfaffian",
    "pfaffian_by_expansion", "preset_infos", "profile_antiderivative",
    "propagate_exact", "propagate_numeric", "run_sweep", "run_timeseries",
    "spin_evolve_compare", "thermal_state", "two_site_state",
]
