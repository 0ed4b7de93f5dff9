"""Simulator of a below-threshold optical parametric amplifier in a cavity.

Frequency-domain input-output model of a pumped two-mirror cavity with
internal loss: classical phase-sensitive reflection of a coherent signal, and
homodyne noise spectra of a reflected squeezed vacuum versus cavity detuning.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, OpasimError, PhysicsError, ThresholdError,
                     UnreachableTargetError)
from .model import (SPEED_OF_LIGHT, CavityDecays, CavityGeometry, Detuning,
                    PumpDrive, decay_rate_from_transmission,
                    decays_from_mirror_specs, drift_matrix, round_trip_length)
from .mean_field import (CoherentInput, ReflectionScan, reflected_field,
                         reflected_power_ratio, reflection_gain_scan,
                         steady_state_intracavity, time_domain_oracle)
from .spectra import (DetectionChain, Port, PortTransfer, SpectralMatrix,
                      homodyne_spectrum, lyapunov_regression_oracle,
                      output_spectral_matrix, port_transfer,
                      symmetrize_over_sidebands)
from .source import (InputOrientation, OpoSource, apply_loss,
                     calibrate_efficiency, opo_output_spectrum,
                     oriented_input, rotate, squeezing_db)
from .scans import (CurveFeatures, GridSpec, PanelCheck, Scenario, ScanResult,
                    SystemParams, curve_features, default_grid, injected_state,
                    panel_ordering_report, run_scan)

__all__ = [
    "__version__",
    "OpasimError", "ConfigError", "PhysicsError", "ThresholdError",
    "UnreachableTargetError",
    "SPEED_OF_LIGHT", "CavityGeometry", "CavityDecays", "PumpDrive", "Detuning",
    "round_trip_length", "decay_rate_from_transmission",
    "decays_from_mirror_specs", "drift_matrix",
    "CoherentInput", "ReflectionScan", "steady_state_intracavity",
    "reflected_field", "reflected_power_ratio", "reflection_gain_scan",
    "time_domain_oracle",
    "SpectralMatrix", "Port", "PortTransfer", "DetectionChain",
    "port_transfer", "output_spectral_matrix", "homodyne_spectrum",
    "symmetrize_over_sidebands", "lyapunov_regression_oracle",
    "OpoSource", "InputOrientation", "opo_output_spectrum", "apply_loss",
    "rotate", "oriented_input", "squeezing_db", "calibrate_efficiency",
    "Scenario", "GridSpec", "SystemParams", "ScanResult", "CurveFeatures",
    "PanelCheck", "run_scan", "curve_features", "panel_ordering_report",
    "default_grid", "injected_state",
]
