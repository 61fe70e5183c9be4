"""fodesim: simulation and stability analysis of fractional-order feedback loops.

Submodules are loaded lazily so the CLI can configure thread-pool environment
variables before numpy comes up.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = (
    "fracops",
    "model",
    "sim_direct",
    "sim_statespace",
    "analysis",
    "config",
    "plotting",
    "cli",
)

_EXPORTS = {
    # fracops
    "GLCoefficients": "fracops",
    "SampledSignal": "fracops",
    "gl_coefficients": "fracops",
    "gl_differintegral": "fracops",
    "gl_series": "fracops",
    "power_law_differintegral": "fracops",
    # model
    "PlantParams": "model",
    "ControllerParams": "model",
    "InputSignalSpec": "model",
    "ClosedLoopModel": "model",
    "FractionalTermList": "model",
    "TransferPoleError": "model",
    "plant_transfer": "model",
    "controller_transfer": "model",
    "open_loop_transfer": "model",
    "closed_loop_transfer": "model",
    "characteristic_terms": "model",
    # sim_direct
    "TimeSeries": "sim_direct",
    "IllPosedDiscretizationError": "sim_direct",
    "NoEquilibriumError": "sim_direct",
    "simulate_direct": "sim_direct",
    "steady_state_prediction": "sim_direct",
    # sim_statespace
    "StateSpaceRealization": "sim_statespace",
    "StateTrajectory": "sim_statespace",
    "CommensurateStateSpace": "sim_statespace",
    "EquilibriumPoint": "sim_statespace",
    "build_realization": "sim_statespace",
    "simulate_state_space": "sim_statespace",
    "simulate_commensurate": "sim_statespace",
    "equilibrium": "sim_statespace",
    "classify_trajectory": "sim_statespace",
    # analysis
    "CommensuratePolynomial": "analysis",
    "StabilityReport": "analysis",
    "FrequencyResponse": "analysis",
    "IncommensurateOrdersError": "analysis",
    "RootFindingError": "analysis",
    "commensurate_base": "analysis",
    "characteristic_polynomial": "analysis",
    "polynomial_roots": "analysis",
    "principal_poles": "analysis",
    "stability_report": "analysis",
    "frequency_response": "analysis",
    # config
    "RunConfig": "config",
    "ConfigError": "config",
    "parse_config": "config",
    "dump_config": "config",
}

__all__ = ["__version__", *_SUBMODULES, *_EXPORTS]


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    if name in _EXPORTS:
        module = importlib.import_module(f".{_EXPORTS[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
