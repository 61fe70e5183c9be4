import pytest

from fodesim.model import (
    ClosedLoopModel,
    ControllerParams,
    InputSignalSpec,
    PlantParams,
)

STABLE_TD = 3.7343
UNSTABLE_TD = 0.7343
EQUILIBRIUM_Y = 20.5 / 21.5
EQUILIBRIUM_X1 = 1.0 / 21.5


def reference_model(Td=STABLE_TD, alpha=2.2, beta=0.9, delta=1.15, amplitude=None):
    """The worked closed loop: a2=0.8, a1=0.5, a0=1, K=20.5 and friends."""
    if amplitude is None:
        spec = InputSignalSpec.unit_step()
    else:
        spec = InputSignalSpec.scaled_step(amplitude)
    return ClosedLoopModel(
        plant=PlantParams(a0=1.0, a1=0.5, a2=0.8, alpha=alpha, beta=beta),
        controller=ControllerParams(K=20.5, Td=Td, delta=delta),
        input=spec,
    )


@pytest.fixture
def stable_model():
    return reference_model()


@pytest.fixture
def unstable_model():
    return reference_model(Td=UNSTABLE_TD)


@pytest.fixture
def integer_model():
    """Same coefficients degenerated to alpha=2, beta=1, delta=1."""
    return reference_model(alpha=2.0, beta=1.0, delta=1.0)
