import pytest

from qrefrig.media import Medium, MediumKind, MediumParams
from qrefrig.cycles import CycleParams

# shared cycle parameter set used throughout: hot/cold frequencies 5 and 4,
# hot/cold inverse temperatures 1/2 and 1, reference frequency 0.6^(1/3)
W, WP, BH, BC = 5.0, 4.0, 0.5, 1.0
OMEGA0 = 0.6 ** (1.0 / 3.0)
LAM_MAX = 0.6  # g = 1 at the reference frequency


def make_params(lam: float, omega: float = W) -> MediumParams:
    return MediumParams(omega=omega, lam=lam, omega0=OMEGA0)


def make_cycle(kind: MediumKind, lam: float) -> CycleParams:
    return CycleParams(
        omega=W, omega_prime=WP, beta_h=BH, beta_c=BC,
        medium=Medium(kind, make_params(lam)),
    )


@pytest.fixture
def ref_cycle_ao():
    return make_cycle(MediumKind.QUANTUM_ANHARMONIC, LAM_MAX)


@pytest.fixture
def ref_cycle_spin():
    return make_cycle(MediumKind.SPIN_ANHARMONIC, LAM_MAX)


@pytest.fixture
def ref_cycle_harmonic():
    return make_cycle(MediumKind.QUANTUM_HARMONIC, 0.0)
