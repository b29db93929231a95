import pytest

from twistbeam.beam import BeamParams


@pytest.fixture
def ref_beam():
    """n_f = 4 resonance, θ_k = 0.2, Λ = +1, m_γ = 1."""
    return BeamParams.resonant(4, 0.2, 1)
