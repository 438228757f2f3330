import numpy as np
import pytest

from halfspace_qed import LorentzMedium, QuadratureConfig


@pytest.fixture
def medium():
    return LorentzMedium(1.0, 1.0, 0.1)


@pytest.fixture
def vacuum():
    return LorentzMedium(1.0, 0.0, 0.1)


@pytest.fixture
def quad():
    return QuadratureConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
