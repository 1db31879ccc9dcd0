import numpy as np
import pytest

from palmreg.preprocess import preprocess_sample
from palmreg.synth import HandSpec, generate_hand


@pytest.fixture(scope="session")
def default_hand():
    img, truth = generate_hand(HandSpec())
    return img, truth, preprocess_sample(img)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
