import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_blob_mask(rng, height, width, density=0.5):
    """Random mask with spatial structure: smoothed noise thresholded."""
    noise = rng.random((height, width))
    # crude box blur so masks have blobs, not salt-and-pepper
    padded = np.pad(noise, 2, mode="edge")
    acc = np.zeros_like(noise)
    for dy in range(-2, 3):
        for dx in range(-2, 3):
            acc += padded[2 + dy:2 + dy + height, 2 + dx:2 + dx + width]
    cut = np.quantile(acc, 1.0 - density)
    return acc >= cut
