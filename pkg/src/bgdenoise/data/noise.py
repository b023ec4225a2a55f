"""
Seeded additive Gaussian noise, as used by the denoising evaluation protocol.

Samples come from numpy's counter-based Philox bit generator: two uniform
streams are drawn and turned into normal deviates with the Box-Muller
transform, so the output depends only on (image, sigma, seed).
"""

import numpy as np

from bgdenoise.data.image import Image
from bgdenoise.errors import ParameterError


def philox_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def box_muller(generator: np.random.Generator, size: int) -> np.ndarray:
    """
    Draw `size` standard normal deviates from pairs of uniforms.
    """
    u1 = generator.random(size)
    u2 = generator.random(size)
    # 1 - u1 lies in (0, 1], so the logarithm is finite
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    return radius * np.cos(2.0 * np.pi * u2)


def round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def add_gaussian_noise(image: Image, sigma: float, seed: int) -> Image:
    """
    Add zero-mean Gaussian noise of standard deviation sigma to every pixel.
    :param Image image: the clean image
    :param float sigma: noise standard deviation, at least 0
    :param int seed: seed of the Philox generator
    :return Image: clamp(round(f + n), 0, 255) per pixel
    """
    if not sigma >= 0:
        raise ParameterError("sigma", f"must be non-negative, got {sigma}")
    if seed < 0:
        raise ParameterError("seed", f"must be non-negative, got {seed}")
    generator = philox_generator(seed)
    noise = sigma * box_muller(generator, image.width * image.height)
    noisy = image.pixels.astype(np.float64) + noise.reshape(image.shape)
    return Image(np.clip(round_half_away(noisy), 0, 255).astype(np.int64))
