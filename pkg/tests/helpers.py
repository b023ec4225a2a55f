import math

import numpy as np

from bgdenoise.data.image import Image


def random_image(width: int, height: int, seed: int = 0) -> Image:
    generator = np.random.default_rng(seed)
    return Image(generator.integers(0, 256, size=(height, width)))


def smooth_image(width: int, height: int, seed: int = 0) -> Image:
    """
    A gradient with a step edge and mild texture, closer to a photograph than
    uniform noise.
    """
    generator = np.random.default_rng(seed)
    rows, cols = np.mgrid[0:height, 0:width]
    base = 40 + 120 * cols / max(1, width - 1) + 60 * (rows > height // 2)
    texture = generator.integers(-8, 9, size=(height, width))
    return Image(np.clip(np.round(base + texture), 0, 255).astype(np.int64))


def half_up(value: float) -> int:
    return math.floor(value + 0.5)


def bilateral_pixel(pixels, x: int, y: int, r: int, sigma_s: float, sigma_r: float):
    """
    Normalized bilateral filter response of one pixel, written as a double loop.
    """
    height, width = len(pixels), len(pixels[0])
    center = int(pixels[x][y])
    numerator = denominator = 0.0
    for i in range(x - r, x + r + 1):
        for j in range(y - r, y + r + 1):
            if not (0 <= i < height and 0 <= j < width):
                continue
            value = int(pixels[i][j])
            spatial = math.exp(-((i - x) ** 2 + (j - y) ** 2) / (2 * sigma_s**2))
            intensity = math.exp(-((value - center) ** 2) / (2 * sigma_r**2))
            numerator += spatial * intensity * value
            denominator += spatial * intensity
    return numerator / denominator


def grid_cells(pixels, r: int, sigma_s: float, sigma_r: float) -> dict:
    """
    Sparse grid {(x, y, z): [count, sum]} built pixel by pixel.
    """
    scale = r * sigma_r / sigma_s
    cells = {}
    for x, row in enumerate(pixels):
        for y, value in enumerate(row):
            key = (half_up(x / r), half_up(y / r), half_up(int(value) / scale))
            cell = cells.setdefault(key, [0, 0])
            cell[0] += 1
            cell[1] += int(value)
    return cells


def blurred_cell(cells: dict, key, sigma_g: float):
    """
    27-term Gaussian blur of one cell: (numerator / denominator, denominator).
    """
    numerator = denominator = 0.0
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dz in (-1, 0, 1):
                source = (key[0] + dx, key[1] + dy, key[2] + dz)
                if source not in cells:
                    continue
                weight = math.exp(-(dx * dx + dy * dy + dz * dz) / (2 * sigma_g**2))
                numerator += weight * cells[source][1]
                denominator += weight * cells[source][0]
    if denominator == 0:
        return None, 0.0
    return numerator / denominator, denominator


def grid_pixel(cells: dict, x: int, y: int, value: int, r, sigma_s, sigma_r) -> int:
    """
    Trilinear read of the blurred grid at one pixel's feature vector, skipping
    empty corners.
    """
    sigma_g = sigma_s / r
    scale = r * sigma_r / sigma_s
    coordinates = (x / r, y / r, value / scale)
    lower = [math.floor(c) for c in coordinates]
    fractions = [c - f for c, f in zip(coordinates, lower)]
    numerator = denominator = 0.0
    for i in (0, 1):
        for j in (0, 1):
            for k in (0, 1):
                corner_value, _ = blurred_cell(
                    cells, (lower[0] + i, lower[1] + j, lower[2] + k), sigma_g
                )
                if corner_value is None:
                    continue
                coefficient = 1.0
                for offset, fraction in zip((i, j, k), fractions):
                    coefficient *= fraction if offset else 1.0 - fraction
                numerator += coefficient * corner_value
                denominator += coefficient
    return min(255, half_up(numerator / denominator))
