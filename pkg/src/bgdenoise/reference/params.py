import math
from dataclasses import dataclass

from bgdenoise.errors import ParameterError


def round_half_up(value: float) -> int:
    """
    Round a non-negative real to the nearest integer, ties upwards.
    """
    return math.floor(value + 0.5)


@dataclass(frozen=True)
class DenoiseParams:
    """
    Filter configuration shared by every engine.
    :param r: window radius in pixels
    :param sigma_s: spatial standard deviation
    :param sigma_r: range (intensity) standard deviation
    """

    r: int
    sigma_s: float
    sigma_r: float

    def __post_init__(self):
        if isinstance(self.r, bool) or not isinstance(self.r, int) or self.r < 1:
            raise ParameterError("radius", f"must be a positive integer, got {self.r}")
        for name, value in (("sigma_s", self.sigma_s), ("sigma_r", self.sigma_r)):
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(name, f"must be a finite real, got {value}")
            if value <= 0:
                raise ParameterError(name, f"must be positive, got {value}")

    @property
    def sigma_g(self) -> float:
        """
        Standard deviation of the radius-1 Gaussian applied in grid space.
        """
        return self.sigma_s / self.r

    @property
    def range_scale(self) -> float:
        """
        Intensity units per grid cell along the intensity axis, r * sigma_r / sigma_s.
        """
        return self.r * self.sigma_r / self.sigma_s

    @property
    def half_radius(self) -> int:
        """
        r/2 rounded half-up, i.e. ceil(r/2).
        """
        return (self.r + 1) // 2

    def __str__(self) -> str:
        return f"r={self.r}, sigma_s={self.sigma_s:g}, sigma_r={self.sigma_r:g}"
