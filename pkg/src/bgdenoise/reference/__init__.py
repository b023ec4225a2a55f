from bgdenoise.reference.params import DenoiseParams, round_half_up
from bgdenoise.reference.bilateral import (
    WeightedAccumulator,
    bilateral_filter,
    gaussian_weight,
    round_to_intensity,
)
