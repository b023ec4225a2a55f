from bgdenoise.grid.core import (
    FeatureVector,
    Grid,
    GridCell,
    cell_bit_widths,
    column_word,
    construct_grid,
    feature_vector,
    fraction_table,
    grid_dimensions,
    intensity_coordinates,
    intensity_lut,
    pack_cells,
    pack_column,
    rounded_index,
    unpack_cells,
    unpack_column,
)
from bgdenoise.grid.kernel import (
    BlurKernel,
    GaussianKernel,
    ShiftKernel,
    quantize_kernel_pow2,
    resolve_kernel,
)
from bgdenoise.grid.blur import BlurredGrid, blur_grid, blur_plane
from bgdenoise.grid.slicing import bg_denoise, interpolate_row, slice_image
