"""
Grayscale images and the binary PGM (P5) codec.
"""

from typing import Iterable, Sequence

import numpy as np

from bgdenoise.errors import (
    ParameterError,
    PgmDimensionError,
    PgmFormatError,
    PgmMagicError,
    PgmMaxvalError,
    PgmTruncatedError,
)

PGM_MAGIC = b"P5"
PGM_MAXVAL = 255
_WHITESPACE = b" \t\n\v\f\r"


class Image:
    """
    An 8-bit grayscale image stored row-major as a read-only (height, width) array.
    Rows are indexed by x and columns by y, as everywhere in this package.
    """

    def __init__(self, pixels: np.ndarray):
        """
        :param pixels: 2D integer array with every value in [0, 255]
        """
        array = np.asarray(pixels)
        if array.ndim != 2:
            raise ParameterError("pixels", f"expected a 2D array, got {array.ndim}D")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise ParameterError("pixels", f"empty image of shape {array.shape}")
        if array.dtype != np.uint8:
            if not np.issubdtype(array.dtype, np.integer):
                raise ParameterError(
                    "pixels", f"integer intensities required, got {array.dtype}"
                )
            if array.min() < 0 or array.max() > 255:
                raise ParameterError("pixels", "intensities must lie in [0, 255]")
        self.__pixels = np.array(array, dtype=np.uint8, copy=True)
        self.__pixels.flags.writeable = False

    @classmethod
    def constant(cls, width: int, height: int, value: int) -> "Image":
        return cls(np.full((height, width), value, dtype=np.int64))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "Image":
        return cls(np.array([list(row) for row in rows], dtype=np.int64))

    @property
    def width(self) -> int:
        return self.__pixels.shape[1]

    @property
    def height(self) -> int:
        return self.__pixels.shape[0]

    @property
    def pixels(self) -> np.ndarray:
        return self.__pixels

    @property
    def shape(self) -> tuple[int, int]:
        return self.__pixels.shape

    def mirrored(self) -> "Image":
        """
        Return the image flipped left to right.
        """
        return Image(self.__pixels[:, ::-1])

    def same_size(self, other: "Image") -> bool:
        return self.shape == other.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(
            self.__pixels, other.pixels
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.__pixels.tobytes()))

    def __repr__(self) -> str:
        return f"Image({self.width}x{self.height})"


class _HeaderReader:
    """
    Reads the whitespace-separated header tokens of a netpbm file, skipping comments.
    """

    def __init__(self, data: bytes):
        self.data = data
        self.position = 0

    def _skip_separators(self):
        while self.position < len(self.data):
            byte = self.data[self.position : self.position + 1]
            if byte in _WHITESPACE:
                self.position += 1
            elif byte == b"#":
                end = self.data.find(b"\n", self.position)
                self.position = len(self.data) if end < 0 else end + 1
            else:
                return

    def token(self, field: str) -> bytes:
        self._skip_separators()
        start = self.position
        while (
            self.position < len(self.data)
            and self.data[self.position : self.position + 1] not in _WHITESPACE
            and self.data[self.position : self.position + 1] != b"#"
        ):
            self.position += 1
        if start == self.position:
            raise PgmTruncatedError(field, "file ends inside the header")
        return self.data[start : self.position]

    def integer(self, field: str) -> int:
        token = self.token(field)
        if not token.isdigit():
            raise PgmDimensionError(
                field, f"expected a decimal integer, found {token!r}"
            )
        return int(token)


def load_pgm(data: bytes) -> Image:
    """
    Parse a binary PGM (P5) image with maxval 255.
    :param data: the complete file contents
    :return Image: the decoded image
    """
    if data[:2] != PGM_MAGIC:
        raise PgmMagicError(data[:2])
    reader = _HeaderReader(data)
    reader.position = 2
    if len(data) > 2 and data[2:3] not in _WHITESPACE and data[2:3] != b"#":
        raise PgmMagicError(data[:3])

    width = reader.integer("width")
    height = reader.integer("height")
    if width == 0:
        raise PgmDimensionError("width", "must be at least 1")
    if height == 0:
        raise PgmDimensionError("height", "must be at least 1")
    token = reader.token("maxval")
    if not token.isdigit() or int(token) != PGM_MAXVAL:
        raise PgmMaxvalError(token.decode("ascii", "replace"))

    # a single whitespace byte separates the header from the raster
    if reader.position >= len(data):
        raise PgmTruncatedError("raster", "no raster data after the header")
    if data[reader.position : reader.position + 1] not in _WHITESPACE:
        raise PgmFormatError("maxval", "maxval must be followed by whitespace")
    start = reader.position + 1
    size = width * height
    raster = data[start : start + size]
    if len(raster) < size:
        raise PgmTruncatedError(
            "raster", f"expected {size} bytes, found {len(raster)}"
        )
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return Image(pixels)


def save_pgm(image: Image) -> bytes:
    """
    Encode an image as binary PGM with the header "P5\\n<w> <h>\\n255\\n".
    """
    header = f"P5\n{image.width} {image.height}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + image.pixels.tobytes()


def read_pgm(path: str) -> Image:
    with open(path, "rb") as handle:
        return load_pgm(handle.read())


def write_pgm(image: Image, path: str):
    with open(path, "wb") as handle:
        handle.write(save_pgm(image))
