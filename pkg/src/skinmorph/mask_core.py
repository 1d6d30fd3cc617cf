"""Binary masks and probability maps with value semantics."""

import numpy as np

from . import _bits


class BinaryMask:
    """A 2-D foreground/background raster, one bit per pixel.

    Rows are packed into 64-bit little-endian words so that whole-image
    logic runs word-parallel. Padding bits past ``width`` in the last
    word of each row are always zero. Instances behave as values: no
    operation mutates its inputs.
    """

    __slots__ = ("_width", "_height", "_words")

    def __init__(self, width, height, words=None):
        if width < 1 or height < 1:
            raise ValueError(
                f"mask dimensions must be >= 1, got {width}x{height}")
        self._width = int(width)
        self._height = int(height)
        k = _bits.words_per_row(self._width)
        if words is None:
            self._words = np.zeros((self._height, k), dtype=_bits.DTYPE)
        else:
            words = np.asarray(words, dtype=_bits.DTYPE)
            if words.shape != (self._height, k):
                raise ValueError(
                    f"expected word array of shape {(self._height, k)}, "
                    f"got {words.shape}")
            # force the padding invariant regardless of caller input
            self._words = words & _bits.row_mask(self._width)

    @property
    def width(self):
        return self._width

    @property
    def height(self):
        return self._height

    @property
    def words(self):
        """Packed uint64 words, shape (height, ceil(width/64)). Read only."""
        return self._words

    @classmethod
    def from_array(cls, array):
        array = np.asarray(array)
        if array.ndim != 2:
            raise ValueError(f"expected a 2-D array, got {array.ndim}-D")
        h, w = array.shape
        if h < 1 or w < 1:
            raise ValueError(f"mask dimensions must be >= 1, got {w}x{h}")
        return cls(w, h, _bits.pack(array != 0))

    @classmethod
    def zeros(cls, width, height):
        return cls(width, height)

    @classmethod
    def ones(cls, width, height):
        m = cls(width, height)
        return cls(width, height,
                   np.full_like(m._words, np.uint64(0xFFFFFFFFFFFFFFFF)))

    def to_array(self):
        """Unpack to a bool array of shape (height, width)."""
        return _bits.unpack(self._words, self._width)

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return (self._width == other._width
                and self._height == other._height
                and np.array_equal(self._words, other._words))

    __hash__ = None

    def __repr__(self):
        return (f"BinaryMask({self._width}x{self._height}, "
                f"{foreground_count(self)} fg)")


class ProbabilityMap:
    """A 2-D grayscale map of per-pixel skin scores in [0, 255]."""

    __slots__ = ("_values",)

    def __init__(self, values):
        values = np.asarray(values)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-D array, got {values.ndim}-D")
        h, w = values.shape
        if h < 1 or w < 1:
            raise ValueError(f"map dimensions must be >= 1, got {w}x{h}")
        if values.dtype != np.uint8:
            if not np.issubdtype(values.dtype, np.integer):
                raise ValueError(f"expected integer values, got {values.dtype}")
            if values.min() < 0 or values.max() > 255:
                raise ValueError("probability values must lie in [0, 255]")
            values = values.astype(np.uint8)
        self._values = values.copy()
        self._values.setflags(write=False)

    @property
    def width(self):
        return self._values.shape[1]

    @property
    def height(self):
        return self._values.shape[0]

    @property
    def values(self):
        return self._values

    def __eq__(self, other):
        if not isinstance(other, ProbabilityMap):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    __hash__ = None

    def __repr__(self):
        return f"ProbabilityMap({self.width}x{self.height})"


def _check_same_dims(a, b):
    if a.width != b.width or a.height != b.height:
        raise ValueError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")


def multiply(a, b):
    """Pixel-wise AND of two masks of identical dimensions."""
    _check_same_dims(a, b)
    return BinaryMask(a.width, a.height, a.words & b.words)


def subtract(a, b):
    """Pixels of ``a`` that are not in ``b`` (set difference)."""
    _check_same_dims(a, b)
    return BinaryMask(a.width, a.height, a.words & ~b.words)


def complement(m):
    """Flip foreground and background."""
    return BinaryMask(m.width, m.height, ~m.words)


def foreground_count(m):
    """Number of foreground pixels."""
    return _bits.popcount(m.words)


def threshold(p, tau):
    """Binarize a probability map: foreground where value >= tau.

    tau must be an integer in [0, 255]; tau = 0 marks every pixel
    foreground.
    """
    if not isinstance(tau, (int, np.integer)) or isinstance(tau, bool):
        raise ValueError(f"threshold must be an integer, got {tau!r}")
    if not 0 <= tau <= 255:
        raise ValueError(f"threshold must lie in [0, 255], got {tau}")
    return BinaryMask.from_array(p.values >= tau)
