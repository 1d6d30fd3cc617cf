"""Word-parallel primitives for bit-packed binary rasters.

A raster of shape (height, width) is stored as uint64 words of shape
(height, ceil(width / 64)). Bit j of word k in a row holds pixel
x = 64 * k + j. Bits past ``width`` in the last word of each row are
padding and must be zero in any canonical array; helpers here may
temporarily set them and callers re-mask afterwards.
"""

import numpy as np

WORD = 64
_FULL = np.uint64(0xFFFFFFFFFFFFFFFF)
DTYPE = np.dtype("<u8")


def words_per_row(width):
    return -(-width // WORD)


def row_mask(width):
    """Per-word mask with ones in the valid bit positions, shape (K,)."""
    k = words_per_row(width)
    mask = np.full(k, _FULL, dtype=DTYPE)
    rem = width % WORD
    if rem:
        mask[-1] = np.uint64((1 << rem) - 1)
    return mask


def pack(bits):
    """Pack a 2-D bool array into words of shape (H, ceil(W/64))."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    h, w = bits.shape
    k = words_per_row(w)
    if w < k * WORD:
        padded = np.zeros((h, k * WORD), dtype=np.uint8)
        padded[:, :w] = bits
        bits = padded
    return np.packbits(bits, axis=1, bitorder="little").view(DTYPE)


def unpack(words, width):
    """Expand packed words back to a 2-D bool array of shape (H, width)."""
    h = words.shape[0]
    flat = np.unpackbits(words.view(np.uint8).reshape(h, -1), axis=1,
                         bitorder="little")
    return flat[:, :width].astype(bool)


def popcount(words):
    return int(np.bitwise_count(words).sum())


def fill_value(ones):
    return _FULL if ones else np.uint64(0)


def shift_x(words, s, ones=False):
    """Shift every row by ``s`` pixels along x (positive moves bits toward
    larger x). Vacated positions, including those past either edge of the
    word array, take the fill value. Padding bits are not re-masked here.
    """
    if s == 0:
        return words
    h, k = words.shape
    fillw = fill_value(ones)
    q, r = divmod(abs(s), WORD)
    if q >= k:
        return np.full_like(words, fillw)
    fcols = np.full((h, q + 1), fillw, dtype=DTYPE)
    if s > 0:
        ext = np.concatenate([fcols, words], axis=1)
        lo = ext[:, 1:k + 1]
        if r == 0:
            return lo.copy()
        hi = ext[:, 0:k]
        return (lo << np.uint64(r)) | (hi >> np.uint64(WORD - r))
    ext = np.concatenate([words, fcols], axis=1)
    lo = ext[:, q:q + k]
    if r == 0:
        return lo.copy()
    hi = ext[:, q + 1:q + k + 1]
    return (lo >> np.uint64(r)) | (hi << np.uint64(WORD - r))


def shift_y(words, s, ones=False):
    """Shift rows by ``s`` (positive moves rows toward larger y)."""
    if s == 0:
        return words
    h, k = words.shape
    fillw = fill_value(ones)
    if abs(s) >= h:
        return np.full_like(words, fillw)
    frows = np.full((abs(s), k), fillw, dtype=DTYPE)
    if s > 0:
        return np.concatenate([frows, words[:h - s]], axis=0)
    return np.concatenate([words[-s:], frows], axis=0)


def _span_dir(words, k, combine, ones, sign):
    # combine of shifts over [0, sign*k] by doubling: an accumulator
    # covering offsets [0, L) absorbs a copy of itself shifted by
    # s <= L, so the covered span grows geometrically. One-directional
    # on purpose: every partial result sits at its final bit position,
    # so nothing is pushed past a word-array edge and shifted back.
    acc = words
    length = 1
    while length <= k:
        s = min(length, k + 1 - length)
        acc = combine(acc, shift_x(acc, sign * s, ones=ones))
        length += s
    return acc


def span_and(words, k, ones=True):
    """AND of ``words`` shifted by every offset in [-k, k] along x."""
    if k == 0:
        return words
    return (_span_dir(words, k, np.bitwise_and, ones, 1)
            & _span_dir(words, k, np.bitwise_and, ones, -1))


def span_or(words, k):
    """OR of ``words`` shifted by every offset in [-k, k] along x."""
    if k == 0:
        return words
    return (_span_dir(words, k, np.bitwise_or, False, 1)
            | _span_dir(words, k, np.bitwise_or, False, -1))
