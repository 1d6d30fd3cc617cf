"""File formats: dataset manifests, mask images, params and grid files.

Masks travel as ordinary images (PNG, PGM, anything Pillow reads, with
luminance > 127 as foreground) or as PBM where a set bit is foreground.
Pillow maps PBM set bits to black, i.e. luminance 0, so PBM goes
through a small codec here instead to keep the bit convention.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .classification import ThresholdParams
from .mask_core import BinaryMask, ProbabilityMap
from .training import GridSpec


class ManifestError(ValueError):
    """Malformed manifest, params, or grid file."""


class DecodeError(ValueError):
    """Unreadable or unsupported image payload."""


@dataclass(frozen=True)
class ManifestEntry:
    """One dataset item.

    ``target`` is the ground-truth mask path for f1 datasets and the
    class label for ap datasets. ``group`` pools pixel counts per video
    or subject; it is all-or-nothing across a manifest.
    """

    prediction: str
    target: str
    group: str | None = None


@dataclass(frozen=True)
class DatasetManifest:
    dataset_id: str
    metric: str
    entries: tuple
    positive: str | None = None

    def __post_init__(self):
        if self.metric not in ("f1", "ap"):
            raise ManifestError(
                f"metric must be 'f1' or 'ap', got {self.metric!r}")
        if self.metric == "ap" and not self.positive:
            raise ManifestError(
                "ap datasets need a 'positive' label in the manifest")
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ManifestError("manifest has no entries")
        grouped = [e.group is not None for e in self.entries]
        if any(grouped) and not all(grouped):
            raise ManifestError(
                "either every entry has a group or none does")

    @property
    def grouped(self):
        return self.entries[0].group is not None


def _split_fields(line):
    if "\t" in line:
        return [f.strip() for f in line.split("\t")]
    return line.split()


def load_manifest(path):
    """Parse a manifest file.

    Header lines are ``key = value`` (id, metric, positive); entry
    lines hold 2 or 3 fields: prediction, target, optional group.
    Blank lines and ``#`` comments are skipped. Errors carry the line
    number.
    """
    headers = {}
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" in line and not entries:
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip()
                if key not in ("id", "metric", "positive"):
                    raise ManifestError(
                        f"{path}:{lineno}: unknown header key {key!r}")
                if key in headers:
                    raise ManifestError(
                        f"{path}:{lineno}: duplicate header {key!r}")
                if not value:
                    raise ManifestError(
                        f"{path}:{lineno}: empty value for {key!r}")
                headers[key] = value
                continue
            fields = _split_fields(line)
            if len(fields) == 2:
                entries.append(ManifestEntry(fields[0], fields[1]))
            elif len(fields) == 3:
                entries.append(ManifestEntry(fields[0], fields[1], fields[2]))
            else:
                raise ManifestError(
                    f"{path}:{lineno}: expected 2 or 3 fields, "
                    f"got {len(fields)}")
    if "id" not in headers:
        raise ManifestError(f"{path}: missing 'id' header")
    try:
        return DatasetManifest(dataset_id=headers["id"],
                               metric=headers.get("metric", "f1"),
                               positive=headers.get("positive"),
                               entries=tuple(entries))
    except ManifestError as exc:
        raise ManifestError(f"{path}: {exc}") from None


def save_manifest(manifest, path):
    lines = [f"id = {manifest.dataset_id}", f"metric = {manifest.metric}"]
    if manifest.positive is not None:
        lines.append(f"positive = {manifest.positive}")
    for e in manifest.entries:
        fields = [e.prediction, e.target]
        if e.group is not None:
            fields.append(e.group)
        lines.append("\t".join(fields))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _pbm_tokens(data, count):
    # yields `count` header tokens, skipping whitespace and # comments
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise DecodeError("truncated header")
        ch = data[pos:pos + 1]
        if ch == b"#":
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    return tokens, pos


def _decode_pbm(data, path):
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise DecodeError(f"{path}: not a PBM payload")
    try:
        (w_tok, h_tok), pos = _pbm_tokens(data[2:], 2)
        width, height = int(w_tok), int(h_tok)
    except (DecodeError, ValueError) as exc:
        raise DecodeError(f"{path}: bad PBM header ({exc})") from None
    if width < 1 or height < 1:
        raise DecodeError(f"{path}: bad PBM dimensions {width}x{height}")
    body = data[2 + pos:]
    if magic == b"P1":
        digits = [c for c in body if c in (0x30, 0x31)]
        if len(digits) < width * height:
            raise DecodeError(f"{path}: truncated PBM data")
        bits = np.array(digits[:width * height], dtype=np.uint8) - 0x30
        return BinaryMask.from_array(bits.reshape(height, width))
    body = body[1:]  # single whitespace byte separates header from raster
    stride = (width + 7) // 8
    if len(body) < stride * height:
        raise DecodeError(f"{path}: truncated PBM data")
    rows = np.frombuffer(body[:stride * height], dtype=np.uint8)
    bits = np.unpackbits(rows.reshape(height, stride), axis=1)
    return BinaryMask.from_array(bits[:, :width])


def _encode_pbm(mask, path):
    arr = mask.to_array()
    packed = np.packbits(arr, axis=1)
    header = f"P4\n{mask.width} {mask.height}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + packed.tobytes())


def _load_gray(path):
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("L"))
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"{path}: cannot decode image ({exc})") from None


def decode_mask(path):
    """Read a mask image. PBM set bits are foreground; any other format
    takes luminance > 127 as foreground."""
    path = str(path)
    if path.lower().endswith(".pbm"):
        with open(path, "rb") as fh:
            return _decode_pbm(fh.read(), path)
    return BinaryMask.from_array(_load_gray(path) > 127)


def encode_mask(mask, path):
    path = str(path)
    if path.lower().endswith(".pbm"):
        _encode_pbm(mask, path)
        return
    data = np.where(mask.to_array(), np.uint8(255), np.uint8(0))
    Image.fromarray(data, mode="L").save(path)


def decode_probability_map(path):
    """Read a grayscale score map (PNG/PGM and friends)."""
    return ProbabilityMap(_load_gray(str(path)))


def encode_probability_map(pmap, path):
    Image.fromarray(pmap.values, mode="L").save(str(path))


def _parse_kv_file(path, allowed):
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            key = key.strip()
            if not eq or key not in allowed:
                raise ManifestError(
                    f"{path}:{lineno}: expected '<{'|'.join(allowed)}> = ...'")
            if key in values:
                raise ManifestError(f"{path}:{lineno}: duplicate key {key!r}")
            values[key] = (value.strip(), lineno)
    missing = [k for k in allowed if k not in values]
    if missing:
        raise ManifestError(f"{path}: missing keys {', '.join(missing)}")
    return values


_AXES = ("a1", "a2", "b1", "b2", "c1")


def load_params(path):
    """Read threshold params from a ``key = value`` file."""
    values = _parse_kv_file(path, _AXES)
    parsed = {}
    for key in _AXES:
        text, lineno = values[key]
        conv = int if key in ("b1", "b2") else float
        try:
            parsed[key] = conv(text)
        except ValueError:
            raise ManifestError(
                f"{path}:{lineno}: {key} must be {conv.__name__}, "
                f"got {text!r}") from None
    try:
        return ThresholdParams(**parsed)
    except ValueError as exc:
        raise ManifestError(f"{path}: {exc}") from None


def save_params(params, path):
    with open(path, "w", encoding="utf-8") as fh:
        for key in _AXES:
            fh.write(f"{key} = {getattr(params, key)!r}\n")


def load_grid(path):
    """Read a grid file: one ``axis = v1 v2 ...`` line per axis."""
    values = _parse_kv_file(path, _AXES)
    axes = {}
    for key in _AXES:
        text, lineno = values[key]
        conv = int if key in ("b1", "b2") else float
        try:
            axes[key] = tuple(conv(tok) for tok in text.replace(",", " ").split())
        except ValueError:
            raise ManifestError(
                f"{path}:{lineno}: {key} values must be {conv.__name__}") from None
        if not axes[key]:
            raise ManifestError(f"{path}:{lineno}: {key} has no values")
    return GridSpec(**axes)
