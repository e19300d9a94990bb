"""Portable anymap images and colour-similarity affinity relations."""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ParseError, UsageError
from .fmtr import Entries
from .membership import check_precision, quantize_array
from .relation import from_entries

MAX_DIFF = 3 * 255 ** 2
NORMALIZATIONS = ("delta", "sqrt-delta")
_MAGIC = {b"P2": (1, False), b"P3": (3, False), b"P5": (1, True), b"P6": (3, True)}
_WS = b" \t\n\r\v\f"


@dataclass(eq=False)
class Image:
    """RGB raster; ``pixels`` has shape ``(height, width, 3)`` and dtype uint8."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width, 3):
            raise UsageError(
                f"pixel array shape {px.shape} != ({self.height}, {self.width}, 3)")
        if px.size and (px.min() < 0 or px.max() > 255):
            raise DomainError("channel values must lie in [0, 255]")
        self.pixels = px.astype(np.uint8)

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise UsageError(f"expected (h, w) or (h, w, 3) array, got shape {arr.shape}")
        return cls(arr.shape[1], arr.shape[0], arr)

    @property
    def n(self):
        return self.width * self.height

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.pixels, other.pixels)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def skip_space(self):
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos:self.pos + 1]
            if ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            elif ch in _WS:
                self.pos += 1
            else:
                break

    def token(self, what):
        self.skip_space()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos:self.pos + 1] not in _WS \
                and data[self.pos:self.pos + 1] != b"#":
            self.pos += 1
        if start == self.pos:
            raise ParseError(f"unexpected end of data reading {what}", offset=start)
        return self.data[start:self.pos], start

    def integer(self, what):
        tok, at = self.token(what)
        if not tok.isdigit():
            raise ParseError(f"expected integer for {what}, got {tok!r}", offset=at)
        return int(tok), at


def load_image(data):
    """Decode a P2, P3, P5 or P6 file with maxval 255."""
    data = bytes(data)
    rd = _Reader(data)
    magic = data[:2]
    if magic not in _MAGIC:
        raise ParseError(f"unknown magic number {magic!r}", offset=0)
    channels, binary = _MAGIC[magic]
    rd.pos = 2
    if rd.pos < len(data) and data[rd.pos:rd.pos + 1] not in _WS + b"#":
        raise ParseError("magic number must be followed by whitespace", offset=2)
    width, at = rd.integer("width")
    height, at_h = rd.integer("height")
    if width < 1 or height < 1:
        raise ParseError(f"image size {width}x{height} must be positive", offset=at)
    maxval, at = rd.integer("maxval")
    if maxval != 255:
        raise ParseError(f"maxval must be 255, got {maxval}", offset=at)
    count = width * height * channels
    if binary:
        if rd.pos >= len(data) or data[rd.pos:rd.pos + 1] not in _WS:
            raise ParseError("missing whitespace before raster", offset=rd.pos)
        start = rd.pos + 1
        raster = data[start:start + count]
        if len(raster) < count:
            raise ParseError(
                f"truncated raster: need {count} bytes, found {len(raster)}", offset=start)
        values = np.frombuffer(raster, dtype=np.uint8)
    else:
        values = np.empty(count, dtype=np.int64)
        for idx in range(count):
            v, at = rd.integer("sample")
            if v > 255:
                raise ParseError(f"sample {v} exceeds maxval", offset=at)
            values[idx] = v
    px = values.reshape(height, width, channels)
    if channels == 1:
        px = np.repeat(px, 3, axis=2)
    return Image(width, height, px)


def read_image(path):
    with open(path, "rb") as fh:
        return load_image(fh.read())


def encode_pnm(img, fmt="P6"):
    """Encode as P6/P3 (colour) or P5/P2 (first channel only)."""
    if fmt not in ("P2", "P3", "P5", "P6"):
        raise UsageError(f"unsupported format {fmt!r}")
    px = img.pixels if fmt in ("P3", "P6") else img.pixels[:, :, 0]
    head = f"{fmt}\n{img.width} {img.height}\n255\n".encode("ascii")
    if fmt in ("P5", "P6"):
        return head + px.astype(np.uint8).tobytes()
    rows = (" ".join(map(str, row.ravel().tolist())) for row in px)
    return head + ("\n".join(rows) + "\n").encode("ascii")


def color_diff(c, d):
    """Sum of squared channel differences of two RGB pixels."""
    return sum((int(a) - int(b)) ** 2 for a, b in zip(c, d))


@dataclass(frozen=True)
class SimilarityContext:
    delta: int
    precision: int
    normalize: str = "delta"
    connectivity: int = 4


def _max_pair_diff(colors, chunk=256):
    colors = colors.astype(np.int64)
    best = 0
    for s in range(0, len(colors), chunk):
        block = colors[s:s + chunk]
        d = ((block[:, None, :] - colors[None, :, :]) ** 2).sum(axis=2)
        best = max(best, int(d.max()))
    return best


def compute_delta(img, precision=1, normalize="delta", connectivity=4):
    """Largest colour difference over all pixel pairs, packaged as a context."""
    if img.n == 0:
        raise UsageError("empty image")
    if normalize not in NORMALIZATIONS:
        raise UsageError(f"normalize must be one of {NORMALIZATIONS}")
    if connectivity not in (4, 8):
        raise UsageError("connectivity must be 4 or 8")
    colors = np.unique(img.pixels.reshape(-1, 3), axis=0)
    return SimilarityContext(_max_pair_diff(colors), check_precision(precision),
                             normalize, connectivity)


def _simil_from_diff(diff, ctx):
    diff = np.asarray(diff, dtype=float)
    if ctx.delta == 0:
        return np.ones_like(diff)
    denom = ctx.delta if ctx.normalize == "delta" else math.sqrt(ctx.delta)
    return np.clip(1.0 - np.sqrt(diff) / denom, 0.0, 1.0)


def simil(c, d, ctx):
    return float(_simil_from_diff(color_diff(c, d), ctx))


def _neighbor_pairs(height, width, connectivity):
    idx = np.arange(height * width).reshape(height, width)
    pairs = [(idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])]
    if connectivity == 8:
        pairs += [(idx[:-1, :-1], idx[1:, 1:]), (idx[:-1, 1:], idx[1:, :-1])]
    a = np.concatenate([p[0].ravel() for p in pairs])
    b = np.concatenate([p[1].ravel() for p in pairs])
    return a, b


def affinity_entries(img, ctx):
    """Sparse raw entries of the reflexive, symmetric neighbour affinity."""
    top = 10 ** ctx.precision
    flat = img.pixels.reshape(-1, 3).astype(np.int64)
    a, b = _neighbor_pairs(img.height, img.width, ctx.connectivity)
    diff = ((flat[a] - flat[b]) ** 2).sum(axis=1)
    q = quantize_array(_simil_from_diff(diff, ctx), ctx.precision)
    diag = np.arange(img.n)
    rows = np.concatenate((diag, a, b))
    cols = np.concatenate((diag, b, a))
    qs = np.concatenate((np.full(img.n, top, dtype=np.int64), q, q))
    keep = qs > 0
    return Entries(img.n, ctx.precision, rows[keep], cols[keep], qs[keep])


def build_affinity(img, table, normalize="delta", connectivity=4):
    """Affinity relation of ``img`` in ``table`` (precision taken from the table)."""
    ctx = compute_delta(img, table.precision, normalize, connectivity)
    return from_entries(table, affinity_entries(img, ctx))
