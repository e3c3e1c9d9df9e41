"""Image primitives shared by the descriptor pipelines.

Images are 8-bit grayscale, stored row-major as ``uint8`` arrays of shape
(height, width).  Colour inputs are reduced with BT.709 luma weights.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import _kernels
from .errors import DecodeError, InvalidRegion, InvalidSize, NotFound

LUMA_WEIGHTS = (0.2126, 0.7152, 0.0722)
DEFAULT_RESOLUTION = (512, 512)

_FORMATS = {"PNG", "JPEG"}


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit luminance image; ``data`` is a (height, width) uint8 array."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidSize(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255):
                raise InvalidSize("pixel values must lie in 0..255")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "data", np.ascontiguousarray(arr))

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    @classmethod
    def from_values(cls, width, height, values):
        """Build from a flat row-major sequence of length ``width * height``."""
        values = np.asarray(values)
        if values.size != width * height:
            raise InvalidSize(f"{values.size} values for a {width}x{height} image")
        return cls(values.reshape(height, width))

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None


@dataclass(frozen=True)
class Rect:
    """Axis-aligned pixel rectangle: columns [x, x+width), rows [y, y+height)."""

    x: int
    y: int
    width: int
    height: int

    def intersects(self, other):
        return not (
            self.x + self.width <= other.x
            or other.x + other.width <= self.x
            or self.y + self.height <= other.y
            or other.y + other.height <= self.y
        )

    def as_list(self):
        return [self.x, self.y, self.width, self.height]


@dataclass(frozen=True, eq=False)
class GradientField:
    """Per-pixel gradient magnitude and unsigned orientation in degrees."""

    magnitude: np.ndarray
    orientation: np.ndarray

    @property
    def width(self):
        return self.magnitude.shape[1]

    @property
    def height(self):
        return self.magnitude.shape[0]


def rgb_to_luma(rgb):
    """BT.709 luma, rounded half-up to the nearest integer."""
    rgb = np.asarray(rgb, dtype=np.float64)
    y = rgb[..., 0] * LUMA_WEIGHTS[0] + rgb[..., 1] * LUMA_WEIGHTS[1] + rgb[..., 2] * LUMA_WEIGHTS[2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)


def load_image(path):
    """Decode a PNG or JPEG file into a :class:`GrayImage`."""
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such image: {path}")
    try:
        with Image.open(path) as im:
            if im.format not in _FORMATS:
                raise DecodeError(f"{path}: unsupported format {im.format!r}")
            im.load()
            if im.mode == "L":
                return GrayImage(np.asarray(im, dtype=np.uint8))
            if im.mode in ("I;16", "I;16B", "I"):
                raise DecodeError(f"{path}: only 8-bit images are supported (mode {im.mode})")
            rgb = np.asarray(im.convert("RGB"))
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        if isinstance(exc, NotFound):
            raise
        raise DecodeError(f"{path}: {exc}") from exc
    return GrayImage(rgb_to_luma(rgb))


def save_image(img, path):
    """Write a GrayImage as PNG (or JPEG, by suffix)."""
    Image.fromarray(img.data, mode="L").save(path)


def _bilinear_axis(n_src, n_dst):
    # pixel-centre alignment: dst centre i maps to (i + 0.5) * scale - 0.5
    scale = n_src / n_dst
    pos = (np.arange(n_dst) + 0.5) * scale - 0.5
    pos = np.clip(pos, 0.0, n_src - 1)
    lo = np.floor(pos).astype(np.int64)
    hi = np.minimum(lo + 1, n_src - 1)
    frac = pos - lo
    return lo, hi, frac


def resize(img, w, h):
    """Bilinear resample to ``w`` x ``h`` (pixel-centre aligned, edge clamped)."""
    if w < 2 or h < 2:
        raise InvalidSize(f"target size {w}x{h} is below 2x2")
    if (w, h) == (img.width, img.height):
        return GrayImage(img.data.copy())
    src = img.data.astype(np.float64)
    x0, x1, fx = _bilinear_axis(img.width, w)
    y0, y1, fy = _bilinear_axis(img.height, h)
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bottom = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    out = top * (1 - fy)[:, None] + bottom * fy[:, None]
    return GrayImage(np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8))


def _gradients_batch(stack):
    """Gradients of a (n, h, w) stack; see ``_kernels`` for the definition."""
    return _kernels.active.gradients(np.ascontiguousarray(stack))


def gradients(img):
    if img.width < 2 or img.height < 2:
        raise InvalidSize(f"gradients need at least 2x2 pixels, got {img.width}x{img.height}")
    mag, ori = _gradients_batch(img.data[None])
    return GradientField(mag[0], ori[0])


def entropy_from_counts(counts):
    """Shannon entropy in bits of histogram ``counts`` along the last axis."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum(axis=-1, keepdims=True)
    p = np.divide(counts, total, out=np.zeros_like(counts), where=total > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return np.clip(terms.sum(axis=-1), 0.0, 8.0)


def patch_entropy(img, rect):
    """Entropy (bits) of the 256-bin intensity histogram inside ``rect``."""
    if (
        rect.width < 1
        or rect.height < 1
        or rect.x < 0
        or rect.y < 0
        or rect.x + rect.width > img.width
        or rect.y + rect.height > img.height
    ):
        raise InvalidRegion(f"{rect} is empty or outside a {img.width}x{img.height} image")
    patch = img.data[rect.y:rect.y + rect.height, rect.x:rect.x + rect.width]
    return float(entropy_from_counts(np.bincount(patch.ravel(), minlength=256)))


def region_histograms(img, region_size):
    """Intensity histograms for every tile of a ``region_size`` grid."""
    return _kernels.active.region_histograms(img.data, int(region_size))
