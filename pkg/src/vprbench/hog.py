"""Global HOG descriptor and cosine comparison."""

from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import DimMismatch, GridMismatch, InvalidParam
from .imaging import _gradients_batch

BLOCK_EPS = 1e-12


@dataclass(frozen=True)
class HogParams:
    cell_size: int = 8
    block_size: int = 16
    block_stride: int = 8
    bins: int = 9

    def __post_init__(self):
        if self.cell_size < 1 or self.block_size < 1 or self.block_stride < 1:
            raise InvalidParam(f"HOG sizes must be positive: {self}")
        if self.block_size % self.cell_size or self.block_stride % self.cell_size:
            raise InvalidParam("block_size and block_stride must be multiples of cell_size")
        if self.bins < 2:
            raise InvalidParam("bins must be >= 2")

    @property
    def block_cells(self):
        return self.block_size // self.cell_size

    @property
    def stride_cells(self):
        return self.block_stride // self.cell_size

    def grid(self, width, height):
        """Number of blocks (x, y) for an image of the given size."""
        if width % self.cell_size or height % self.cell_size:
            raise GridMismatch(f"{width}x{height} is not a multiple of cell size {self.cell_size}")
        cx, cy = width // self.cell_size, height // self.cell_size
        if cx < self.block_cells or cy < self.block_cells:
            raise GridMismatch(f"{width}x{height} is smaller than one {self.block_size}px block")
        return (
            (cx - self.block_cells) // self.stride_cells + 1,
            (cy - self.block_cells) // self.stride_cells + 1,
        )

    def dim(self, width, height):
        bx, by = self.grid(width, height)
        return bx * by * self.block_cells ** 2 * self.bins

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class GlobalDescriptor:
    values: np.ndarray

    @property
    def dim(self):
        return self.values.shape[0]


def cell_histograms(stack, params):
    """Per-cell orientation histograms (before block normalisation).

    ``stack`` is a (n, h, w) array of patches, all of the same size.
    """
    mag, ori = _gradients_batch(stack)
    return _kernels.active.cell_histograms(mag, ori, params.cell_size, params.bins)


def hog_batch(stack, params=HogParams()):
    """HOG vectors for a (n, h, w) stack of equally sized patches -> (n, dim)."""
    stack = np.asarray(stack)
    params.grid(stack.shape[2], stack.shape[1])
    hist = cell_histograms(stack, params)
    return _kernels.active.block_normalize(hist, params.block_cells, params.stride_cells, BLOCK_EPS)


def hog_describe(img, params=HogParams()):
    return GlobalDescriptor(hog_batch(img.data[None], params)[0])


def _values(d):
    return d.values if isinstance(d, GlobalDescriptor) else np.asarray(d, dtype=np.float64)


def cosine(a, b):
    """Cosine similarity of two vectors; 0 when either has zero norm."""
    a, b = _values(a), _values(b)
    if a.shape != b.shape:
        raise DimMismatch(f"descriptor dims differ: {a.shape} vs {b.shape}")
    sa = np.max(np.abs(a), initial=0.0)
    sb = np.max(np.abs(b), initial=0.0)
    if sa == 0.0 or sb == 0.0:
        return 0.0
    # rescale so squared norms neither underflow nor overflow
    a, b = a / sa, b / sb
    denom = np.dot(a, a) * np.dot(b, b)
    # sqrt(x*x) == x exactly, so identical inputs score exactly 1.0
    return float(min(1.0, max(-1.0, np.dot(a, b) / np.sqrt(denom))))


hog_compare = cosine
