"""Regional, entropy-gated HOG (CoHOG-style) descriptor and matcher.

The image is tiled into non-overlapping square regions.  Tiles whose
intensity entropy reaches ``entropy_threshold`` are kept, each is described
with HOG computed on the tile's own pixels, and two images are scored by the
mean over query regions of the best cosine against any reference region.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDescriptorSet, GridMismatch, InvalidParam
from .hog import GlobalDescriptor, HogParams, hog_batch
from .imaging import Rect, entropy_from_counts, region_histograms


@dataclass(frozen=True)
class CohogParams:
    region_size: int = 16
    entropy_threshold: float = 0.5
    hog: HogParams = field(default_factory=HogParams)

    def __post_init__(self):
        if self.region_size < 1:
            raise InvalidParam("region_size must be positive")
        if not 0.0 <= self.entropy_threshold <= 8.0:
            raise InvalidParam("entropy_threshold must lie in [0, 8] bits")
        try:
            self.hog.grid(self.region_size, self.region_size)
        except GridMismatch as exc:
            raise InvalidParam(f"region size {self.region_size} cannot hold a HOG block: {exc}") from None

    def to_dict(self):
        return {
            "region_size": self.region_size,
            "entropy_threshold": self.entropy_threshold,
            "hog": self.hog.to_dict(),
            "aggregation": "mean of per-query-region max cosine",
        }


@dataclass(eq=False)
class RegionalDescriptorSet:
    rects: list
    matrix: np.ndarray  # (count, dim), one row per region

    def __post_init__(self):
        if len(self.rects) != self.matrix.shape[0]:
            raise InvalidParam("one descriptor row is required per region")

    @property
    def count(self):
        return len(self.rects)

    @property
    def regions(self):
        return [(r, GlobalDescriptor(self.matrix[i])) for i, r in enumerate(self.rects)]


def entropy_map(img, region_size):
    """Entropy in bits of each non-overlapping ``region_size`` tile, shape (rows, cols)."""
    if region_size < 1 or img.width % region_size or img.height % region_size:
        raise GridMismatch(f"region size {region_size} does not divide {img.width}x{img.height}")
    return entropy_from_counts(region_histograms(img, region_size))


def select_rois(emap, threshold, region_size=1):
    """Tiles with entropy >= ``threshold``, as rectangles in row-major order.

    Falls back to the single highest-entropy tile when nothing qualifies
    (ties go to the first tile in row-major order).
    """
    emap = np.asarray(emap, dtype=np.float64)
    if emap.size == 0:
        raise InvalidParam("entropy map is empty")
    rows, cols = np.nonzero(emap >= threshold)
    if rows.size == 0:
        r, c = np.unravel_index(int(np.argmax(emap)), emap.shape)
        rows, cols = np.array([r]), np.array([c])
    return [Rect(int(c) * region_size, int(r) * region_size, region_size, region_size) for r, c in zip(rows, cols)]


def cohog_describe(img, params=CohogParams()):
    emap = entropy_map(img, params.region_size)
    rects = select_rois(emap, params.entropy_threshold, params.region_size)
    s = params.region_size
    tiles = img.data.reshape(img.height // s, s, img.width // s, s).swapaxes(1, 2)
    stack = tiles[[r.y // s for r in rects], [r.x // s for r in rects]]
    return RegionalDescriptorSet(rects, hog_batch(stack, params.hog))


def _unit_rows(m):
    norms = np.sqrt(np.einsum("ij,ij->i", m, m))
    return np.divide(m, norms[:, None], out=np.zeros_like(m), where=norms[:, None] > 0)


def region_best_scores(query, ref):
    """Best cosine against ``ref`` for each query region."""
    if query.count == 0 or ref.count == 0:
        raise EmptyDescriptorSet("regional descriptor set is empty")
    sims = _unit_rows(query.matrix) @ _unit_rows(ref.matrix).T
    return np.clip(sims.max(axis=1), -1.0, 1.0)


def cohog_match(query, ref):
    return float(np.mean(region_best_scores(query, ref)))
