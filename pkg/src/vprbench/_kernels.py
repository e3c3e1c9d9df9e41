"""Hot inner loops, in two interchangeable flavours.

Each kernel exists as a numba ``@njit`` function and as a pure-numpy
function with identical semantics.  The active set is chosen once at import
time: numba is used when it imports cleanly and ``VPRBENCH_DISABLE_JIT`` is
unset (or ``0``).  Both sets stay importable so tests and
``benchmarks/bench_kernels.py`` can compare them directly.

    from vprbench import _kernels
    _kernels.BACKEND                  # "numba" or "numpy"
    _kernels.numpy_impl.cell_histograms(...)
"""

import os
import types

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("VPRBENCH_DISABLE_JIT", "0").strip().lower() not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy reference path
# ---------------------------------------------------------------------------

def _np_gradients(stack):
    """Central-difference gradients over a (n, h, w) stack, edges replicated.

    Returns (magnitude, orientation) in float64; orientation in degrees within
    [0, 180), forced to 0 where the magnitude is 0.
    """
    a = stack.astype(np.float64)
    p = np.pad(a, ((0, 0), (1, 1), (1, 1)), mode="edge")
    gx = p[:, 1:-1, 2:] - p[:, 1:-1, :-2]
    gy = p[:, 2:, 1:-1] - p[:, :-2, 1:-1]
    mag = np.sqrt(gx * gx + gy * gy)
    ori = np.mod(np.arctan2(gy, gx) * (180.0 / np.pi), 180.0)
    ori[ori >= 180.0] = 0.0
    ori[mag == 0] = 0.0
    return mag, ori


def _np_orientation_bins(ori, bins):
    width = 180.0 / bins
    return (np.floor(ori / width + 0.5).astype(np.int64)) % bins


def _np_cell_histograms(mag, ori, cell, bins):
    """Magnitude-weighted orientation histograms per cell.

    ``mag`` and ``ori`` have shape (n, h, w) with h, w multiples of ``cell``.
    Returns (n, h // cell, w // cell, bins).  Votes go to the nearest bin
    centre, centres at ``k * 180 / bins``.
    """
    n, h, w = mag.shape
    cy, cx = h // cell, w // cell
    b = _np_orientation_bins(ori, bins)
    rows = (np.arange(h) // cell)[None, :, None]
    cols = (np.arange(w) // cell)[None, None, :]
    imgs = np.arange(n)[:, None, None]
    flat = ((imgs * cy + rows) * cx + cols) * bins + b
    out = np.bincount(flat.ravel(), weights=mag.ravel(), minlength=n * cy * cx * bins)
    return out.reshape(n, cy, cx, bins)


def _np_block_normalize(hist, block_cells, stride_cells, eps):
    """Concatenate L2-normalised blocks of cells, row-major.

    ``hist`` is (n, cy, cx, bins).  Returns (n, dim).
    """
    n, cy, cx, bins = hist.shape
    by = (cy - block_cells) // stride_cells + 1
    bx = (cx - block_cells) // stride_cells + 1
    ys = np.arange(by) * stride_cells
    xs = np.arange(bx) * stride_cells
    off = np.arange(block_cells)
    # (n, by, bx, block_cells, block_cells, bins)
    blocks = hist[:, (ys[:, None] + off)[:, None, :, None], (xs[:, None] + off)[None, :, None, :], :]
    blocks = blocks.reshape(n, by, bx, block_cells * block_cells * bins)
    norms = np.sqrt(np.sum(blocks * blocks, axis=-1, keepdims=True) + eps)
    return (blocks / norms).reshape(n, -1)


def _np_region_histograms(img, region):
    """256-bin intensity counts for every non-overlapping ``region`` tile."""
    h, w = img.shape
    ry, rx = h // region, w // region
    rows = (np.arange(h) // region)[:, None]
    cols = (np.arange(w) // region)[None, :]
    flat = (rows * rx + cols) * 256 + img.astype(np.int64)
    out = np.bincount(flat.ravel(), minlength=ry * rx * 256)
    return out.reshape(ry, rx, 256)


numpy_impl = types.SimpleNamespace(
    name="numpy",
    gradients=_np_gradients,
    cell_histograms=_np_cell_histograms,
    block_normalize=_np_block_normalize,
    region_histograms=_np_region_histograms,
)


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

def _build_numba_impl():
    njit = numba.njit(cache=True, nogil=True)

    @njit
    def cell_histograms(mag, ori, cell, bins):
        n, h, w = mag.shape
        cy = h // cell
        cx = w // cell
        out = np.zeros((n, cy, cx, bins))
        width = 180.0 / bins
        for k in range(n):
            for y in range(h):
                yc = y // cell
                for x in range(w):
                    b = np.int64(np.floor(ori[k, y, x] / width + 0.5)) % bins
                    out[k, yc, x // cell, b] += mag[k, y, x]
        return out

    @njit
    def block_normalize(hist, block_cells, stride_cells, eps):
        n, cy, cx, bins = hist.shape
        by = (cy - block_cells) // stride_cells + 1
        bx = (cx - block_cells) // stride_cells + 1
        blen = block_cells * block_cells * bins
        out = np.empty((n, by * bx * blen))
        for k in range(n):
            pos = 0
            for j in range(by):
                for i in range(bx):
                    ss = 0.0
                    for dy in range(block_cells):
                        for dx in range(block_cells):
                            for b in range(bins):
                                v = hist[k, j * stride_cells + dy, i * stride_cells + dx, b]
                                ss += v * v
                    norm = np.sqrt(ss + eps)
                    for dy in range(block_cells):
                        for dx in range(block_cells):
                            for b in range(bins):
                                out[k, pos] = hist[k, j * stride_cells + dy, i * stride_cells + dx, b] / norm
                                pos += 1
        return out

    @njit
    def region_histograms(img, region):
        h, w = img.shape
        ry = h // region
        rx = w // region
        out = np.zeros((ry, rx, 256), dtype=np.int64)
        for y in range(ry * region):
            for x in range(rx * region):
                out[y // region, x // region, img[y, x]] += 1
        return out

    return types.SimpleNamespace(
        name="numba",
        # numpy's vectorised arctan2 beats a scalar loop and keeps both
        # backends bit-identical at bin boundaries
        gradients=_np_gradients,
        cell_histograms=cell_histograms,
        block_normalize=block_normalize,
        region_histograms=region_histograms,
    )


numba_impl = _build_numba_impl() if numba is not None else None

if numba_impl is not None and not _DISABLED:
    active = numba_impl
else:
    active = numpy_impl

BACKEND = active.name
