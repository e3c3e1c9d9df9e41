"""Synthetic desk-scale datasets for smoke runs and tests."""

from pathlib import Path

import numpy as np

from .dataset import write_ground_truth
from .imaging import GrayImage, resize, save_image


def place_image(seed, size=(512, 512)):
    """A textured image unique to ``seed``: coarse random blobs plus fine grain."""
    rng = np.random.default_rng(seed)
    w, h = size
    coarse = GrayImage(rng.integers(0, 256, size=(max(2, h // 32), max(2, w // 32)), dtype=np.uint8))
    base = resize(coarse, w, h).data.astype(np.float64)
    grain = rng.normal(0.0, 12.0, size=(h, w))
    return GrayImage(np.clip(base + grain, 0, 255).astype(np.uint8))


def perturb(img, seed, noise=6.0):
    """Same place, different visit: additive noise and a small brightness shift."""
    rng = np.random.default_rng(seed)
    out = img.data.astype(np.float64) + rng.normal(0.0, noise, img.data.shape) + rng.uniform(-10, 10)
    return GrayImage(np.clip(out, 0, 255).astype(np.uint8))


def make_dataset(directory, n=10, size=(512, 512), seed=0, identical=True):
    """Write ``n`` places to ``directory/{query,ref}`` with an identity ground truth.

    With ``identical`` the query images are byte-for-byte copies of the
    references; otherwise each query is a perturbed revisit.
    """
    directory = Path(directory)
    (directory / "query").mkdir(parents=True, exist_ok=True)
    (directory / "ref").mkdir(parents=True, exist_ok=True)
    for i in range(n):
        ref = place_image(seed * 100_003 + i, size)
        query = ref if identical else perturb(ref, seed * 100_003 + n + i)
        save_image(ref, directory / "ref" / f"{i:05d}.png")
        save_image(query, directory / "query" / f"{i:05d}.png")
    write_ground_truth(list(range(n)), directory / "ground_truth.csv")
    return directory
