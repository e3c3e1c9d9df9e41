"""Similarity matrices, top-1 match selection and accuracy."""

from dataclasses import dataclass, field

import numpy as np

from .cohog import RegionalDescriptorSet, cohog_match
from .errors import DimMismatch, GroundTruthError, InvalidParam, KindMismatch
from .hog import GlobalDescriptor, cosine

METRICS = ("cosine", "l1", "regional")


def l1_similarity(a, b):
    """Negated L1 distance: 0 for identical vectors, more negative = less similar."""
    a = a.values if isinstance(a, GlobalDescriptor) else np.asarray(a, dtype=np.float64)
    b = b.values if isinstance(b, GlobalDescriptor) else np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimMismatch(f"descriptor dims differ: {a.shape} vs {b.shape}")
    return -float(np.sum(np.abs(a - b)))


_PAIRWISE = {"cosine": cosine, "l1": l1_similarity, "regional": cohog_match}


def _kind(d):
    return "regional" if isinstance(d, RegionalDescriptorSet) else "global"


def pairwise(metric):
    try:
        return _PAIRWISE[metric]
    except KeyError:
        raise InvalidParam(f"unknown metric {metric!r}; expected one of {METRICS}") from None


@dataclass(eq=False)
class SimilarityMatrix:
    scores: np.ndarray
    metric: str

    @property
    def n_queries(self):
        return self.scores.shape[0]

    @property
    def n_refs(self):
        return self.scores.shape[1]


@dataclass
class GroundTruth:
    """``mapping[i]`` is the correct reference index for query ``i``."""

    mapping: list
    tolerance: int = 0

    def validate(self, n_queries, n_refs):
        if len(self.mapping) != n_queries:
            raise GroundTruthError(f"ground truth covers {len(self.mapping)} queries, dataset has {n_queries}")
        for q, r in enumerate(self.mapping):
            if not 0 <= r < n_refs:
                raise GroundTruthError(f"query {q} maps to reference {r}, outside [0, {n_refs})")


@dataclass
class MatchOutcome:
    best_indices: list
    matches_list: list
    accuracy: float = field(init=False)

    def __post_init__(self):
        n = len(self.matches_list)
        self.accuracy = sum(self.matches_list) / n if n else 0.0


def check_kinds(descriptors, metric):
    want = "regional" if metric == "regional" else "global"
    kinds = {_kind(d) for d in descriptors}
    if kinds != {want}:
        raise KindMismatch(f"metric {metric!r} needs {want} descriptors, got {sorted(kinds)}")


def score_row(query, refs, metric):
    """Scores of one query against every reference."""
    fn = pairwise(metric)
    return np.array([fn(query, r) for r in refs], dtype=np.float64)


def similarity_matrix(queries, refs, metric="cosine"):
    if not queries or not refs:
        raise InvalidParam("query and reference lists must be non-empty")
    pairwise(metric)
    check_kinds(list(queries) + list(refs), metric)
    scores = np.vstack([score_row(q, refs, metric) for q in queries])
    return SimilarityMatrix(scores, metric)


def evaluate_matches(m, gt):
    """Top-1 matching: argmax per row, ties to the lowest reference index."""
    scores = m.scores if isinstance(m, SimilarityMatrix) else np.asarray(m, dtype=np.float64)
    gt.validate(scores.shape[0], scores.shape[1])
    best = [int(i) for i in np.argmax(scores, axis=1)]
    matches = [int(abs(b - g) <= gt.tolerance) for b, g in zip(best, gt.mapping)]
    return MatchOutcome(best, matches)
