"""Real-Time Matched Frames.

Given a camera that delivers ``min(K*D*V, F)`` frames per second and a VPR
technique that completes ``floor(1/t_R)`` queries per second, only one frame
in every ``G`` can be matched in real time.  RMF counts the correct matches
among the frames the technique would actually get to see.
"""

import math
from dataclasses import asdict, dataclass

from .errors import InvalidParam


def _positive(**values):
    for name, v in values.items():
        if v is None or not math.isfinite(v) or v <= 0:
            raise InvalidParam(f"{name} must be a positive finite number, got {v!r}")


@dataclass(frozen=True)
class RmfParams:
    F: float = 50.0
    K: float = 1.0
    D: float = 10.0
    V: float = 2.0
    t_R: float = 1.0

    def __post_init__(self):
        _positive(F=self.F, K=self.K, D=self.D, V=self.V, t_R=self.t_R)


@dataclass
class RmfResult:
    incoming_rate: float
    vpr_rate: int
    vpr_rate_effective: float
    G: int
    N_q: int
    M_q: int
    RMF: int
    # set when floor(1/t_R) == 0 and the unfloored rate had to be used
    vpr_rate_unfloored: bool = False

    def to_dict(self):
        return asdict(self)


def incoming_frame_rate(F, K, D, V):
    _positive(F=F, K=K, D=D, V=V)
    return min(K * D * V, F)


def vpr_frame_rate(t_R):
    _positive(t_R=t_R)
    return math.floor(1.0 / t_R)


def frame_interval(incoming, vpr, t_R=None):
    """Frames that arrive per completed query, clamped to at least 1.

    When ``vpr`` is 0 (queries slower than one per second) the unfloored rate
    ``1 / t_R`` is used instead, so ``t_R`` must be supplied in that case.
    """
    if incoming is None or not incoming > 0:
        raise InvalidParam(f"incoming frame rate must be positive, got {incoming!r}")
    if vpr is not None and vpr >= 1:
        effective = vpr
    elif t_R is not None and t_R > 0:
        effective = 1.0 / t_R
    else:
        raise InvalidParam("VPR frame rate is below 1/s and no retrieval time was given")
    return int(math.floor(max(incoming / effective, 1.0)))


def considered_indices(n, G):
    """Indices whose frames the technique processes: 0 and every G-th frame."""
    if G < 1:
        raise InvalidParam(f"G must be >= 1, got {G}")
    return [i for i in range(n) if (i + 1) % G == 0 or i == 0]


def compute_rmf(matches_list, G):
    """Return ``(M_q, RMF)`` for a binary matches list and frame interval ``G``."""
    if int(G) != G or G < 1:
        raise InvalidParam(f"G must be a positive integer, got {G!r}")
    G = int(G)
    m_q = 0
    rmf = 0
    for index, element in enumerate(matches_list):
        if element not in (0, 1):
            raise InvalidParam(f"matches_list[{index}] = {element!r} is not 0/1")
        m_q += element
        if ((index + 1) % G == 0 or index == 0) and element == 1:
            rmf += 1
    return int(m_q), int(rmf)


def evaluate_rmf(matches_list, params):
    """Full pipeline from rate parameters and a matches list to an :class:`RmfResult`."""
    incoming = incoming_frame_rate(params.F, params.K, params.D, params.V)
    vpr = vpr_frame_rate(params.t_R)
    G = frame_interval(incoming, vpr, params.t_R)
    m_q, rmf = compute_rmf(matches_list, G)
    return RmfResult(
        incoming_rate=incoming,
        vpr_rate=vpr,
        vpr_rate_effective=float(vpr) if vpr >= 1 else 1.0 / params.t_R,
        G=G,
        N_q=len(matches_list),
        M_q=m_q,
        RMF=rmf,
        vpr_rate_unfloored=vpr < 1,
    )
