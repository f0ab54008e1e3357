"""The information flow measure.

Flow is the improvement in the attacker's belief accuracy: the
divergence of the prebelief from the truth point mass minus the same
divergence for the postbelief, both measured with the generalized
Jensen-Shannon divergence.  The report carries the nominal range bound
eta = log2 of the secret frame size and the residual exhaustive-search
size 2^(eta - q).

The range check is a soft flag on the report; tests assert it, library
callers decide what a violation means for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .belief import MassFunction
from .errors import FrameError
from .frames import JointFrame
from .uncertainty import DEFAULT_MAX_WORLDS, gen_js

BOUND_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FlowReport:
    """Flow measurement for one interaction, all values in bits."""

    q: float
    gjs_pre: float
    gjs_post: float
    eta: float
    within_bounds: bool

    @property
    def search_space(self) -> float:
        """Size of the exhaustive search for the residual secret bits."""
        return 2.0 ** (self.eta - self.q)


def flow_range(frame_h: JointFrame) -> tuple[float, float]:
    """The nominal flow range (-eta, eta) with eta = log2 |W_h|."""
    eta = math.log2(frame_h.cardinality)
    return (-eta, eta)


def flow_measure(
    m_pre: MassFunction,
    m_post: MassFunction,
    truth: MassFunction,
    max_worlds: int = DEFAULT_MAX_WORLDS,
) -> FlowReport:
    """Measure the flow of one interaction.

    All three masses must live on the secret frame; ``truth`` is the
    point mass on the actual secret.
    """
    if not (m_pre.frame == m_post.frame == truth.frame):
        raise FrameError("flow inputs live on different frames")
    gjs_pre = gen_js(m_pre, truth, max_worlds)
    gjs_post = gen_js(m_post, truth, max_worlds)
    q = gjs_pre - gjs_post
    eta = math.log2(m_pre.frame.cardinality)
    within = -eta - BOUND_TOLERANCE <= q <= eta + BOUND_TOLERANCE
    return FlowReport(
        q=q, gjs_pre=gjs_pre, gjs_post=gjs_post, eta=eta, within_bounds=within
    )
