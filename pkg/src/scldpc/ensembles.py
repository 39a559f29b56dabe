"""Analytic code ensembles and the linear-EXIT detector front end."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .construction import Protograph

RANDOM_SMOOTHING = "random_smoothing"
PROTOGRAPH = "protograph"


def shannon_limit(rate: float) -> float:
    """Largest erasure probability any rate-``rate`` code can survive."""
    if not 0.0 < rate < 1.0:
        raise ValueError("rate must lie in (0, 1)")
    return 1.0 - rate


def _edge_perspective(node_poly: dict[int, float]) -> dict[int, float]:
    avg = sum(d * f for d, f in node_poly.items())
    return {d: d * f / avg for d, f in node_poly.items()}


@dataclass(frozen=True)
class CoupledEnsemble:
    """Spatially coupled ensemble for density evolution.

    Two kinds: ``random_smoothing`` uses node/edge degree polynomials
    with uniform smoothing over ``w`` positions along a chain of length
    ``chain_length``; ``protograph`` couples explicit base matrices
    ``B_0 .. B_mu`` into a banded chain.  Uncoupled codes are the
    ``w=1, chain_length=1`` special case.
    """

    kind: str
    chain_length: int
    var_node_poly: dict[int, float] | None = None
    check_node_poly: dict[int, float] | None = None
    w: int | None = None
    blocks: tuple[Protograph, ...] | None = None

    def __post_init__(self) -> None:
        if self.chain_length < 1:
            raise ValueError("chain length must be >= 1")
        if self.kind == RANDOM_SMOOTHING:
            if not self.var_node_poly or not self.check_node_poly:
                raise ValueError("random_smoothing ensembles need degree polynomials")
            if self.w is None or self.w < 1:
                raise ValueError("smoothing width w must be >= 1")
            for poly in (self.var_node_poly, self.check_node_poly):
                if abs(sum(poly.values()) - 1.0) > 1e-12:
                    raise ValueError("node fractions must sum to 1")
                if any(d < 1 for d in poly):
                    raise ValueError("degrees must be >= 1")
        elif self.kind == PROTOGRAPH:
            if not self.blocks:
                raise ValueError("protograph ensembles need base matrices")
            p, q = self.blocks[0].rows, self.blocks[0].cols
            for b in self.blocks:
                if (b.rows, b.cols) != (p, q):
                    raise ValueError("all base matrices must share dimensions")
        else:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")

    # -- constructors ---------------------------------------------------

    @classmethod
    def regular(cls, d_v: int, d_c: int, w: int, chain_length: int) -> "CoupledEnsemble":
        return cls(RANDOM_SMOOTHING, chain_length,
                   var_node_poly={d_v: 1.0}, check_node_poly={d_c: 1.0}, w=w)

    @classmethod
    def from_var_profile(cls, var_node_poly: dict[int, float], rate: float,
                         w: int, chain_length: int) -> "CoupledEnsemble":
        """Hold the design rate exactly by mixing two adjacent check degrees.

        The node-average check degree must equal ``L'(1)/(1-rate)``; when
        that is not an integer the fractional part becomes the fraction
        of degree-``d+1`` check nodes.
        """
        avg_dv = sum(d * f for d, f in var_node_poly.items())
        avg_dc = avg_dv / (1.0 - rate)
        lo = math.floor(avg_dc)
        frac = avg_dc - lo
        if frac < 1e-12:
            check = {lo: 1.0}
        elif frac > 1 - 1e-12:
            check = {lo + 1: 1.0}
        else:
            check = {lo: 1.0 - frac, lo + 1: frac}
        return cls(RANDOM_SMOOTHING, chain_length,
                   var_node_poly=dict(var_node_poly), check_node_poly=check, w=w)

    @classmethod
    def protograph_chain(cls, blocks: list[Protograph],
                         chain_length: int) -> "CoupledEnsemble":
        return cls(PROTOGRAPH, chain_length, blocks=tuple(blocks))

    # -- degree polynomial helpers (random_smoothing kind) ----------------

    @property
    def avg_var_degree(self) -> float:
        return sum(d * f for d, f in self.var_node_poly.items())

    @property
    def avg_check_degree(self) -> float:
        return sum(d * f for d, f in self.check_node_poly.items())

    @property
    def design_rate(self) -> float:
        if self.kind == PROTOGRAPH:
            p, q = self.blocks[0].rows, self.blocks[0].cols
            return 1.0 - p / q
        return 1.0 - self.avg_var_degree / self.avg_check_degree

    def var_edge_poly(self) -> dict[int, float]:
        """Edge-perspective variable fractions lambda_d = d L_d / L'(1)."""
        return _edge_perspective(self.var_node_poly)

    def check_edge_poly(self) -> dict[int, float]:
        return _edge_perspective(self.check_node_poly)

    def eval_var_node(self, q):
        """L(q) = sum_d L_d q^d."""
        q = np.asarray(q, dtype=float)
        return sum(f * q**d for d, f in self.var_node_poly.items())

    def eval_var_edge(self, q):
        """lambda(q) = sum_d lambda_d q^(d-1)."""
        q = np.asarray(q, dtype=float)
        return sum(f * q**(d - 1) for d, f in self.var_edge_poly().items())

    def eval_check_edge(self, s):
        """rho(s) = sum_d rho_d s^(d-1)."""
        s = np.asarray(s, dtype=float)
        return sum(f * s**(d - 1) for d, f in self.check_edge_poly().items())


@dataclass(frozen=True)
class DetectorModel:
    """Linear EXIT front end ``f_D(i) = a*i + I_C - a/2``, clipped to [0,1].

    ``slope`` models detector/modulation memory; ``channel_quality`` is
    the channel mutual information, so the erasure-equivalent channel
    parameter is ``1 - channel_quality``.  ``slope = 0`` degenerates to
    a memoryless erasure channel.
    """

    slope: float
    channel_quality: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.slope < 1.0:
            raise ValueError("slope must lie in [0, 1)")
        if not 0.0 <= self.channel_quality <= 1.0:
            raise ValueError("channel quality must lie in [0, 1]")

    @classmethod
    def from_epsilon(cls, slope: float, epsilon: float) -> "DetectorModel":
        return cls(slope, 1.0 - epsilon)

    @property
    def epsilon(self) -> float:
        return 1.0 - self.channel_quality

    def f_d(self, i_a):
        """Extrinsic detector information for a-priori information ``i_a``."""
        i_a = np.asarray(i_a, dtype=float)
        raw = self.slope * i_a + self.channel_quality - self.slope / 2.0
        return np.clip(raw, 0.0, 1.0)
