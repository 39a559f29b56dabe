"""Row-layered scaled min-sum decoding on 15-level quantized LLRs.

Messages and posteriors live on the integer grid [-7, +7].  Each check
row update subtracts the stored check-to-variable messages from the
posteriors (extrinsics), forms new messages with the two-minima trick
(sign = product of extrinsic signs, magnitude = scale * min of the
other extrinsic magnitudes, rounded half-to-even), saturates, and adds
them back.  The windowed decoder runs this sweep over a sliding
``W``-sub-block view of a coupled chain with a configurable set of
parallel engine offsets, deterministically interleaved row by row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .construction import LEFT_TERMINATED, ZERO_TERMINATED, SCCodeSpec
from .matrices import SparseBinaryMatrix

LLR_SAT = 7  # 15 quantizer levels: -7 .. +7


def quantize_llr(llr, step: float):
    """Round half away from zero to the 15-level grid, then saturate."""
    if step <= 0:
        raise ValueError("quantizer step must be positive")
    llr = np.asarray(llr, dtype=float)
    mag = np.floor(np.abs(llr) / step + 0.5)
    q = np.sign(llr) * mag
    return np.clip(q, -LLR_SAT, LLR_SAT).astype(np.int64)


@dataclass(frozen=True)
class DecoderConfig:
    """Knobs of the layered decoder and its windowed schedule."""

    iterations: int = 26
    window: int = 13
    engine_offsets: tuple[int, ...] = (0,)
    scale: float = 0.75
    quant_step: float = 1.0
    early_exit: bool = True

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not 0.0 < self.scale <= 1.0:
            raise ValueError("scale must lie in (0, 1]")
        if self.quant_step <= 0:
            raise ValueError("quant_step must be positive")
        if not self.engine_offsets:
            raise ValueError("need at least one engine")


def two_engine_offsets(m: int) -> tuple[int, int]:
    """The platform schedule: second engine leads by six sub-block rows."""
    return (0, 6 * m)


@njit(cache=True)
def _layered_sweep(row_ptr, col_idx, post, r_mem, row_order, scale, col_min):
    """In-place layered pass over ``row_order``; returns posterior clips.

    Edges into columns below ``col_min`` are outside the decoder's
    window memory and are skipped.
    """
    n_sat = 0
    for oi in range(row_order.size):
        r = row_order[oi]
        s = row_ptr[r]
        e = row_ptr[r + 1]
        # count live edges
        deg = 0
        for k in range(s, e):
            if col_idx[k] >= col_min:
                deg += 1
        if deg == 0:
            continue
        if deg == 1:
            # degenerate row: min over no other edges carries no
            # extrinsic information, message 0 with positive sign
            for k in range(s, e):
                c = col_idx[k]
                if c < col_min:
                    continue
                t = post[c] - r_mem[k]
                r_mem[k] = 0
                if t > LLR_SAT:
                    t = LLR_SAT
                    n_sat += 1
                elif t < -LLR_SAT:
                    t = -LLR_SAT
                    n_sat += 1
                post[c] = t
            continue
        min1 = np.int64(1 << 30)
        min2 = np.int64(1 << 30)
        idx1 = np.int64(-1)
        sign_prod = np.int64(1)
        for k in range(s, e):
            c = col_idx[k]
            if c < col_min:
                continue
            t = post[c] - r_mem[k]
            if t < 0:
                sign_prod = -sign_prod
                mag = -t
            else:
                mag = t
            if mag < min1:
                min2 = min1
                min1 = mag
                idx1 = k
            elif mag < min2:
                min2 = mag
        for k in range(s, e):
            c = col_idx[k]
            if c < col_min:
                continue
            t = post[c] - r_mem[k]
            mag = min2 if k == idx1 else min1
            mmag = np.int64(np.rint(scale * mag))
            if mmag > LLR_SAT:
                mmag = LLR_SAT
            sgn = sign_prod * (np.int64(1) if t >= 0 else np.int64(-1))
            msg = sgn * mmag
            r_mem[k] = msg
            p = t + msg
            if p > LLR_SAT:
                p = LLR_SAT
                n_sat += 1
            elif p < -LLR_SAT:
                p = -LLR_SAT
                n_sat += 1
            post[c] = p
    return n_sat


@dataclass
class LayeredState:
    """Posteriors plus per-edge check message memory for one matrix."""

    row_ptr: np.ndarray
    col_idx: np.ndarray
    posteriors: np.ndarray
    edge_messages: np.ndarray
    saturation_events: int = 0

    @classmethod
    def from_llrs(cls, h: SparseBinaryMatrix, llrs) -> "LayeredState":
        llrs = np.asarray(llrs, dtype=np.int64)
        if llrs.shape != (h.n_cols,):
            raise ValueError("LLR vector length must equal n_cols")
        if (np.abs(llrs) > LLR_SAT).any():
            raise ValueError("LLRs must already be quantized to the grid")
        row_ptr, col_idx = h.to_csr_arrays()
        return cls(row_ptr, col_idx, llrs.copy(),
                   np.zeros(col_idx.size, dtype=np.int64))

    def hard_decisions(self) -> np.ndarray:
        return (self.posteriors < 0).astype(np.uint8)


def layered_iteration(h: SparseBinaryMatrix, state: LayeredState,
                      scale: float, row_order=None) -> LayeredState:
    """One layered pass over ``row_order`` (natural order by default)."""
    if row_order is None:
        row_order = np.arange(h.n_rows, dtype=np.int64)
    else:
        row_order = np.asarray(row_order, dtype=np.int64)
    state.saturation_events += _layered_sweep(
        state.row_ptr, state.col_idx, state.posteriors,
        state.edge_messages, row_order, scale, np.int64(0))
    return state


def _syndrome_ok(row_ptr, col_idx, bits) -> bool:
    if row_ptr[-1] == 0:
        return True
    vals = bits[col_idx].astype(np.int64)
    starts = row_ptr[:-1]
    in_range = starts < vals.size
    sums = np.add.reduceat(vals, np.where(in_range, starts, 0))
    sums[~in_range] = 0
    sums[np.diff(row_ptr) == 0] = 0
    return not (sums & 1).any()


@dataclass(frozen=True)
class DecodeOutcome:
    bits: np.ndarray
    syndrome_ok: bool
    iterations_used: int
    corrected: int
    saturation_events: int


def decode_block(h: SparseBinaryMatrix, llrs, cfg: DecoderConfig) -> DecodeOutcome:
    """Run ``cfg.iterations`` layered passes in natural row order."""
    state = LayeredState.from_llrs(h, llrs)
    initial_hard = state.hard_decisions()
    order = np.arange(h.n_rows, dtype=np.int64)
    used = 0
    for _ in range(cfg.iterations):
        layered_iteration(h, state, cfg.scale, order)
        used += 1
        if cfg.early_exit and _syndrome_ok(state.row_ptr, state.col_idx,
                                           state.hard_decisions()):
            break
    bits = state.hard_decisions()
    return DecodeOutcome(
        bits=bits,
        syndrome_ok=_syndrome_ok(state.row_ptr, state.col_idx, bits),
        iterations_used=used,
        corrected=int((bits != initial_hard).sum()),
        saturation_events=state.saturation_events,
    )


def windowed_decode_stream(spec: SCCodeSpec, llr_stream,
                           cfg: DecoderConfig) -> DecodeOutcome:
    """Stream decode with a sliding window of ``cfg.window`` sub-blocks.

    Per shift, one new sub-block of ``n`` LLRs enters the window memory
    of ``W + mu - 1`` sub-blocks, each engine performs a single sweep
    over the ``W*m`` window rows (rows interleaved across engines in
    fixed order), and the oldest sub-block leaves as hard decisions.
    Edges to sub-blocks already evicted from the memory are dropped from
    the sweep.  When the stream ends, eviction stops and the remaining
    window is flushed against the termination rows of the chain.
    """
    llr_stream = np.asarray(llr_stream, dtype=np.int64)
    n, m, mu = spec.n, spec.m, spec.mu
    if llr_stream.size % n:
        raise ValueError("stream length must be a multiple of n")
    L = llr_stream.size // n
    if L != spec.chain_length:
        raise ValueError("stream length does not match chain length")
    w = cfg.window
    if w < mu + 1:
        raise ValueError("window must cover at least mu+1 sub-blocks")
    offsets = np.asarray(cfg.engine_offsets, dtype=np.int64) % (w * m)
    if np.unique(offsets).size != offsets.size:
        raise ValueError("engine offsets must be distinct modulo W*m")
    if (np.abs(llr_stream) > LLR_SAT).any():
        raise ValueError("LLRs must already be quantized to the grid")

    h_term = spec.to_terminated_matrix()
    row_ptr, col_idx = h_term.to_csr_arrays()
    post = llr_stream.copy()
    r_mem = np.zeros(col_idx.size, dtype=np.int64)
    initial_hard = (post < 0).astype(np.uint8)
    bits = np.zeros(L * n, dtype=np.uint8)

    mem_blocks = w + mu - 1
    n_block_rows = h_term.n_rows // m
    base_idx = np.arange(w * m, dtype=np.int64)
    n_sat = 0
    for t in range(L + mem_blocks - 1):
        # engine-interleaved row order over the window [t-W+1, t]
        j = (base_idx[:, None] + offsets[None, :]) % (w * m)
        order = (t - w + 1) * m + j.reshape(-1)
        order = order[(order >= 0) & (order < n_block_rows * m)]
        newest_arrived = min(t, L - 1)
        col_min = max(0, newest_arrived - mem_blocks + 1) * n
        n_sat += _layered_sweep(row_ptr, col_idx, post, r_mem, order,
                                cfg.scale, np.int64(col_min))
        emit = t - mem_blocks + 1
        if emit >= 0:
            seg = post[emit * n:(emit + 1) * n]
            bits[emit * n:(emit + 1) * n] = (seg < 0)

    return DecodeOutcome(
        bits=bits,
        syndrome_ok=_syndrome_ok(row_ptr, col_idx, bits),
        iterations_used=len(cfg.engine_offsets) * w,
        corrected=int((bits != initial_hard).sum()),
        saturation_events=n_sat,
    )
