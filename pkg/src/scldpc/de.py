"""Erasure-channel density evolution with an iterative detector front end.

The coupled update for the smoothed ensemble follows, verbatim, the
double-average structure

    q_i = 1 - (1/w) sum_j rho(1 - (1/w) sum_k x_{i-j+k})
    x_i <- (1 - f_D(1 - L(q_i))) * lambda(q_i)

with out-of-range positions contributing x = 0 (terminated chain), and
``rho(s) = s^(d_c - 1)`` for regular check degrees.  Protograph chains
run multi-edge-type DE on the coupled base graph with the detector fed
per variable node from all incident edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .construction import couple_protograph
from .ensembles import PROTOGRAPH, RANDOM_SMOOTHING, CoupledEnsemble, DetectorModel

DE_TOL = 1e-8
DE_MAX_ITERS = 10_000
BISECT_TOL = 1e-4
FRONT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DEState:
    """Edge-message erasure probabilities along the chain."""

    x: np.ndarray
    iteration: int = 0

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        if (x < 0).any() or (x > 1).any():
            raise ValueError("erasure probabilities must lie in [0, 1]")


def initial_state(ens: CoupledEnsemble) -> DEState:
    """All-erased start; the first step applies the raw detector output."""
    if ens.kind == RANDOM_SMOOTHING:
        return DEState(np.ones(ens.chain_length))
    return DEState(np.ones(_met_graph(ens).n_edges))


def _moving_mean(a: np.ndarray, w: int) -> np.ndarray:
    if w == 1:
        return a
    return np.convolve(a, np.full(w, 1.0 / w), mode="valid")


def de_step(state: DEState, ens: CoupledEnsemble, det: DetectorModel) -> DEState:
    """One smoothed-ensemble update; returns the next state."""
    if ens.kind != RANDOM_SMOOTHING:
        raise ValueError("de_step applies to random_smoothing ensembles")
    x = state.x
    L = ens.chain_length
    if x.shape != (L,):
        raise ValueError(f"state length {x.shape} != chain length {L}")
    w = ens.w
    padded = np.zeros(L + 2 * (w - 1))
    padded[w - 1:w - 1 + L] = x
    var_avg = _moving_mean(padded, w)            # length L + w - 1
    check_out = ens.eval_check_edge(1.0 - var_avg)
    q = 1.0 - _moving_mean(check_out, w)         # length L
    channel_erasure = 1.0 - det.f_d(1.0 - ens.eval_var_node(q))
    x_new = channel_erasure * ens.eval_var_edge(q)
    if (x_new < -1e-12).any() or (x_new > 1 + 1e-12).any():
        raise RuntimeError("density evolution produced values outside [0, 1]")
    return DEState(np.clip(x_new, 0.0, 1.0), state.iteration + 1)


def bit_erasure_probs(state: DEState, ens: CoupledEnsemble,
                      det: DetectorModel) -> np.ndarray:
    """Per-position decision erasure probability for the current state."""
    if ens.kind == RANDOM_SMOOTHING:
        x = state.x
        w = ens.w
        L = ens.chain_length
        padded = np.zeros(L + 2 * (w - 1))
        padded[w - 1:w - 1 + L] = x
        var_avg = _moving_mean(padded, w)
        check_out = ens.eval_check_edge(1.0 - var_avg)
        q = 1.0 - _moving_mean(check_out, w)
        channel_erasure = 1.0 - det.f_d(1.0 - ens.eval_var_node(q))
        return channel_erasure * ens.eval_var_node(q)
    g = _met_graph(ens)
    y = _check_to_var(g, state.x)
    prod_all = _group_prod_all(y, g.var_ptr, g.by_var)
    channel_erasure = 1.0 - det.f_d(1.0 - prod_all)
    return channel_erasure * prod_all


# -- multi-edge-type protograph DE --------------------------------------

class _MetGraph:
    """Flattened edge lists of the coupled protograph, parallel edges distinct."""

    def __init__(self, ens: CoupledEnsemble) -> None:
        coupled = couple_protograph(list(ens.blocks), ens.chain_length)
        base = coupled.base
        checks, varss = [], []
        for i in range(base.shape[0]):
            for j in range(base.shape[1]):
                for _ in range(base[i, j]):
                    checks.append(i)
                    varss.append(j)
        self.n_edges = len(checks)
        self.edge_check = np.asarray(checks, dtype=np.int64)
        self.edge_var = np.asarray(varss, dtype=np.int64)
        self.n_checks = base.shape[0]
        self.n_vars = base.shape[1]
        self.by_check = np.argsort(self.edge_check, kind="stable")
        self.by_var = np.argsort(self.edge_var, kind="stable")
        self.check_ptr = np.searchsorted(self.edge_check[self.by_check],
                                         np.arange(self.n_checks + 1))
        self.var_ptr = np.searchsorted(self.edge_var[self.by_var],
                                       np.arange(self.n_vars + 1))
        # positions (block columns of the chain) for wavefront tracking
        self.var_position = np.arange(self.n_vars) // ens.blocks[0].cols


_MET_CACHE: dict[tuple, _MetGraph] = {}


def _met_graph(ens: CoupledEnsemble) -> _MetGraph:
    key = (ens.chain_length, tuple(hash(b) for b in ens.blocks))
    g = _MET_CACHE.get(key)
    if g is None:
        if len(_MET_CACHE) > 64:
            _MET_CACHE.clear()
        g = _MET_CACHE[key] = _MetGraph(ens)
    return g


def _group_excl_prod(values: np.ndarray, ptr: np.ndarray,
                     order: np.ndarray) -> np.ndarray:
    """Per-edge product over its group excluding itself (zero-safe)."""
    v = values[order]
    grp_prod = np.multiply.reduceat(np.where(v == 0.0, 1.0, v), ptr[:-1])
    zero_cnt = np.add.reduceat((v == 0.0).astype(np.int64), ptr[:-1])
    sizes = np.diff(ptr)
    grp_prod = np.where(sizes == 0, 1.0, grp_prod)
    zero_cnt = np.where(sizes == 0, 0, zero_cnt)
    gid = np.repeat(np.arange(ptr.size - 1), sizes)
    out_sorted = np.empty_like(v)
    zc = zero_cnt[gid]
    gp = grp_prod[gid]
    # no zeros in group: plain division; one zero: only the zero edge sees
    # the product of the others; two or more zeros: everything is zero
    out_sorted = np.where(zc == 0, gp / np.where(v == 0.0, 1.0, v), 0.0)
    one_zero = (zc == 1)
    out_sorted[one_zero & (v == 0.0)] = gp[one_zero & (v == 0.0)]
    out = np.empty_like(out_sorted)
    out[order] = out_sorted
    return out


def _group_prod_all(values: np.ndarray, ptr: np.ndarray,
                    order: np.ndarray) -> np.ndarray:
    """Per-group product mapped back to group ids."""
    v = values[order]
    prod = np.multiply.reduceat(v, ptr[:-1])
    sizes = np.diff(ptr)
    return np.where(sizes == 0, 1.0, prod)


def _check_to_var(g: _MetGraph, x: np.ndarray) -> np.ndarray:
    """y_e = 1 - prod over the check's other edges of (1 - x)."""
    return 1.0 - _group_excl_prod(1.0 - x, g.check_ptr, g.by_check)


def met_de_step(state: DEState, ens: CoupledEnsemble,
                det: DetectorModel) -> DEState:
    """One multi-edge-type update on the coupled protograph."""
    if ens.kind != PROTOGRAPH:
        raise ValueError("met_de_step applies to protograph ensembles")
    g = _met_graph(ens)
    x = state.x
    if x.shape != (g.n_edges,):
        raise ValueError("state length does not match protograph edge count")
    y = _check_to_var(g, x)
    # detector prior per variable from all incident edges
    prod_all = _group_prod_all(y, g.var_ptr, g.by_var)
    channel_erasure = 1.0 - det.f_d(1.0 - prod_all)
    excl = _group_excl_prod(y, g.var_ptr, g.by_var)
    x_new = channel_erasure[g.edge_var] * excl
    if (x_new < -1e-12).any() or (x_new > 1 + 1e-12).any():
        raise RuntimeError("density evolution produced values outside [0, 1]")
    return DEState(np.clip(x_new, 0.0, 1.0), state.iteration + 1)


def _step(state: DEState, ens: CoupledEnsemble, det: DetectorModel) -> DEState:
    if ens.kind == RANDOM_SMOOTHING:
        return de_step(state, ens, det)
    return met_de_step(state, ens, det)


def converges(ens: CoupledEnsemble, det: DetectorModel,
              max_iters: int = DE_MAX_ITERS,
              tol: float = DE_TOL) -> tuple[bool, int]:
    """Run DE from the all-erased start until messages drop below ``tol``.

    Raises ``RuntimeError`` if an iterate ever increases pointwise: the
    update is monotone from this start, so that signals a fault.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    state = initial_state(ens)
    for it in range(1, max_iters + 1):
        new = _step(state, ens, det)
        if (new.x > state.x + 1e-12).any():
            raise RuntimeError("non-monotone density evolution iterate")
        state = new
        if float(state.x.max(initial=0.0)) < tol:
            return True, it
    return False, max_iters


@dataclass(frozen=True)
class ThresholdResult:
    threshold_epsilon: float
    iterations_at_threshold: int
    bisection_width: float
    converged: bool


def threshold_search(ens: CoupledEnsemble, slope: float = 0.0,
                     tol: float = BISECT_TOL,
                     max_iters: int = DE_MAX_ITERS,
                     de_tol: float = DE_TOL) -> ThresholdResult:
    """Largest erasure-equivalent channel parameter with DE convergence.

    Deterministic bisection on ``eps = 1 - I_C`` over [0, 1]; the probe
    history is checked to be a monotone indicator and any violation
    raises rather than being silently accepted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    probes: list[tuple[float, bool, int]] = []

    def probe(eps: float) -> bool:
        ok, iters = converges(ens, DetectorModel.from_epsilon(slope, eps),
                              max_iters, de_tol)
        probes.append((eps, ok, iters))
        return ok

    lo, hi = 0.0, 1.0
    if not probe(lo):
        return ThresholdResult(0.0, max_iters, hi - lo, False)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    probes.sort(key=lambda p: p[0])
    flags = [ok for _, ok, _ in probes]
    if any(b and not a for a, b in zip(flags, flags[1:])):
        raise RuntimeError("non-monotone convergence across bisection probes")
    iters_at = max(it for eps, ok, it in probes if ok)
    return ThresholdResult(lo, iters_at, hi - lo, True)


@dataclass(frozen=True)
class FlatnessResult:
    thresholds: dict[float, float]
    spread: float


def threshold_flatness(ens: CoupledEnsemble, slopes, tol: float = BISECT_TOL,
                       **kwargs) -> FlatnessResult:
    """Thresholds across detector slopes plus their max-min spread."""
    out: dict[float, float] = {}
    for a in slopes:
        if not 0.0 <= a < 1.0:
            raise ValueError("slopes must lie in [0, 1)")
        out[a] = threshold_search(ens, a, tol, **kwargs).threshold_epsilon
    vals = list(out.values())
    return FlatnessResult(out, max(vals) - min(vals) if vals else 0.0)


# -- decoding wave speed -------------------------------------------------

@dataclass(frozen=True)
class WaveSpeedResult:
    positions_per_iteration: float
    i_req: int | None
    channel_epsilon: float
    converged: bool
    iterations: int


def _positions(state: DEState, ens: CoupledEnsemble) -> np.ndarray:
    """Per-position maximum message erasure for wavefront tracking."""
    if ens.kind == RANDOM_SMOOTHING:
        return state.x
    g = _met_graph(ens)
    out = np.zeros(ens.chain_length)
    np.maximum.at(out, g.var_position, state.x)
    return out


def wave_speed(ens: CoupledEnsemble, det: DetectorModel,
               settle_iters: int = 50, front_tol: float = FRONT_TOL,
               max_iters: int = DE_MAX_ITERS,
               de_tol: float = DE_TOL) -> WaveSpeedResult:
    """Decoding-wave speed on a terminated chain, in positions/iteration.

    Tracks the smallest position whose message erasure exceeds
    ``front_tol``; after ``settle_iters`` iterations the front position
    is fit by least squares until the two boundary waves approach the
    middle of the chain.  Above threshold the wave stalls and the speed
    is reported as 0 with ``converged=False``.
    """
    L = ens.chain_length
    state = initial_state(ens)
    track: list[tuple[int, int]] = []
    converged = False
    iterations = max_iters
    for it in range(1, max_iters + 1):
        state = _step(state, ens, det)
        pos = _positions(state, ens)
        above = np.flatnonzero(pos > front_tol)
        if above.size == 0:
            converged = True
            iterations = it
            break
        track.append((it, int(above[0])))
    if not converged:
        return WaveSpeedResult(0.0, None, det.epsilon, False, iterations)
    collision_cap = L / 2 - 2
    pts = [(it, f) for it, f in track if f <= collision_cap]
    fit = [(it, f) for it, f in pts if it > settle_iters]
    if len(fit) < 3:
        fit = pts
    if len(fit) < 2 or fit[-1][1] == fit[0][1]:
        # wave crossed the chain almost instantly
        speed = float(L)
    else:
        its = np.asarray([p[0] for p in fit], dtype=float)
        fronts = np.asarray([p[1] for p in fit], dtype=float)
        speed = float(np.polyfit(its, fronts, 1)[0])
    if speed <= 0:
        return WaveSpeedResult(0.0, None, det.epsilon, False, iterations)
    return WaveSpeedResult(speed, math.ceil(1.0 / speed), det.epsilon,
                           True, iterations)


def required_channel_for_speed(ens: CoupledEnsemble, i_req: int,
                               tol: float = BISECT_TOL, slope: float = 0.0,
                               settle_iters: int = 50,
                               max_iters: int = DE_MAX_ITERS) -> float:
    """Worst erasure channel at which the wave advances 1/i_req per iteration."""
    if i_req < 1:
        raise ValueError("i_req must be >= 1")
    target = 1.0 / i_req

    def ok(eps: float) -> bool:
        res = wave_speed(ens, DetectorModel.from_epsilon(slope, eps),
                         settle_iters=settle_iters, max_iters=max_iters)
        return res.converged and res.positions_per_iteration >= target

    lo, hi = 0.0, 1.0
    if not ok(lo):
        raise RuntimeError("wave does not reach the target speed even at eps=0")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
