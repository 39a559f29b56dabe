"""Block and spatially coupled parity-check matrix construction.

Pipeline: a small protograph (integer base matrix, entries = parallel
edge counts) is coupled into a banded chain, expanded/lifted with
cyclic permutation blocks of size ``Z``, and terminated.  The coupled
chain uses ``mu + 1`` sub-matrices ``H_0 .. H_mu``; block column ``t``
of the chain carries ``H_i`` at block row ``t + i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .matrices import SparseBinaryMatrix

ZERO_TERMINATED = "zero-terminated"
LEFT_TERMINATED = "left-terminated-infinite"
_TERMINATIONS = (ZERO_TERMINATED, LEFT_TERMINATED)


@dataclass(frozen=True, eq=False)
class Protograph:
    """Integer base matrix; entry (i, j) counts parallel edges."""

    base: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, Protograph):
            return NotImplemented
        return np.array_equal(self.base, other.base)

    def __hash__(self) -> int:
        return hash((self.base.shape, self.base.tobytes()))

    def __post_init__(self) -> None:
        base = np.asarray(self.base, dtype=np.int64)
        object.__setattr__(self, "base", base)
        if base.ndim != 2:
            raise ValueError("protograph base must be 2-D")
        if (base < 0).any():
            raise ValueError("protograph entries must be non-negative")
        if base.shape[1] and (base.sum(axis=0) == 0).any():
            raise ValueError("protograph has an all-zero column")

    @property
    def rows(self) -> int:
        return self.base.shape[0]

    @property
    def cols(self) -> int:
        return self.base.shape[1]


def couple_protograph(blocks: list[Protograph], chain_length: int,
                      termination: str = ZERO_TERMINATED) -> Protograph:
    """Banded coupled base matrix for sub-protographs ``B_0 .. B_mu``.

    Block column ``t`` holds ``B_0 .. B_mu`` stacked at block-row
    offsets ``t .. t+mu``.  Zero termination keeps all ``(L+mu)`` block
    rows; the left-terminated form cuts the chain after ``L`` block
    rows (constraints on bits beyond the cut are dropped).
    """
    if chain_length < 1:
        raise ValueError("chain length must be >= 1")
    if termination not in _TERMINATIONS:
        raise ValueError(f"unknown termination {termination!r}")
    if not blocks:
        raise ValueError("need at least one sub-protograph")
    p, q = blocks[0].rows, blocks[0].cols
    for b in blocks:
        if (b.rows, b.cols) != (p, q):
            raise ValueError("all sub-protographs must share dimensions")
    mu = len(blocks) - 1
    L = chain_length
    n_block_rows = L + mu if termination == ZERO_TERMINATED else L
    out = np.zeros((n_block_rows * p, L * q), dtype=np.int64)
    for t in range(L):
        for i, b in enumerate(blocks):
            r = t + i
            if r >= n_block_rows:
                continue
            out[r * p:(r + 1) * p, t * q:(t + 1) * q] = b.base
    return Protograph(out)


def stack_blocks(blocks: list[Protograph]) -> Protograph:
    """Vertical stack ``[B_0; ...; B_mu]`` (the per-column chain slice)."""
    return Protograph(np.vstack([b.base for b in blocks]))


@dataclass(frozen=True)
class QCLiftSpec:
    """Circulant lift assignment for a protograph.

    ``shifts[i][j]`` is a tuple of distinct shift values in
    ``[0, circulant_size)``, one per parallel edge of base cell (i, j);
    empty tuples mark zero blocks.
    """

    circulant_size: int
    shifts: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self) -> None:
        if self.circulant_size < 1:
            raise ValueError("circulant size must be >= 1")
        norm = tuple(tuple(tuple(int(s) for s in cell) for cell in row)
                     for row in self.shifts)
        object.__setattr__(self, "shifts", norm)
        for i, row in enumerate(norm):
            for j, cell in enumerate(row):
                if len(set(cell)) != len(cell):
                    raise ValueError(
                        f"cell ({i},{j}): parallel edges need distinct shifts")
                for s in cell:
                    if not 0 <= s < self.circulant_size:
                        raise ValueError(f"cell ({i},{j}): shift {s} out of range")

    def matches(self, proto: Protograph) -> bool:
        if len(self.shifts) != proto.rows:
            return False
        for i, row in enumerate(self.shifts):
            if len(row) != proto.cols:
                return False
            for j, cell in enumerate(row):
                if len(cell) != proto.base[i, j]:
                    return False
        return True


def lift(proto: Protograph, spec: QCLiftSpec) -> SparseBinaryMatrix:
    """Expand every base cell into superposed Z x Z cyclic shifts.

    Shift ``s`` at cell (i, j) places ones at rows ``i*Z + k`` and
    columns ``j*Z + ((k + s) mod Z)`` for all ``k``.
    """
    if not spec.matches(proto):
        raise ValueError("shift assignment inconsistent with protograph")
    z = spec.circulant_size
    if proto.base.max(initial=0) > z:
        raise ValueError("parallel edge count exceeds circulant size")
    rows: list[list[int]] = [[] for _ in range(proto.rows * z)]
    for i in range(proto.rows):
        for j in range(proto.cols):
            for s in spec.shifts[i][j]:
                base_r = i * z
                base_c = j * z
                for k in range(z):
                    rows[base_r + k].append(base_c + (k + s) % z)
    return SparseBinaryMatrix(proto.rows * z, proto.cols * z, rows)


def random_lift_spec(proto: Protograph, z: int, seed: int) -> QCLiftSpec:
    """Uniform random shift assignment; parallel edges drawn distinct."""
    rng = np.random.default_rng(seed)
    shifts = []
    for i in range(proto.rows):
        row = []
        for j in range(proto.cols):
            c = int(proto.base[i, j])
            if c > z:
                raise ValueError("parallel edge count exceeds circulant size")
            row.append(tuple(int(s) for s in rng.choice(z, size=c, replace=False))
                       if c else ())
        shifts.append(tuple(row))
    return QCLiftSpec(z, tuple(shifts))


def expand_protograph(proto: Protograph, factor: int, seed: int) -> Protograph:
    """Pre-lift a small base by ``factor`` into a 0/1 protograph.

    Each entry ``c`` becomes a superposition of ``c`` distinct cyclic
    permutations of size ``factor``, preserving all row/column sums
    ``factor``-fold.  Used to reshape protographs to a target circulant
    granularity before the final QC lift.
    """
    spec = random_lift_spec(proto, factor, seed)
    return Protograph(lift(proto, spec).to_dense().astype(np.int64))


def min_distance_upper_bound(m: int, mu: int) -> int:
    """Minimum-distance cap ``(m+1)(mu*m+1)`` of the time-invariant chain."""
    if m < 1 or mu < 0:
        raise ValueError("need m >= 1 and mu >= 0")
    return (m + 1) * (mu * m + 1)


@dataclass
class SCCodeSpec:
    """Spatially coupled code: sub-matrices ``H_0 .. H_mu`` plus chain data."""

    sub_matrices: list[SparseBinaryMatrix]
    chain_length: int
    termination: str = ZERO_TERMINATED
    declared_rate: Fraction | None = None

    def __post_init__(self) -> None:
        if not self.sub_matrices:
            raise ValueError("need at least H_0")
        m, n = self.sub_matrices[0].n_rows, self.sub_matrices[0].n_cols
        for h in self.sub_matrices:
            if (h.n_rows, h.n_cols) != (m, n):
                raise ValueError("all sub-matrices must share dimensions")
        if self.chain_length < 1:
            raise ValueError("chain length must be >= 1")
        if self.termination not in _TERMINATIONS:
            raise ValueError(f"unknown termination {self.termination!r}")
        if self.declared_rate is not None:
            if abs(float(design_rate(self) - self.declared_rate)) > 1e-12:
                raise ValueError("declared rate does not match design rate")

    @property
    def mu(self) -> int:
        return len(self.sub_matrices) - 1

    @property
    def m(self) -> int:
        return self.sub_matrices[0].n_rows

    @property
    def n(self) -> int:
        return self.sub_matrices[0].n_cols

    def to_terminated_matrix(self) -> SparseBinaryMatrix:
        """Materialise the banded chain matrix for this spec."""
        L, m, n, mu = self.chain_length, self.m, self.n, self.mu
        n_block_rows = L + mu if self.termination == ZERO_TERMINATED else L
        rows: list[list[int]] = [[] for _ in range(n_block_rows * m)]
        for t in range(L):
            for i, h in enumerate(self.sub_matrices):
                r = t + i
                if r >= n_block_rows:
                    continue
                for k in range(m):
                    rows[r * m + k].extend(t * n + c for c in h.row(k))
        return SparseBinaryMatrix(n_block_rows * m, L * n, rows)


def design_rate(spec: SCCodeSpec) -> Fraction:
    """Exact design rate; ``1 - (L+mu)m/(Ln)`` for the zero-terminated chain."""
    L, m, n = spec.chain_length, spec.m, spec.n
    if spec.termination == ZERO_TERMINATED:
        return 1 - Fraction((L + spec.mu) * m, L * n)
    return 1 - Fraction(m, n)


def sc_code_from_stacked_lift(h_stack: SparseBinaryMatrix, n_blocks: int,
                              chain_length: int,
                              termination: str = ZERO_TERMINATED) -> SCCodeSpec:
    """Split a lifted ``[B_0; ...; B_mu]`` stack into an SC code spec."""
    if h_stack.n_rows % n_blocks:
        raise ValueError("stacked matrix rows not divisible by block count")
    m = h_stack.n_rows // n_blocks
    subs = [h_stack.submatrix(range(i * m, (i + 1) * m), range(h_stack.n_cols))
            for i in range(n_blocks)]
    return SCCodeSpec(subs, chain_length, termination)


# -- structured text files ---------------------------------------------

def write_shifts_file(spec: QCLiftSpec, path) -> None:
    """Shift table: header ``Z rows cols``, then ``i j s1 s2 ...`` lines."""
    with open(path, "w") as f:
        f.write(f"{spec.circulant_size} {len(spec.shifts)} "
                f"{len(spec.shifts[0]) if spec.shifts else 0}\n")
        for i, row in enumerate(spec.shifts):
            for j, cell in enumerate(row):
                if cell:
                    f.write(f"{i} {j} " + " ".join(str(s) for s in cell) + "\n")


def read_shifts_file(path) -> QCLiftSpec:
    with open(path) as f:
        lines = [line.split() for line in f if line.strip()]
    z, n_rows, n_cols = (int(t) for t in lines[0])
    cells: dict[tuple[int, int], tuple[int, ...]] = {}
    for tok in lines[1:]:
        i, j = int(tok[0]), int(tok[1])
        cells[(i, j)] = tuple(int(s) for s in tok[2:])
    shifts = tuple(tuple(cells.get((i, j), ()) for j in range(n_cols))
                   for i in range(n_rows))
    return QCLiftSpec(z, shifts)


def write_sc_spec_file(path, spec: SCCodeSpec, z: int, shifts_file: str) -> None:
    """Companion metadata file: keys mu, m, n, L, Z, termination, shifts-file."""
    with open(path, "w") as f:
        f.write(f"mu: {spec.mu}\n")
        f.write(f"m: {spec.m}\n")
        f.write(f"n: {spec.n}\n")
        f.write(f"L: {spec.chain_length}\n")
        f.write(f"Z: {z}\n")
        f.write(f"termination: {spec.termination}\n")
        f.write(f"shifts-file: {shifts_file}\n")


def read_sc_spec_file(path) -> SCCodeSpec:
    """Rebuild an SC code from its metadata + shift table files."""
    keys: dict[str, str] = {}
    for line in open(path):
        line = line.strip()
        if not line:
            continue
        k, _, v = line.partition(":")
        keys[k.strip()] = v.strip()
    required = {"mu", "m", "n", "L", "Z", "termination", "shifts-file"}
    missing = required - keys.keys()
    if missing:
        raise ValueError(f"spec file missing keys: {sorted(missing)}")
    mu = int(keys["mu"])
    m, n, L, z = int(keys["m"]), int(keys["n"]), int(keys["L"]), int(keys["Z"])
    shifts_path = Path(path).parent / keys["shifts-file"]
    lift_spec = read_shifts_file(shifts_path)
    if lift_spec.circulant_size != z:
        raise ValueError("Z mismatch between spec and shifts file")
    if m % z or n % z:
        raise ValueError("m and n must be multiples of Z")
    base = np.zeros((len(lift_spec.shifts), len(lift_spec.shifts[0])), dtype=np.int64)
    for i, row in enumerate(lift_spec.shifts):
        for j, cell in enumerate(row):
            base[i, j] = len(cell)
    stacked = lift(Protograph(base), lift_spec)
    if stacked.n_rows != (mu + 1) * m or stacked.n_cols != n:
        raise ValueError("shift table dimensions inconsistent with spec keys")
    return sc_code_from_stacked_lift(stacked, mu + 1, L, keys["termination"])
