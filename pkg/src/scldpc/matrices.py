"""Sparse binary parity-check matrices and the alist interchange format.

The central object is :class:`SparseBinaryMatrix`, a row-oriented sparse
matrix over GF(2).  It is deliberately minimal: rows are kept as sorted
column-index arrays, which is the natural form both for layered decoding
schedules and for Tanner-graph traversals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SparseBinaryMatrix:
    """Binary matrix stored as per-row sorted column indices (CSR-like).

    Parameters
    ----------
    n_rows, n_cols : int
        Matrix dimensions.
    rows : sequence of sequences of int
        For each row, the column indices of its 1-entries.  Indices are
        sorted and deduplicated on construction; out-of-range indices
        raise ``ValueError``.
    """

    def __init__(self, n_rows: int, n_cols: int, rows) -> None:
        if n_rows < 0 or n_cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(rows) != n_rows:
            raise ValueError(f"expected {n_rows} rows, got {len(rows)}")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self._rows: list[np.ndarray] = []
        for r, cols in enumerate(rows):
            idx = np.unique(np.asarray(list(cols), dtype=np.int64))
            if idx.size and (idx[0] < 0 or idx[-1] >= n_cols):
                raise ValueError(f"row {r}: column index out of range")
            self._rows.append(idx)
        self._cols_cache: list[np.ndarray] | None = None

    # -- constructors -------------------------------------------------

    @classmethod
    def from_dense(cls, a) -> "SparseBinaryMatrix":
        a = np.asarray(a)
        rows = [np.flatnonzero(a[r]) for r in range(a.shape[0])]
        return cls(a.shape[0], a.shape[1], rows)

    # -- element access -----------------------------------------------

    def row(self, r: int) -> np.ndarray:
        """Sorted column indices of row ``r`` (do not mutate)."""
        return self._rows[r]

    def col(self, c: int) -> np.ndarray:
        """Sorted row indices of column ``c`` (do not mutate)."""
        return self._columns()[c]

    def _columns(self) -> list[np.ndarray]:
        if self._cols_cache is None:
            cols: list[list[int]] = [[] for _ in range(self.n_cols)]
            for r, idx in enumerate(self._rows):
                for c in idx:
                    cols[int(c)].append(r)
            self._cols_cache = [np.asarray(c, dtype=np.int64) for c in cols]
        return self._cols_cache

    # -- basic queries ------------------------------------------------

    @property
    def nnz(self) -> int:
        return sum(int(r.size) for r in self._rows)

    def row_weights(self) -> np.ndarray:
        return np.asarray([r.size for r in self._rows], dtype=np.int64)

    def col_weights(self) -> np.ndarray:
        w = np.zeros(self.n_cols, dtype=np.int64)
        for idx in self._rows:
            w[idx] += 1
        return w

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for r, idx in enumerate(self._rows):
            a[r, idx] = 1
        return a

    def to_csr_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat (row_ptr, col_idx) arrays for kernel code."""
        row_ptr = np.zeros(self.n_rows + 1, dtype=np.int64)
        for r, idx in enumerate(self._rows):
            row_ptr[r + 1] = row_ptr[r] + idx.size
        col_idx = np.empty(row_ptr[-1], dtype=np.int64)
        for r, idx in enumerate(self._rows):
            col_idx[row_ptr[r]:row_ptr[r + 1]] = idx
        return row_ptr, col_idx

    def submatrix(self, rows, cols) -> "SparseBinaryMatrix":
        """Restriction to the given row and column index sets.

        Columns are re-indexed in the order given by ``cols``.
        """
        cols = list(cols)
        remap = {int(c): i for i, c in enumerate(cols)}
        out_rows = []
        for r in rows:
            out_rows.append(sorted(remap[int(c)] for c in self._rows[int(r)]
                                   if int(c) in remap))
        return SparseBinaryMatrix(len(out_rows), len(cols), out_rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return (self.n_rows == other.n_rows and self.n_cols == other.n_cols
                and all(np.array_equal(a, b)
                        for a, b in zip(self._rows, other._rows)))

    def __repr__(self) -> str:
        return (f"SparseBinaryMatrix({self.n_rows}x{self.n_cols}, "
                f"nnz={self.nnz})")


@dataclass(frozen=True)
class DegreeProfile:
    """Node-perspective degree fractions of a parity-check matrix.

    ``var_fractions[i]`` is the fraction of columns with weight ``i``
    and ``check_fractions[i]`` the fraction of rows with weight ``i``.
    """

    var_fractions: dict[int, float]
    check_fractions: dict[int, float]

    def __post_init__(self) -> None:
        for name, frac in (("var", self.var_fractions),
                           ("check", self.check_fractions)):
            if abs(sum(frac.values()) - 1.0) > 1e-12:
                raise ValueError(f"{name} fractions must sum to 1")
            for d, f in frac.items():
                if d < 1:
                    raise ValueError(f"{name} degree {d} < 1")
                if not 0.0 <= f <= 1.0:
                    raise ValueError(f"{name} fraction {f} outside [0,1]")


def measure_degree_profile(h: SparseBinaryMatrix) -> DegreeProfile:
    """Exact column/row weight histograms, normalised to fractions."""
    if h.n_rows == 0 or h.n_cols == 0:
        raise ValueError("matrix must be nonempty")
    cw = h.col_weights()
    rw = h.row_weights()
    var = {int(d): int(n) / h.n_cols for d, n in zip(*np.unique(cw, return_counts=True))}
    chk = {int(d): int(n) / h.n_rows for d, n in zip(*np.unique(rw, return_counts=True))}
    return DegreeProfile(var, chk)


def validate_codeword(h: SparseBinaryMatrix, x) -> bool:
    """True iff every row parity of ``h @ x`` is even."""
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (h.n_cols,):
        raise ValueError(f"codeword length {x.shape} != n_cols {h.n_cols}")
    for r in range(h.n_rows):
        if int(x[h.row(r)].sum()) & 1:
            return False
    return True


# -- alist format ------------------------------------------------------
#
# Line 1: "N M"; line 2: "max_col_w max_row_w"; then the N column
# weights, the M row weights, N lines of 1-based row indices per column
# (zero-padded to max_col_w) and M lines of 1-based column indices per
# row (zero-padded to max_row_w).

def write_alist(h: SparseBinaryMatrix, path) -> None:
    cols = [h.col(c) for c in range(h.n_cols)]
    rows = [h.row(r) for r in range(h.n_rows)]
    max_cw = max((c.size for c in cols), default=0)
    max_rw = max((r.size for r in rows), default=0)
    with open(path, "w") as f:
        f.write(f"{h.n_cols} {h.n_rows}\n")
        f.write(f"{max_cw} {max_rw}\n")
        f.write(" ".join(str(c.size) for c in cols) + "\n")
        f.write(" ".join(str(r.size) for r in rows) + "\n")
        for c in cols:
            entries = [str(int(i) + 1) for i in c] + ["0"] * (max_cw - c.size)
            f.write(" ".join(entries) + "\n")
        for r in rows:
            entries = [str(int(i) + 1) for i in r] + ["0"] * (max_rw - r.size)
            f.write(" ".join(entries) + "\n")


def read_alist(path) -> SparseBinaryMatrix:
    with open(path) as f:
        tokens: list[list[int]] = [
            [int(t) for t in line.split()] for line in f if line.strip()
        ]
    n, m = tokens[0]
    col_w = tokens[2]
    row_w = tokens[3]
    if len(col_w) != n or len(row_w) != m:
        raise ValueError("alist weight lists do not match declared dimensions")
    col_lines = tokens[4:4 + n]
    row_lines = tokens[4 + n:4 + n + m]
    if len(row_lines) != m:
        raise ValueError("alist file truncated")
    rows = []
    for r, line in enumerate(row_lines):
        idx = [i - 1 for i in line if i != 0]
        if len(idx) != row_w[r]:
            raise ValueError(f"alist row {r}: weight mismatch")
        rows.append(idx)
    h = SparseBinaryMatrix(m, n, rows)
    # cross-check the per-column lists against the row representation
    for c, line in enumerate(col_lines):
        idx = sorted(i - 1 for i in line if i != 0)
        if len(idx) != col_w[c] or not np.array_equal(h.col(c), idx):
            raise ValueError(f"alist column {c}: inconsistent with row lists")
    return h
