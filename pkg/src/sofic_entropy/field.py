"""Exact linear algebra over prime fields F_p.

Matrices are stored densely as int64 residues.  For p = 2 elimination runs on
a packed layout (64 columns per uint64 word) with word-level XOR row
operations; both paths use the same pivot rule and return the same reduced
echelon form, so their kernel bases agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence, Union

import numpy as np

DEFAULT_ENTRY_LIMIT = 1 << 28


class ResourceError(RuntimeError):
    """A problem exceeds a configured size guard."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_p, 2 <= p < 2**16."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise TypeError(f"field modulus must be an int, got {self.p!r}")
        if not 2 <= self.p < (1 << 16):
            raise ValueError(f"field modulus {self.p} outside [2, 2**16)")
        if not _is_prime(int(self.p)):
            raise ValueError(f"field modulus {self.p} is not prime")
        object.__setattr__(self, "p", int(self.p))

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def __str__(self) -> str:
        return f"F_{self.p}"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FqMatrix:
    """Dense matrix over F_p with entries in [0, p)."""

    field: FieldSpec
    data: np.ndarray = dc_field(repr=False)

    def __post_init__(self) -> None:
        a = np.array(self.data, dtype=np.int64, copy=True)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        a %= self.field.p
        object.__setattr__(self, "data", _readonly(a))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "FqMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "FqMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def packed(self) -> np.ndarray:
        """Bit-packed rows (only for p = 2): bit c%64 of word c//64 holds column c."""
        if self.field.p != 2:
            raise ValueError("packed layout exists only for p = 2")
        return _pack_bits(self.data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FqMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.field, self.data.shape, self.data.tobytes()))


@dataclass(frozen=True)
class SparseTriplets:
    """Sparse matrix as normalized (row, col, value) arrays.

    Duplicate positions are summed mod p on construction and zero entries are
    dropped; triplets are kept sorted by (row, col).
    """

    field: FieldSpec
    rows: int
    cols: int
    row_idx: np.ndarray = dc_field(repr=False)
    col_idx: np.ndarray = dc_field(repr=False)
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self) -> None:
        r = np.asarray(self.row_idx, dtype=np.int64).ravel()
        c = np.asarray(self.col_idx, dtype=np.int64).ravel()
        v = np.asarray(self.values, dtype=np.int64).ravel()
        if not (r.shape == c.shape == v.shape):
            raise ValueError("triplet arrays must have equal length")
        if r.size and (r.min() < 0 or r.max() >= self.rows or c.min() < 0 or c.max() >= self.cols):
            raise ValueError("triplet index out of range")
        p = self.field.p
        lin = r * max(self.cols, 1) + c
        uniq, inverse = np.unique(lin, return_inverse=True)
        acc = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(acc, inverse, v % p)
        acc %= p
        keep = acc != 0
        uniq, acc = uniq[keep], acc[keep]
        cols = max(self.cols, 1)
        object.__setattr__(self, "row_idx", _readonly(uniq // cols))
        object.__setattr__(self, "col_idx", _readonly(uniq % cols))
        object.__setattr__(self, "values", _readonly(acc))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def to_dense(self, limit: int = DEFAULT_ENTRY_LIMIT) -> FqMatrix:
        _check_size(self.rows, self.cols, limit)
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        a[self.row_idx, self.col_idx] = self.values
        return FqMatrix(self.field, a)

    def transpose(self) -> "SparseTriplets":
        return SparseTriplets(self.field, self.cols, self.rows, self.col_idx, self.row_idx, self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseTriplets):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


Matrix = Union[FqMatrix, SparseTriplets]


@dataclass(frozen=True)
class RankKernelResult:
    rank: int
    kernel_basis: np.ndarray = dc_field(repr=False)
    pivots: tuple[int, ...] = ()

    @property
    def kernel_dim(self) -> int:
        return int(self.kernel_basis.shape[0])


def _check_size(rows: int, cols: int, limit: int) -> None:
    if rows * cols > limit:
        raise ResourceError(f"{rows}x{cols} matrix exceeds the entry limit {limit}")


def _pack_bits(a: np.ndarray) -> np.ndarray:
    rows, cols = a.shape
    words = max((cols + 63) // 64, 1)
    bits = np.zeros((rows, words * 64), dtype=np.uint8)
    bits[:, :cols] = a & 1
    # little bitorder puts column c at bit c%8 of its byte, so the u8 view is word-aligned
    packed = np.packbits(bits, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64, copy=False).reshape(rows, words)


def _unpack_bits(w: np.ndarray, cols: int) -> np.ndarray:
    rows, words = w.shape
    as_bytes = np.ascontiguousarray(w.astype("<u8")).view(np.uint8).reshape(rows, words * 8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :cols].astype(np.int64)


def _as_dense(m: Matrix, limit: int) -> FqMatrix:
    if isinstance(m, SparseTriplets):
        return m.to_dense(limit)
    if isinstance(m, FqMatrix):
        _check_size(m.rows, m.cols, limit)
        return m
    raise TypeError(f"expected FqMatrix or SparseTriplets, got {type(m).__name__}")


def _rref_gf2(w: np.ndarray, cols: int, reduce_above: bool) -> tuple[np.ndarray, list[int]]:
    rows = w.shape[0]
    pivots: list[int] = []
    pr = 0
    for c in range(cols):
        if pr == rows:
            break
        word, bit = divmod(c, 64)
        colbits = (w[pr:, word] >> np.uint64(bit)) & np.uint64(1)
        nz = np.flatnonzero(colbits)
        if nz.size == 0:
            continue
        r = pr + int(nz[0])
        if r != pr:
            w[[pr, r]] = w[[r, pr]]
        if reduce_above:
            hits = np.flatnonzero((w[:, word] >> np.uint64(bit)) & np.uint64(1))
            hits = hits[hits != pr]
        else:
            # r was the first hit at or below pr; after the swap the rest are unchanged
            hits = nz[1:] + pr
        if hits.size:
            # rows >= pr are zero left of column c, so only words from `word` on change
            w[hits, word:] ^= w[pr, word:]
        pivots.append(c)
        pr += 1
    return w, pivots


def _rref_generic(a: np.ndarray, p: int, reduce_above: bool) -> tuple[np.ndarray, list[int]]:
    rows, cols = a.shape
    pivots: list[int] = []
    pr = 0
    for c in range(cols):
        if pr == rows:
            break
        nz = np.flatnonzero(a[pr:, c])
        if nz.size == 0:
            continue
        r = pr + int(nz[0])
        if r != pr:
            a[[pr, r]] = a[[r, pr]]
        piv = int(a[pr, c])
        if piv != 1:
            a[pr, c:] = (a[pr, c:] * pow(piv, p - 2, p)) % p
        lo = 0 if reduce_above else pr + 1
        hits = np.flatnonzero(a[lo:, c]) + lo
        hits = hits[hits != pr]
        if hits.size:
            factors = a[hits, c][:, None]
            a[hits, c:] = (a[hits, c:] - factors * a[pr, c:]) % p
        pivots.append(c)
        pr += 1
    return a, pivots


def _kernel_from_rref(r: np.ndarray, pivots: list[int], cols: int, p: int) -> np.ndarray:
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    if not free:
        return basis
    free_arr = np.array(free, dtype=np.int64)
    basis[np.arange(len(free)), free_arr] = 1
    if pivots:
        piv_arr = np.array(pivots, dtype=np.int64)
        # row i of the RREF reads x[piv_i] + sum_j r[i, j] x[j] = 0 over free j
        block = r[: len(pivots)][:, free_arr]
        basis[:, piv_arr] = (-block.T) % p
    return basis


def echelon_rank_kernel(
    m: Matrix,
    *,
    kernel: bool = True,
    limit: int = DEFAULT_ENTRY_LIMIT,
    packed: bool | None = None,
) -> RankKernelResult:
    """Rank and reduced right-kernel basis of ``m``.

    Pivoting takes, column by column, the first row at or below the current
    pivot row with a nonzero entry.  With ``kernel=False`` only forward
    elimination is done and the returned basis is empty (shape ``(0, cols)``);
    ``rank`` is still exact.  ``packed`` forces or disables the p = 2 bit path.
    """
    dense = _as_dense(m, limit)
    p = dense.field.p
    rows, cols = dense.shape
    use_packed = (p == 2) if packed is None else packed
    if use_packed and p != 2:
        raise ValueError("packed elimination requires p = 2")
    if use_packed:
        w, pivots = _rref_gf2(_pack_bits(dense.data), cols, reduce_above=kernel)
        if not kernel:
            return RankKernelResult(len(pivots), np.zeros((0, cols), dtype=np.int64), tuple(pivots))
        r = _unpack_bits(w[: len(pivots)], cols)
    else:
        r, pivots = _rref_generic(dense.data.copy(), p, reduce_above=kernel)
        if not kernel:
            return RankKernelResult(len(pivots), np.zeros((0, cols), dtype=np.int64), tuple(pivots))
    basis = _kernel_from_rref(r, pivots, cols, p)
    return RankKernelResult(len(pivots), _readonly(basis), tuple(pivots))


def rank(m: Matrix, *, limit: int = DEFAULT_ENTRY_LIMIT) -> int:
    return echelon_rank_kernel(m, kernel=False, limit=limit).rank


def _as_rows(field: FieldSpec, gens: Sequence | np.ndarray, dim: int | None) -> np.ndarray:
    a = np.asarray(gens, dtype=np.int64)
    if a.size == 0:
        if dim is None:
            if a.ndim == 2:
                dim = a.shape[1]
            else:
                raise ValueError("ambient dimension needed for an empty generator list")
        return np.zeros((0, dim), dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("generators must be a list of equal-length vectors")
    if dim is not None and a.shape[1] != dim:
        raise ValueError(f"generator length {a.shape[1]} does not match ambient dimension {dim}")
    return a % field.p


def subspace_dims(
    field: FieldSpec,
    gens_a: Sequence | np.ndarray,
    gens_b: Sequence | np.ndarray,
    dim: int | None = None,
    *,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> tuple[int, int, int, int]:
    """Return ``(dim A, dim B, dim (A+B), dim (A ∩ B))`` for spans of row vectors.

    The intersection comes from dim A + dim B - dim(A+B).
    """
    if dim is None:
        for g in (gens_a, gens_b):
            arr = np.asarray(g)
            if arr.ndim == 2:
                dim = arr.shape[1]
                break
    a = _as_rows(field, gens_a, dim)
    b = _as_rows(field, gens_b, dim)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"ambient dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    da = rank(FqMatrix(field, a), limit=limit)
    db = rank(FqMatrix(field, b), limit=limit)
    ds = rank(FqMatrix(field, np.vstack([a, b])), limit=limit)
    return da, db, ds, da + db - ds


def apply(m: Matrix, v: Sequence[int] | np.ndarray) -> np.ndarray:
    """Exact product ``m @ v`` mod p."""
    x = np.asarray(v, dtype=np.int64).ravel()
    p = m.field.p
    if x.size != m.cols:
        raise ValueError(f"vector length {x.size} does not match {m.cols} columns")
    x = x % p
    if isinstance(m, SparseTriplets):
        out = np.zeros(m.rows, dtype=np.int64)
        np.add.at(out, m.row_idx, (m.values * x[m.col_idx]) % p)
        return out % p
    # int64 accumulation: p < 2**16 keeps each product below 2**32
    out = np.zeros(m.rows, dtype=np.int64)
    step = max(1, (1 << 30) // (p * p))
    for lo in range(0, m.cols, step):
        out = (out + m.data[:, lo : lo + step] @ x[lo : lo + step]) % p
    return out


def inverse(m: FqMatrix) -> FqMatrix:
    """Inverse of a square matrix over F_p; ValueError if singular."""
    if m.rows != m.cols:
        raise ValueError("only square matrices are invertible")
    n = m.rows
    aug = np.hstack([m.data, np.eye(n, dtype=np.int64)])
    r, pivots = _rref_generic(aug, m.field.p, reduce_above=True)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return FqMatrix(m.field, r[:, n:])
