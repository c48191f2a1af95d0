"""Smith normal form and kernel/image/cokernel computations over Z/p^s.

Z/p^s is a local principal ideal ring, so diagonalization never needs integer
lifting: among the remaining entries any one of minimal p-valuation divides
all the others, and a single row sweep plus a single column sweep clears its
cross without refill.  Pivots are therefore produced with nondecreasing
valuation, which is exactly the sorted p-power diagonal form.

Pivot choice is deterministic: minimal valuation first, ties broken by lowest
(row, column) position.  Exponent multisets do not depend on this choice; the
transform matrices do, and reproducibility requires fixing it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from .residue import Modulus


class NotInImageError(ValueError):
    """Raised internally when a linear system has no solution."""


@dataclass(frozen=True)
class ModuleInvariants:
    """A finite Z/p^s-module as a sorted multiset of exponents.

    ``exponents = (e1 <= e2 <= ...)`` presents the module as the direct sum of
    the cyclic groups Z/p^{e_i}; the empty tuple is the zero module.  All
    exponents lie in [1, s].
    """

    modulus: Modulus
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        exps = tuple(sorted(self.exponents))
        for e in exps:
            if not 1 <= e <= self.modulus.s:
                raise ValueError(f"exponent {e} outside [1, {self.modulus.s}]")
        object.__setattr__(self, "exponents", exps)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def cardinality_exponent(self) -> int:
        """log_p of the number of elements."""
        return sum(self.exponents)

    @property
    def cardinality(self) -> int:
        return self.modulus.p ** self.cardinality_exponent

    def is_zero(self) -> bool:
        return not self.exponents

    def __str__(self) -> str:
        if not self.exponents:
            return "0"
        p = self.modulus.p
        return " + ".join(f"Z/{p}^{e}" for e in self.exponents)


class ResidueMatrix:
    """A sparse matrix over Z/p^s.

    Entries are canonical representatives; zero entries are never stored.
    Instances are treated as immutable after construction.
    """

    __slots__ = ("rows", "cols", "modulus", "entries")

    def __init__(
        self,
        rows: int,
        cols: int,
        modulus: Modulus,
        entries: Mapping[tuple[int, int], int] | None = None,
    ):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        self.modulus = modulus
        q = modulus.q
        clean: dict[tuple[int, int], int] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"index ({i}, {j}) outside {rows}x{cols}")
            v %= q
            if v:
                clean[(i, j)] = v
        self.entries = clean

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: Modulus) -> "ResidueMatrix":
        return cls(rows, cols, modulus)

    @classmethod
    def identity(cls, n: int, modulus: Modulus) -> "ResidueMatrix":
        return cls(n, n, modulus, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_rows(cls, data: Iterable[Iterable[int]], modulus: Modulus) -> "ResidueMatrix":
        mat = [list(row) for row in data]
        rows = len(mat)
        cols = len(mat[0]) if rows else 0
        entries = {}
        for i, row in enumerate(mat):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                entries[(i, j)] = v
        return cls(rows, cols, modulus, entries)

    @classmethod
    def from_array(cls, arr: np.ndarray, modulus: Modulus) -> "ResidueMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2d array")
        entries = {
            (int(i), int(j)): int(arr[i, j])
            for i, j in zip(*np.nonzero(arr % modulus.q))
        }
        return cls(arr.shape[0], arr.shape[1], modulus, entries)

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[int]], rows: int, modulus: Modulus) -> "ResidueMatrix":
        entries = {}
        ncols = 0
        for j, col in enumerate(columns):
            ncols = j + 1
            for i, v in enumerate(col):
                entries[(i, j)] = v
        return cls(rows, ncols, modulus, entries)

    # ------------------------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def to_array(self) -> np.ndarray:
        arr = np.zeros((self.rows, self.cols), dtype=np.int64)
        for (i, j), v in self.entries.items():
            arr[i, j] = v
        return arr

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def column(self, j: int) -> list[int]:
        return [self.entry(i, j) for i in range(self.rows)]

    def apply(self, vec: Iterable[int]) -> list[int]:
        v = list(vec)
        if len(v) != self.cols:
            raise ValueError(f"vector length {len(v)} != {self.cols} columns")
        q = self.modulus.q
        out = [0] * self.rows
        for (i, j), a in self.entries.items():
            out[i] = (out[i] + a * v[j]) % q
        return out

    def transpose(self) -> "ResidueMatrix":
        return ResidueMatrix(
            self.cols, self.rows, self.modulus,
            {(j, i): v for (i, j), v in self.entries.items()},
        )

    def reduce_to(self, modulus: Modulus) -> "ResidueMatrix":
        """The same matrix with entries reduced into a lower-exponent modulus."""
        if modulus.p != self.modulus.p or modulus.s > self.modulus.s:
            raise ValueError("can only reduce to a lower power of the same prime")
        return ResidueMatrix(self.rows, self.cols, modulus, dict(self.entries))

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        if self.modulus != other.modulus:
            raise ValueError("modulus mismatch in matrix product")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        prod = (self.to_array() @ other.to_array()) % self.modulus.q
        return ResidueMatrix.from_array(prod, self.modulus)

    def __add__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        if (self.rows, self.cols, self.modulus) != (other.rows, other.cols, other.modulus):
            raise ValueError("shape or modulus mismatch in matrix sum")
        entries = dict(self.entries)
        q = self.modulus.q
        for key, v in other.entries.items():
            entries[key] = (entries.get(key, 0) + v) % q
        return ResidueMatrix(self.rows, self.cols, self.modulus, entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResidueMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.modulus == other.modulus
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.modulus, frozenset(self.entries.items())))

    def items_sorted(self) -> list[tuple[int, int, int]]:
        return sorted((i, j, v) for (i, j), v in self.entries.items())

    def is_zero(self) -> bool:
        return not self.entries

    def __repr__(self) -> str:
        return f"ResidueMatrix({self.rows}x{self.cols} over {self.modulus}, nnz={self.nnz})"


@dataclass
class SnfData:
    """Raw diagonalization data on numpy arrays (internal)."""

    pivots: list[int]
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    uinv: Optional[np.ndarray] = None
    vinv: Optional[np.ndarray] = None
    shape: tuple[int, int] = (0, 0)


def smith_data(
    arr: np.ndarray,
    modulus: Modulus,
    want_u: bool = False,
    want_v: bool = False,
    want_uinv: bool = False,
    want_vinv: bool = False,
) -> SnfData:
    """Diagonalize ``arr`` over Z/p^s, tracking only the requested transforms.

    Returns pivot exponents (nondecreasing) and arrays with
    U @ arr @ V = diag(p^e).  Inverses are tracked alongside rather than
    recovered afterwards.
    """
    p, s, q = modulus.p, modulus.s, modulus.q
    a = np.array(arr, dtype=np.int64) % q
    m, n = a.shape
    U = np.eye(m, dtype=np.int64) if want_u else None
    V = np.eye(n, dtype=np.int64) if want_v else None
    Uinv = np.eye(m, dtype=np.int64) if want_uinv else None
    Vinv = np.eye(n, dtype=np.int64) if want_vinv else None

    pivots: list[int] = []
    k = 0
    limit = min(m, n)
    while k < limit:
        # rows and columns below k are already cleared; work on the active block
        sub = a[k:, k:]
        if not sub.any():
            break
        # minimal-valuation pivot, first in row-major order among ties
        e = 0
        while True:
            mask = (sub % (p ** (e + 1))) != 0
            if mask.any():
                flat = int(np.argmax(mask))
                break
            e += 1
        i0, j0 = divmod(flat, n - k)
        i0 += k
        j0 += k
        if i0 != k:
            a[[k, i0], k:] = a[[i0, k], k:]
            if U is not None:
                U[[k, i0], :] = U[[i0, k], :]
            if Uinv is not None:
                Uinv[:, [k, i0]] = Uinv[:, [i0, k]]
        if j0 != k:
            a[k:, [k, j0]] = a[k:, [j0, k]]
            if V is not None:
                V[:, [k, j0]] = V[:, [j0, k]]
            if Vinv is not None:
                Vinv[[k, j0], :] = Vinv[[j0, k], :]
        pe = p ** e
        unit = int(a[k, k]) // pe
        if unit != 1:
            uinv_val = pow(unit, -1, q)
            a[k, k:] = (a[k, k:] * uinv_val) % q
            if U is not None:
                U[k, :] = (U[k, :] * uinv_val) % q
            if Uinv is not None:
                Uinv[:, k] = (Uinv[:, k] * unit) % q
        # clear the pivot column; every entry is an exact ring multiple of p^e
        f = a[k:, k] // pe
        f[0] = 0
        if f.any():
            a[k:, k:] -= np.outer(f, a[k, k:])
            a[k:, k:] %= q
            if U is not None:
                U[k:, :] -= np.outer(f, U[k, :])
                U[k:, :] %= q
            if Uinv is not None:
                Uinv[:, k] = (Uinv[:, k] + Uinv[:, k:] @ f) % q
        # clear the pivot row; the column is now single-entry, so only tracked
        # transforms change and the row zeroes out exactly
        g = a[k, k:] // pe
        g[0] = 0
        if g.any():
            a[k, k + 1:] = 0
            if V is not None:
                V[:, k:] -= np.outer(V[:, k], g)
                V[:, k:] %= q
            if Vinv is not None:
                Vinv[k, :] = (Vinv[k, :] + g @ Vinv[k:, :]) % q
        pivots.append(e)
        k += 1

    return SnfData(pivots=pivots, u=U, v=V, uinv=Uinv, vinv=Vinv, shape=(m, n))


def solve_via_snf(snf: SnfData, modulus: Modulus, b: np.ndarray) -> Optional[np.ndarray]:
    """Solve M @ X = B columnwise given the diagonalization of M.

    Requires ``snf`` to carry U and V.  Returns None when any column lies
    outside the image.
    """
    p, s, q = modulus.p, modulus.s, modulus.q
    m, n = snf.shape
    b = np.asarray(b, dtype=np.int64) % q
    single = b.ndim == 1
    if single:
        b = b.reshape(-1, 1)
    if b.shape[0] != m:
        raise ValueError(f"rhs has {b.shape[0]} rows, expected {m}")
    c = (snf.u @ b) % q
    y = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, e in enumerate(snf.pivots):
        pe = p ** e
        if (c[i, :] % pe).any():
            return None
        y[i, :] = c[i, :] // pe
    if len(snf.pivots) < m and c[len(snf.pivots):, :].any():
        return None
    x = (snf.v @ y) % q
    return x[:, 0] if single else x


@dataclass(frozen=True)
class SNFResult:
    """U @ M @ V = D with U, V invertible and D in sorted p-power diagonal form."""

    u: ResidueMatrix
    d: ResidueMatrix
    v: ResidueMatrix
    exponents: tuple[int, ...]


def smith_normal_form(matrix: ResidueMatrix) -> SNFResult:
    """Smith normal form of ``matrix`` over its modulus.

    The diagonal of D carries p^e for each exponent in nondecreasing order,
    followed by zeros.  Empty matrices are allowed.
    """
    m = matrix.modulus
    data = smith_data(matrix.to_array(), m, want_u=True, want_v=True)
    d_entries = {}
    for i, e in enumerate(data.pivots):
        d_entries[(i, i)] = m.p ** e
    d = ResidueMatrix(matrix.rows, matrix.cols, m, d_entries)
    return SNFResult(
        u=ResidueMatrix.from_array(data.u, m),
        d=d,
        v=ResidueMatrix.from_array(data.v, m),
        exponents=tuple(data.pivots),
    )


def cokernel_invariants(matrix: ResidueMatrix) -> ModuleInvariants:
    """Invariants of coker(M) = (Z/p^s)^rows / im(M).

    A diagonal entry p^e contributes Z/p^e (nothing when e = 0); rows without
    a pivot contribute a full Z/p^s summand.
    """
    m = matrix.modulus
    pivots = smith_data(matrix.to_array(), m).pivots
    exps = [e for e in pivots if e >= 1]
    exps.extend([m.s] * (matrix.rows - len(pivots)))
    return ModuleInvariants(m, tuple(exps))


def kernel_basis(matrix: ResidueMatrix) -> list[list[int]]:
    """Column vectors generating ker(M) as a Z/p^s-module.

    One generator per diagonal p^e with e > 0 (namely p^{s-e} times the
    corresponding column of V) and one per column of V beyond the pivots.
    """
    m = matrix.modulus
    data = smith_data(matrix.to_array(), m, want_v=True)
    q = m.q
    gens = []
    for j, e in enumerate(data.pivots):
        if e > 0:
            gens.append([int(x) for x in (data.v[:, j] * (m.p ** (m.s - e))) % q])
    for j in range(len(data.pivots), matrix.cols):
        gens.append([int(x) for x in data.v[:, j] % q])
    return gens


def solve_in_image(matrix: ResidueMatrix, b: Iterable[int]) -> Optional[list[int]]:
    """Some x with M @ x = b, or None when b is not in the image of M."""
    vec = list(b)
    if len(vec) != matrix.rows:
        raise ValueError(f"rhs length {len(vec)} != {matrix.rows} rows")
    m = matrix.modulus
    data = smith_data(matrix.to_array(), m, want_u=True, want_v=True)
    x = solve_via_snf(data, m, np.array(vec, dtype=np.int64))
    return None if x is None else [int(t) for t in x]
