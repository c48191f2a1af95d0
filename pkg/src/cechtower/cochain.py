"""Cochain complexes over Z/p^s and cohomology presentations with generators.

The presentation of H^n = ker(d^n)/im(d^{n-1}) is computed in three steps:
kernel generators of d^n from its diagonalization, coboundary columns
re-expressed in those generators, and a final diagonalization of the combined
relation matrix (coboundaries plus the generators' own orders).  The chosen
generators are adapted to that last diagonal, one per invariant factor, which
makes induced maps well-posed matrices in fixed coordinates.

Coordinates of the i-th generator are only defined modulo its order p^{e_i};
``normalize_rows`` reduces a matrix into that canonical range so equality of
induced maps is plain matrix equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .linalg import (
    ModuleInvariants,
    ResidueMatrix,
    SnfData,
    smith_data,
    solve_via_snf,
)
from .residue import Modulus


class ContractViolationError(RuntimeError):
    """An internal invariant failed (e.g. a pulled-back cocycle is no cocycle)."""


@dataclass(frozen=True)
class CochainComplex:
    """Modules C^0 .. C^top with differentials d^n: C^n -> C^{n+1}.

    ``basis[n]`` is the ordered tuple of labels indexing C^n; ``diffs[n]`` is
    the matrix of d^n (rows = basis[n+1], cols = basis[n]).
    """

    modulus: Modulus
    basis: tuple[tuple, ...]
    diffs: tuple[ResidueMatrix, ...]

    def __post_init__(self) -> None:
        if len(self.diffs) != len(self.basis) - 1:
            raise ValueError("need exactly one differential per adjacent degree pair")
        for n, d in enumerate(self.diffs):
            if d.cols != len(self.basis[n]) or d.rows != len(self.basis[n + 1]):
                raise ValueError(f"differential {n} has shape {d.rows}x{d.cols}, "
                                 f"expected {len(self.basis[n + 1])}x{len(self.basis[n])}")

    @property
    def top(self) -> int:
        return len(self.basis) - 1

    def rank(self, n: int) -> int:
        return len(self.basis[n]) if 0 <= n <= self.top else 0

    def differential(self, n: int) -> ResidueMatrix:
        if not 0 <= n < self.top:
            raise ValueError(f"no differential at degree {n}")
        return self.diffs[n]

    def is_complex(self) -> bool:
        """d^{n+1} o d^n = 0 for all stored degrees."""
        for n in range(self.top - 1):
            if not (self.diffs[n + 1] @ self.diffs[n]).is_zero():
                return False
        return True


@dataclass
class CohomologyPresentation:
    """H^n with invariants, adapted cocycle generators and a coordinate map.

    ``cocycle_reps[i]`` is a cochain vector generating the i-th summand
    Z/p^{exponents[i]}; ``express`` writes any cocycle in these generators
    modulo coboundaries.
    """

    degree: int
    modulus: Modulus
    invariants: ModuleInvariants
    cocycle_reps: list[tuple[int, ...]]
    basis_labels: tuple
    space: object = None
    sub: object = None
    _kernel: np.ndarray = field(default=None, repr=False)
    _kernel_snf: SnfData = field(default=None, repr=False)
    _u_rel: np.ndarray = field(default=None, repr=False)
    _kept: list[int] = field(default_factory=list, repr=False)
    _orders: list[int] = field(default_factory=list, repr=False)

    @property
    def rank(self) -> int:
        return self.invariants.rank

    def order_exponent(self, i: int) -> int:
        """Exponent e with the i-th generator of order p^e."""
        return self.invariants.exponents[i]

    def express(self, cochain: Iterable[int]) -> tuple[int, ...]:
        """Coordinates of a cocycle, canonical modulo each generator's order.

        Raises ContractViolationError when the vector is not a cocycle of the
        presented complex (equivalently: not in the span of the kernel
        generators).
        """
        q = self.modulus.q
        vec = np.array(list(cochain), dtype=np.int64) % q
        if vec.shape[0] != len(self.basis_labels):
            raise ValueError(f"cochain length {vec.shape[0]} != {len(self.basis_labels)}")
        y = solve_via_snf(self._kernel_snf, self.modulus, vec)
        if y is None:
            raise ContractViolationError("vector is not a cocycle of this complex")
        coords = (self._u_rel @ y) % q
        p = self.modulus.p
        return tuple(int(coords[i] % p ** self._orders[i]) for i in self._kept)

    def assemble(self, coordinates: Sequence[int]) -> tuple[int, ...]:
        """The cocycle sum(coordinates[i] * cocycle_reps[i])."""
        if len(coordinates) != self.rank:
            raise ValueError("coordinate count mismatch")
        q = self.modulus.q
        out = np.zeros(len(self.basis_labels), dtype=np.int64)
        for c, rep in zip(coordinates, self.cocycle_reps):
            out = (out + c * np.array(rep, dtype=np.int64)) % q
        return tuple(int(x) for x in out)

    def is_coboundary(self, cochain: Iterable[int]) -> bool:
        return all(c == 0 for c in self.express(cochain))


def presentation(cx: CochainComplex, degree: int, space=None, sub=None) -> CohomologyPresentation:
    """Presentation of H^degree(cx) = ker(d^degree)/im(d^{degree-1})."""
    if not 0 <= degree < cx.top:
        raise ValueError(f"degree {degree} needs differentials up to d^{degree}")
    m = cx.modulus
    p, s, q = m.p, m.s, m.q
    labels = cx.basis[degree]
    c_n = len(labels)

    a_arr = cx.differential(degree).to_array()
    if degree > 0:
        b_arr = cx.differential(degree - 1).to_array()
    else:
        b_arr = np.zeros((c_n, 0), dtype=np.int64)

    snf_a = smith_data(a_arr, m, want_v=True)
    gen_cols: list[np.ndarray] = []
    orders: list[int] = []
    for j, e in enumerate(snf_a.pivots):
        if e > 0:
            gen_cols.append((snf_a.v[:, j] * (p ** (s - e))) % q)
            orders.append(e)
    for j in range(len(snf_a.pivots), c_n):
        gen_cols.append(snf_a.v[:, j] % q)
        orders.append(s)
    k = len(gen_cols)
    kernel = (
        np.column_stack(gen_cols) if gen_cols else np.zeros((c_n, 0), dtype=np.int64)
    )
    snf_k = smith_data(kernel, m, want_u=True, want_v=True)

    in_kernel = solve_via_snf(snf_k, m, b_arr)
    if in_kernel is None:
        raise ContractViolationError("coboundaries do not lie in the cocycle module")

    order_diag = np.diag([p ** o % q for o in orders]).astype(np.int64) if k else np.zeros((0, 0), dtype=np.int64)
    relations = np.hstack([in_kernel, order_diag]) if k else np.zeros((0, b_arr.shape[1]), dtype=np.int64)
    snf_r = smith_data(relations, m, want_u=True, want_uinv=True)

    etilde = list(snf_r.pivots) + [s] * (k - len(snf_r.pivots))
    kept = [i for i, e in enumerate(etilde) if e >= 1]
    invariants = ModuleInvariants(m, tuple(etilde[i] for i in kept))
    reps = [
        tuple(int(x) for x in (kernel @ snf_r.uinv[:, i]) % q) for i in kept
    ]
    return CohomologyPresentation(
        degree=degree,
        modulus=m,
        invariants=invariants,
        cocycle_reps=reps,
        basis_labels=labels,
        space=space,
        sub=sub,
        _kernel=kernel,
        _kernel_snf=snf_k,
        _u_rel=snf_r.u,
        _kept=kept,
        _orders=etilde,
    )


# ----------------------------------------------------------------------
# maps between presented modules


def normalize_rows(matrix: ResidueMatrix, codomain: CohomologyPresentation) -> ResidueMatrix:
    """Reduce row i modulo the order of the codomain's i-th generator."""
    if matrix.rows != codomain.rank:
        raise ValueError("row count does not match codomain rank")
    p = codomain.modulus.p
    entries = {}
    for (i, j), v in matrix.entries.items():
        entries[(i, j)] = v % (p ** codomain.order_exponent(i))
    return ResidueMatrix(matrix.rows, matrix.cols, matrix.modulus, entries)


def induced_map_matrix(
    cochain_map: ResidueMatrix,
    domain: CohomologyPresentation,
    codomain: CohomologyPresentation,
) -> ResidueMatrix:
    """Matrix of the map H(domain) -> H(codomain) induced by a cochain map.

    ``cochain_map`` sends cochains underlying ``domain`` to cochains
    underlying ``codomain`` (rows = codomain basis, cols = domain basis).
    Entries come out canonical modulo the codomain generator orders.
    """
    if cochain_map.cols != len(domain.basis_labels):
        raise ValueError("cochain map columns do not match domain basis")
    if cochain_map.rows != len(codomain.basis_labels):
        raise ValueError("cochain map rows do not match codomain basis")
    q = domain.modulus.q
    arr = cochain_map.to_array()
    entries = {}
    for j, rep in enumerate(domain.cocycle_reps):
        image = (arr @ np.array(rep, dtype=np.int64)) % q
        for i, c in enumerate(codomain.express(image)):
            if c:
                entries[(i, j)] = c
    return ResidueMatrix(codomain.rank, domain.rank, domain.modulus, entries)


def compose_maps(
    second: ResidueMatrix, first: ResidueMatrix, codomain: CohomologyPresentation
) -> ResidueMatrix:
    """normalize(second @ first) for maps written in generator coordinates."""
    return normalize_rows(second @ first, codomain)


def is_zero_map(matrix: ResidueMatrix, codomain: CohomologyPresentation) -> bool:
    return normalize_rows(matrix, codomain).is_zero()


def _invariants_of(module) -> ModuleInvariants:
    return module.invariants if isinstance(module, CohomologyPresentation) else module


def image_size_exponent(matrix: ResidueMatrix, codomain) -> int:
    """log_p of the image size of the presented-module map given by ``matrix``.

    The image inside the codomain is (columns of the matrix + relations) /
    relations; both sizes fall out of one diagonalization.
    """
    cod = _invariants_of(codomain)
    m = cod.modulus
    p, s, q = m.p, m.s, m.q
    if cod.rank == 0:
        return 0
    rel = np.diag([p ** e % q for e in cod.exponents]).astype(np.int64)
    combined = np.hstack([matrix.to_array(), rel])
    pivots = smith_data(combined, m).pivots
    log_full = sum(s - e for e in pivots)
    log_rel = sum(s - e for e in cod.exponents)
    return log_full - log_rel


def kernel_size_exponent(matrix: ResidueMatrix, domain, codomain) -> int:
    return _invariants_of(domain).cardinality_exponent - image_size_exponent(matrix, codomain)


def is_isomorphism(matrix: ResidueMatrix, domain, codomain) -> bool:
    dom = _invariants_of(domain)
    cod = _invariants_of(codomain)
    if dom.cardinality_exponent != cod.cardinality_exponent:
        return False
    return image_size_exponent(matrix, codomain) == cod.cardinality_exponent
