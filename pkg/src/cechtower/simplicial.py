"""Finite simplicial complexes, pairs, simplicial maps and their cohomology.

Simplices are stored as sorted vertex tuples under the natural total order of
the vertex ids, and coboundary signs follow sorted position.  Relative
cochains of a pair (Y, Z) are cochains supported on simplices not in Z; for
finite complexes this computes the compactly supported cohomology of the open
complement, which is taken as its definition here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Optional

from .cochain import CochainComplex, CohomologyPresentation, induced_map_matrix, presentation
from .linalg import ResidueMatrix
from .residue import Modulus


def _as_simplex(vertices: Iterable) -> tuple:
    simplex = tuple(sorted(set(vertices)))
    if not simplex:
        raise ValueError("empty simplex")
    return simplex


class SimplicialComplex:
    """A finite abstract simplicial complex, closed under taking faces."""

    __slots__ = ("simplices", "vertices", "_by_dim")

    def __init__(self, simplices: Iterable[Iterable]):
        closed: set[tuple] = set()
        for raw in simplices:
            simplex = _as_simplex(raw)
            for k in range(1, len(simplex) + 1):
                closed.update(combinations(simplex, k))
        self.simplices = frozenset(closed)
        self.vertices = tuple(sorted({s[0] for s in closed if len(s) == 1}))
        by_dim: dict[int, list[tuple]] = {}
        for s in closed:
            by_dim.setdefault(len(s) - 1, []).append(s)
        self._by_dim = {d: tuple(sorted(v)) for d, v in by_dim.items()}

    @classmethod
    def point(cls, label=0) -> "SimplicialComplex":
        return cls([(label,)])

    @property
    def dim(self) -> int:
        return max(self._by_dim, default=-1)

    def n_simplices(self, n: int) -> tuple[tuple, ...]:
        return self._by_dim.get(n, ())

    def contains(self, simplex: Iterable) -> bool:
        return tuple(sorted(set(simplex))) in self.simplices

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * len(v) for d, v in self._by_dim.items())

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.simplices <= other.simplices

    def star_simplices(self, vertex) -> tuple[tuple, ...]:
        """All simplices containing the vertex (the combinatorial open star)."""
        return tuple(sorted(s for s in self.simplices if vertex in s))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.simplices == other.simplices

    def __hash__(self):
        return hash(self.simplices)

    def __repr__(self) -> str:
        counts = ", ".join(f"{len(self._by_dim.get(d, ()))} of dim {d}" for d in sorted(self._by_dim))
        return f"SimplicialComplex({counts})"


EMPTY_COMPLEX = SimplicialComplex.__new__(SimplicialComplex)
EMPTY_COMPLEX.simplices = frozenset()
EMPTY_COMPLEX.vertices = ()
EMPTY_COMPLEX._by_dim = {}


@dataclass(frozen=True)
class Pair:
    """A complex together with a subcomplex."""

    total: SimplicialComplex
    sub: SimplicialComplex

    def __post_init__(self) -> None:
        extra = self.sub.simplices - self.total.simplices
        if extra:
            raise ValueError(f"sub is not a subcomplex: {sorted(extra)[:3]} not in total")

    def relative_simplices(self, n: int) -> tuple[tuple, ...]:
        return tuple(s for s in self.total.n_simplices(n) if s not in self.sub.simplices)


class SimplicialMap:
    """A vertex map inducing a simplicial map between complexes."""

    __slots__ = ("source", "target", "vertex_map")

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex, vertex_map: Mapping):
        missing = [v for v in source.vertices if v not in vertex_map]
        if missing:
            raise ValueError(f"vertex map misses {missing[:3]}")
        self.source = source
        self.target = target
        self.vertex_map = dict(vertex_map)
        for simplex in source.simplices:
            image = tuple(sorted({self.vertex_map[v] for v in simplex}))
            if image not in target.simplices:
                raise ValueError(f"image of {simplex} is {image}, not a target simplex")

    @classmethod
    def identity(cls, complex_: SimplicialComplex) -> "SimplicialMap":
        return cls(complex_, complex_, {v: v for v in complex_.vertices})

    def apply_simplex(self, simplex: tuple) -> tuple[Optional[tuple], int]:
        """Image simplex and orientation sign; (None, 0) when degenerate.

        The sign is that of the permutation sorting the image vertex list,
        the simplex being given in sorted order.
        """
        images = [self.vertex_map[v] for v in simplex]
        if len(set(images)) != len(images):
            return None, 0
        sign = 1
        seq = list(images)
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if seq[i] > seq[j]:
                    seq[i], seq[j] = seq[j], seq[i]
                    sign = -sign
        return tuple(seq), sign

    def compose(self, inner: "SimplicialMap") -> "SimplicialMap":
        """self o inner (inner applied first)."""
        if inner.target is not self.source and inner.target != self.source:
            raise ValueError("maps are not composable")
        return SimplicialMap(
            inner.source, self.target,
            {v: self.vertex_map[w] for v, w in inner.vertex_map.items()},
        )

    def is_bijective(self) -> bool:
        return len(set(self.vertex_map.values())) == len(self.source.vertices) and set(
            self.vertex_map.values()
        ) == set(self.target.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
        )

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.vertex_map.items())))


# ----------------------------------------------------------------------
# cochain complexes and cohomology


def coboundary_matrix(
    complex_: SimplicialComplex,
    n: int,
    modulus: Modulus,
    sub: SimplicialComplex | None = None,
) -> ResidueMatrix:
    """Matrix of d^n: C^n(X, Z) -> C^{n+1}(X, Z).

    C^n(X, Z) is free on the n-simplices of X not in Z, with the alternating
    face-omission coboundary in sorted vertex order.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    sub_simplices = sub.simplices if sub is not None else frozenset()
    if sub is not None and not sub.is_subcomplex_of(complex_):
        raise ValueError("sub is not a subcomplex of the given complex")
    domain = tuple(s for s in complex_.n_simplices(n) if s not in sub_simplices)
    codomain = tuple(s for s in complex_.n_simplices(n + 1) if s not in sub_simplices)
    col_index = {s: j for j, s in enumerate(domain)}
    q = modulus.q
    entries: dict[tuple[int, int], int] = {}
    for i, simplex in enumerate(codomain):
        for k in range(len(simplex)):
            face = simplex[:k] + simplex[k + 1:]
            j = col_index.get(face)
            if j is not None:
                entries[(i, j)] = (entries.get((i, j), 0) + (-1) ** k) % q
    return ResidueMatrix(len(codomain), len(domain), modulus, entries)


def cochain_complex(
    complex_: SimplicialComplex,
    modulus: Modulus,
    n_max: int,
    sub: SimplicialComplex | None = None,
) -> CochainComplex:
    """The relative cochain complex in degrees 0 .. n_max + 1."""
    sub_simplices = sub.simplices if sub is not None else frozenset()
    basis = tuple(
        tuple(s for s in complex_.n_simplices(n) if s not in sub_simplices)
        for n in range(n_max + 2)
    )
    diffs = tuple(coboundary_matrix(complex_, n, modulus, sub) for n in range(n_max + 1))
    return CochainComplex(modulus, basis, diffs)


def cohomology(
    complex_: SimplicialComplex,
    n: int,
    modulus: Modulus,
    sub: SimplicialComplex | None = None,
) -> CohomologyPresentation:
    """H^n(X, Z; Z/p^s) with cocycle representatives; absolute when sub is None."""
    cx = cochain_complex(complex_, modulus, n, sub)
    return presentation(cx, n, space=complex_, sub=sub)


def pullback_matrix(
    f: SimplicialMap,
    row_labels: tuple[tuple, ...],
    col_labels: tuple[tuple, ...],
    modulus: Modulus,
) -> ResidueMatrix:
    """Cochain pullback f*: rows indexed by source simplices, cols by target.

    Degenerate simplices pull back to zero; nondegenerate ones carry the sign
    of the vertex-sorting permutation.  Rows whose image is not among the
    column labels (e.g. it lies in the target subcomplex) stay empty.
    """
    col_index = {s: j for j, s in enumerate(col_labels)}
    q = modulus.q
    entries: dict[tuple[int, int], int] = {}
    for i, simplex in enumerate(row_labels):
        image, sign = f.apply_simplex(simplex)
        if image is None:
            continue
        j = col_index.get(image)
        if j is not None:
            entries[(i, j)] = sign % q
    return ResidueMatrix(len(row_labels), len(col_labels), modulus, entries)


def induced_map(
    f: SimplicialMap,
    source_presentation: CohomologyPresentation,
    target_presentation: CohomologyPresentation,
) -> ResidueMatrix:
    """The contravariant map H^n(target of f) -> H^n(source of f).

    ``source_presentation`` presents the cohomology of f's source complex,
    ``target_presentation`` that of its target.  When both presentations are
    relative, f must map the source's subcomplex into the target's.
    """
    if source_presentation.degree != target_presentation.degree:
        raise ValueError("presentations have different degrees")
    if source_presentation.modulus != target_presentation.modulus:
        raise ValueError("presentations have different moduli")
    src_sub, tgt_sub = source_presentation.sub, target_presentation.sub
    if src_sub is not None and tgt_sub is not None:
        for simplex in src_sub.simplices:
            image = tuple(sorted({f.vertex_map[v] for v in simplex}))
            if image not in tgt_sub.simplices:
                raise ValueError("map does not respect the pairs")
    matrix = pullback_matrix(
        f,
        source_presentation.basis_labels,
        target_presentation.basis_labels,
        source_presentation.modulus,
    )
    return induced_map_matrix(matrix, target_presentation, source_presentation)


# ----------------------------------------------------------------------
# constructions


def disjoint_union(complexes: Iterable[SimplicialComplex]) -> SimplicialComplex:
    """Disjoint union with vertices tagged (index, vertex)."""
    simplices = []
    for idx, cx in enumerate(complexes):
        for s in cx.simplices:
            simplices.append(tuple((idx, v) for v in s))
    return SimplicialComplex(simplices)


def product_with_finite_set(
    complex_: SimplicialComplex, k: int
) -> tuple[SimplicialComplex, SimplicialMap]:
    """k labeled disjoint copies of the complex and the canonical projection.

    Copy i has vertices (v, i); the projection forgets the copy index.
    """
    if k < 1:
        raise ValueError("need at least one copy")
    simplices = []
    for i in range(k):
        for s in complex_.simplices:
            simplices.append(tuple((v, i) for v in s))
    total = SimplicialComplex(simplices)
    proj = SimplicialMap(total, complex_, {(v, i): v for v in complex_.vertices for i in range(k)})
    return total, proj
