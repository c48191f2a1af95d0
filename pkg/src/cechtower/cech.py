"""Star covers, presheaf coefficients and Cech complexes of finite complexes.

Covers are open-star covers of a finite simplicial complex and their pullbacks
along covering maps, handled symbolically: an intersection of stars is
described by the deduplicated vertex tuple (its support), and its connected
components are simplices of the covered complex.  For the plain star cover
the support itself is the single component; for a pullback cover the
components are the fiber simplices over the support.

Whether an intersection meets a subcomplex Z is decided combinatorially: the
open star of a simplex meets |Z| exactly when the simplex lies in Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product
from typing import Iterable, Optional

from .cochain import CochainComplex, CohomologyPresentation, presentation
from .linalg import ModuleInvariants, ResidueMatrix
from .residue import Modulus
from .simplicial import Pair, SimplicialComplex, SimplicialMap, cochain_complex

VANISHING = "vanishing"   # sections are 0 on every intersection meeting Z
SUPPORTED = "supported"   # sections are 0 on every intersection missing Z

FULL = "full"             # all ordered index tuples
ALTERNATING = "alternating"  # strictly increasing tuples only


class Cover:
    """Common interface of star covers and their pullbacks."""

    complex: SimplicialComplex
    base: SimplicialComplex

    @property
    def indices(self) -> tuple:
        return self.base.vertices

    def components(self, support: tuple) -> tuple[tuple, ...]:
        raise NotImplementedError

    def component_face(self, component: tuple, sub_support: tuple) -> tuple:
        raise NotImplementedError

    def project_vertex(self, vertex):
        raise NotImplementedError


class StarCover(Cover):
    """The cover of a complex by the open stars of its vertices.

    An intersection with support sigma is nonempty iff sigma is a simplex, and
    is then the open star of sigma: connected and contractible.
    """

    def __init__(self, complex_: SimplicialComplex):
        self.complex = complex_
        self.base = complex_

    def components(self, support: tuple) -> tuple[tuple, ...]:
        return (support,) if support in self.complex.simplices else ()

    def component_face(self, component: tuple, sub_support: tuple) -> tuple:
        return sub_support

    def project_vertex(self, vertex):
        return vertex

    def __eq__(self, other):
        return isinstance(other, StarCover) and self.complex == other.complex

    def __hash__(self):
        return hash(("star", self.complex))


class PullbackCover(Cover):
    """Preimages of a base star cover along a covering map.

    Indexed by the base vertices; the component structure over a support
    simplex is its simplex fiber upstairs.
    """

    def __init__(self, projection: SimplicialMap):
        self.projection = projection
        self.complex = projection.source
        self.base = projection.target
        fibers: dict[tuple, list[tuple]] = {}
        for simplex in self.complex.simplices:
            image, _sign = projection.apply_simplex(simplex)
            if image is not None:
                fibers.setdefault(image, []).append(simplex)
        self._fibers = {k: tuple(sorted(v)) for k, v in fibers.items()}

    def components(self, support: tuple) -> tuple[tuple, ...]:
        if support not in self.base.simplices:
            return ()
        return self._fibers.get(support, ())

    def component_face(self, component: tuple, sub_support: tuple) -> tuple:
        wanted = set(sub_support)
        face = tuple(v for v in component if self.projection.vertex_map[v] in wanted)
        return face

    def project_vertex(self, vertex):
        return self.projection.vertex_map[vertex]


# ----------------------------------------------------------------------
# presheaves


class ConstantPresheaf:
    """Locally constant Z/p^s-valued functions on the cover's intersections.

    The value on an intersection is the free module on its components; the
    restriction along an inclusion of intersections sends the coordinate of a
    component to that of the component containing it.
    """

    def __init__(self, cover: Cover, modulus: Modulus):
        self.cover = cover
        self.modulus = modulus

    def labels(self, support: tuple) -> tuple[tuple, ...]:
        return self.cover.components(support)

    def restriction(self, from_support: tuple, to_support: tuple) -> ResidueMatrix:
        """Matrix of F(U_from) -> F(U_to) for from_support a subset of to_support."""
        if not set(from_support) <= set(to_support):
            raise ValueError("restriction requires a tuple inclusion")
        rows = self.labels(to_support)
        cols = self.labels(from_support)
        col_index = {c: j for j, c in enumerate(cols)}
        entries = {}
        for i, comp in enumerate(rows):
            j = col_index.get(self.cover.component_face(comp, from_support))
            if j is not None:
                entries[(i, j)] = 1
        return ResidueMatrix(len(rows), len(cols), self.modulus, entries)


class RelativizedPresheaf:
    """The vanishing-on-Z or supported-on-Z modification of a constant presheaf.

    In vanishing mode the value is zero on every intersection meeting Z and
    the base value elsewhere; supported mode swaps the two cases.
    """

    def __init__(self, base: ConstantPresheaf, pair: Pair, mode: str):
        if mode not in (VANISHING, SUPPORTED):
            raise ValueError(f"unknown mode {mode!r}")
        if pair.total != base.cover.complex:
            raise ValueError("pair does not describe the covered complex")
        self.base = base
        self.pair = pair
        self.mode = mode
        self.cover = base.cover
        self.modulus = base.modulus

    def meets_sub(self, support: tuple) -> bool:
        sub = self.pair.sub.simplices
        return any(c in sub for c in self.cover.components(support))

    def labels(self, support: tuple) -> tuple[tuple, ...]:
        meets = self.meets_sub(support)
        if (self.mode == VANISHING) == meets:
            return ()
        return self.base.labels(support)

    def restriction(self, from_support: tuple, to_support: tuple) -> ResidueMatrix:
        rows = self.labels(to_support)
        cols = self.labels(from_support)
        col_index = {c: j for j, c in enumerate(cols)}
        entries = {}
        for i, comp in enumerate(rows):
            j = col_index.get(self.cover.component_face(comp, from_support))
            if j is not None:
                entries[(i, j)] = 1
        return ResidueMatrix(len(rows), len(cols), self.modulus, entries)


def constant_presheaf(cover: Cover, modulus: Modulus) -> ConstantPresheaf:
    return ConstantPresheaf(cover, modulus)


def relative_presheaf(cover: Cover, modulus: Modulus, pair: Pair, mode: str = VANISHING):
    """Convenience: the relativized constant presheaf, or the plain one if pair is None."""
    if pair is None:
        return ConstantPresheaf(cover, modulus)
    return RelativizedPresheaf(ConstantPresheaf(cover, modulus), pair, mode)


# ----------------------------------------------------------------------
# Cech complexes


def _support(tup: tuple) -> tuple:
    return tuple(sorted(set(tup)))


def _degree_basis(cover: Cover, presheaf, n: int, style: str) -> tuple:
    labels = []
    if style == FULL:
        for support in sorted(cover.base.simplices):
            if len(support) > n + 1:
                continue
            comps = presheaf.labels(support)
            if not comps:
                continue
            wanted = set(support)
            for tup in iter_product(support, repeat=n + 1):
                if set(tup) == wanted:
                    for c in comps:
                        labels.append((tup, c))
    elif style == ALTERNATING:
        for support in cover.base.n_simplices(n):
            for c in presheaf.labels(support):
                labels.append((support, c))
    else:
        raise ValueError(f"unknown style {style!r}")
    return tuple(sorted(labels))


def cech_complex(cover: Cover, presheaf, n_max: int, style: str = FULL) -> CochainComplex:
    """The Cech complex of the cover in degrees 0 .. n_max + 1.

    In the full style the degree-n module is the product over all ordered
    (n+1)-tuples of indices with nonempty intersection of the presheaf value
    there; the differential is the alternating sum of omit-one-index
    restrictions.  The alternating style keeps strictly increasing tuples
    only; its cohomology agrees with the full one and is cross-validated in
    the test suite rather than assumed.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    modulus = presheaf.modulus
    q = modulus.q
    basis = tuple(_degree_basis(cover, presheaf, n, style) for n in range(n_max + 2))
    diffs = []
    for n in range(n_max + 1):
        col_index = {lbl: j for j, lbl in enumerate(basis[n])}
        entries: dict[tuple[int, int], int] = {}
        for i, (tup, comp) in enumerate(basis[n + 1]):
            for k in range(len(tup)):
                face = tup[:k] + tup[k + 1:]
                face_comp = cover.component_face(comp, _support(face))
                j = col_index.get((face, face_comp))
                if j is not None:
                    entries[(i, j)] = (entries.get((i, j), 0) + (-1) ** k) % q
        diffs.append(ResidueMatrix(len(basis[n + 1]), len(basis[n]), modulus, dict(
            (key, v) for key, v in entries.items() if v
        )))
    return CochainComplex(modulus, basis, tuple(diffs))


def cech_cohomology(cover: Cover, presheaf, n: int, style: str = FULL) -> CohomologyPresentation:
    """H^n of the Cech complex, same presentation contract as the simplicial side."""
    cx = cech_complex(cover, presheaf, n, style)
    return presentation(cx, n, space=cover, sub=getattr(presheaf, "pair", None))


def comparison_matrix(
    cover: Cover,
    cech_labels: tuple,
    simplicial_labels: tuple[tuple, ...],
    modulus: Modulus,
) -> ResidueMatrix:
    """The canonical cochain map from the full Cech complex to the simplicial one.

    A Cech cochain is evaluated on a simplex by reading its value on the
    tuple of projected vertices at the component given by the simplex itself.
    This is a chain map and induces the comparison isomorphism in cohomology.
    """
    col_index = {lbl: j for j, lbl in enumerate(cech_labels)}
    entries = {}
    for i, simplex in enumerate(simplicial_labels):
        tup = tuple(cover.project_vertex(v) for v in simplex)
        j = col_index.get((tup, simplex))
        if j is not None:
            entries[(i, j)] = 1
    return ResidueMatrix(len(simplicial_labels), len(cech_labels), modulus, entries)


# ----------------------------------------------------------------------
# Leray / comparison report


@dataclass(frozen=True)
class LerayDegree:
    degree: int
    cech: ModuleInvariants
    simplicial: ModuleInvariants

    @property
    def equal(self) -> bool:
        return self.cech == self.simplicial


@dataclass(frozen=True)
class LerayReport:
    modulus: Modulus
    degrees: tuple[LerayDegree, ...]
    acyclicity_certified: bool
    notes: tuple[str, ...]

    @property
    def all_equal(self) -> bool:
        return all(d.equal for d in self.degrees)

    def to_json_dict(self) -> dict:
        return {
            "modulus": {"p": self.modulus.p, "s": self.modulus.s},
            "degrees": [
                {
                    "n": d.degree,
                    "cech": list(d.cech.exponents),
                    "simplicial": list(d.simplicial.exponents),
                    "equal": d.equal,
                }
                for d in self.degrees
            ],
            "acyclicity_certified": self.acyclicity_certified,
            "all_equal": self.all_equal,
            "notes": list(self.notes),
        }


def _certify_star_acyclicity(cover: StarCover, sub: Optional[SimplicialComplex]) -> tuple[bool, list[str]]:
    notes = []
    ok = True
    for simplex in cover.complex.simplices:
        comps = cover.components(simplex)
        if comps != (simplex,):
            ok = False
            notes.append(f"intersection at {simplex} is not a single star component")
            break
    else:
        notes.append("every nonempty intersection is the open star of its support simplex, "
                     "hence connected and contractible")
    if sub is not None:
        # face closure makes 'star meets |Z|' equivalent to 'support in Z'
        if all(tuple(sorted(f)) in sub.simplices
               for s in sub.simplices for f in _faces(s)):
            notes.append("subcomplex is face-closed; star-meets-Z reduces to membership of the support")
        else:
            ok = False
            notes.append("subcomplex is not face-closed")
    return ok, notes


def _faces(simplex: tuple):
    for k in range(len(simplex)):
        if len(simplex) > 1:
            yield simplex[:k] + simplex[k + 1:]


def leray_comparison(
    complex_: SimplicialComplex,
    modulus: Modulus,
    n_max: int,
    sub: SimplicialComplex | None = None,
) -> LerayReport:
    """Compare Cech cohomology of the star cover against simplicial cohomology.

    Computes both sides independently for all degrees up to n_max and reports
    per-degree equality of invariants, together with the structural
    certification that the star cover satisfies the acyclicity hypothesis.
    """
    cover = StarCover(complex_)
    pair = Pair(complex_, sub) if sub is not None else None
    presheaf = relative_presheaf(cover, modulus, pair)
    cech_cx = cech_complex(cover, presheaf, n_max)
    simp_cx = cochain_complex(complex_, modulus, n_max, sub)
    degrees = []
    for n in range(n_max + 1):
        cech_inv = presentation(cech_cx, n).invariants
        simp_inv = presentation(simp_cx, n).invariants
        degrees.append(LerayDegree(n, cech_inv, simp_inv))
    certified, notes = _certify_star_acyclicity(cover, sub)
    return LerayReport(modulus, tuple(degrees), certified, tuple(notes))


# ----------------------------------------------------------------------
# the presheaf short exact sequence


@dataclass
class PresheafLevelData:
    """Levelwise data of 0 -> F^Z -> F -> F_Z -> 0 over one cover.

    The three complexes share the label universe: the full basis splits in
    every degree into the vanishing part and the supported part, which is the
    structural form of levelwise exactness.
    """

    cover: Cover
    pair: Pair
    modulus: Modulus
    vanishing: CochainComplex
    full: CochainComplex
    supported: CochainComplex
    inclusions: tuple[ResidueMatrix, ...]
    projections: tuple[ResidueMatrix, ...]
    levelwise_exact: bool
    _presentations: dict = field(default_factory=dict, repr=False)

    def pres(self, which: str, n: int) -> CohomologyPresentation:
        key = (which, n)
        if key not in self._presentations:
            cx = {"vanishing": self.vanishing, "full": self.full, "supported": self.supported}[which]
            self._presentations[key] = presentation(cx, n)
        return self._presentations[key]


def presheaf_les(cover: Cover, modulus: Modulus, pair: Pair, n_max: int,
                 style: str = FULL) -> PresheafLevelData:
    """The three Cech complexes of the sequence 0 -> F^Z -> F -> F_Z -> 0.

    Inclusion and projection are basis inclusions/projections; the quotient
    map is surjective with kernel exactly the vanishing part in every degree.
    The sequence and everything derived from it make sense for either tuple
    style; the two styles' cohomology is cross-validated elsewhere.
    """
    base = ConstantPresheaf(cover, modulus)
    van = RelativizedPresheaf(base, pair, VANISHING)
    sup = RelativizedPresheaf(base, pair, SUPPORTED)
    cx_van = cech_complex(cover, van, n_max + 1, style)
    cx_full = cech_complex(cover, base, n_max + 1, style)
    cx_sup = cech_complex(cover, sup, n_max + 1, style)

    inclusions = []
    projections = []
    exact = True
    for n in range(len(cx_full.basis)):
        full_index = {lbl: i for i, lbl in enumerate(cx_full.basis[n])}
        inc_entries = {}
        for j, lbl in enumerate(cx_van.basis[n]):
            i = full_index.get(lbl)
            if i is None:
                exact = False
                continue
            inc_entries[(i, j)] = 1
        proj_entries = {}
        for i, lbl in enumerate(cx_sup.basis[n]):
            j = full_index.get(lbl)
            if j is None:
                exact = False
                continue
            proj_entries[(i, j)] = 1
        inclusions.append(ResidueMatrix(len(cx_full.basis[n]), len(cx_van.basis[n]), modulus, inc_entries))
        projections.append(ResidueMatrix(len(cx_sup.basis[n]), len(cx_full.basis[n]), modulus, proj_entries))
        if len(cx_van.basis[n]) + len(cx_sup.basis[n]) != len(cx_full.basis[n]):
            exact = False
        if not (projections[n] @ inclusions[n]).is_zero():
            exact = False
    return PresheafLevelData(
        cover=cover,
        pair=pair,
        modulus=modulus,
        vanishing=cx_van,
        full=cx_full,
        supported=cx_sup,
        inclusions=tuple(inclusions),
        projections=tuple(projections),
        levelwise_exact=exact,
    )
