"""Built-in desk-scale complexes, pairs and towers with known answers.

Triangulations and vertex numberings are fixed so the attached oracle records
are bit-stable.  Complex and pair oracles list the free rank of each nonzero
cohomology degree (all suite spaces have free cohomology over Z/p^s); tower
oracles record expected classifications and per-level rank formulas.

Voltage towers use the derived-graph construction over the cyclic groups
Z/p^r.  Base edges are subdivided at a midpoint so the derived graphs are
simple at every level, loops and parallel edges included; a base edge of
voltage a becomes a half with voltage a and a half with voltage 0, which
leaves the covering unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .simplicial import EMPTY_COMPLEX, Pair, SimplicialComplex, SimplicialMap
from .tower import Tower, validate_tower

COMPLEX_KINDS = ("point", "cycle", "interval", "disk", "cylinder")
PAIR_KINDS = ("interval_pair", "circle_pair", "disk_pair", "cylinder_pair")
TOWER_KINDS = ("solenoid_tower", "solenoid_cylinder_tower", "trivial_tower", "voltage_tower")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: tuple[tuple[str, object], ...] = ()

    @classmethod
    def of(cls, kind: str, **params) -> "GeneratorSpec":
        return cls(kind, tuple(sorted(params.items())))

    def get(self, name: str, default=None):
        for key, value in self.params:
            if key == name:
                return value
        return default

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "params": {k: v for k, v in self.params}}


@dataclass
class GeneratedObject:
    category: str  # complex | pair | tower
    obj: object
    oracle: dict
    spec: GeneratorSpec


# ----------------------------------------------------------------------
# complexes and pairs


def _cycle(k: int) -> SimplicialComplex:
    if k < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return SimplicialComplex([(i, (i + 1) % k) for i in range(k)])


def _interval(k: int) -> SimplicialComplex:
    if k < 1:
        raise ValueError("an interval needs at least one edge")
    return SimplicialComplex([(i, i + 1) for i in range(k)])


def _disk(k: int) -> SimplicialComplex:
    # cone over the k-cycle; vertex k is the center
    if k < 3:
        raise ValueError("the rim needs at least 3 vertices")
    return SimplicialComplex([(i, (i + 1) % k, k) for i in range(k)])


def _cylinder(k: int, h: int) -> SimplicialComplex:
    # vertex (i, j) -> j * k + i, i mod k around, j = 0..h across
    if k < 3 or h < 1:
        raise ValueError("need k >= 3 and h >= 1")
    triangles = []
    for j in range(h):
        for i in range(k):
            a = j * k + i
            b = j * k + (i + 1) % k
            c = (j + 1) * k + i
            d = (j + 1) * k + (i + 1) % k
            triangles.append((a, b, d))
            triangles.append((a, d, c))
    return SimplicialComplex(triangles)


def _cylinder_rims(k: int, h: int) -> SimplicialComplex:
    rims = [(j * k + i, j * k + (i + 1) % k) for j in (0, h) for i in range(k)]
    return SimplicialComplex(rims)


# ----------------------------------------------------------------------
# towers


def _solenoid_tower(p: int, r_max: int, base_k: int) -> Tower:
    if base_k < 3:
        raise ValueError("base cycle needs at least 3 vertices")
    sizes = [base_k * p ** r for r in range(r_max + 1)]
    levels = [Pair(_cycle(n), EMPTY_COMPLEX) for n in sizes]
    projections = [
        SimplicialMap(levels[r + 1].total, levels[r].total,
                      {v: v % sizes[r] for v in range(sizes[r + 1])})
        for r in range(r_max)
    ]
    deck_actions = [
        [
            {v: (v + base_k * t) % sizes[r] for v in range(sizes[r])}
            for t in range(p ** r)
        ]
        for r in range(r_max + 1)
    ]
    return Tower(levels, projections, [p ** r for r in range(r_max + 1)], deck_actions)


def _solenoid_cylinder_tower(p: int, r_max: int, base_k: int, h: int) -> Tower:
    sizes = [base_k * p ** r for r in range(r_max + 1)]
    levels = [Pair(_cylinder(n, h), _cylinder_rims(n, h)) for n in sizes]
    projections = []
    for r in range(r_max):
        n_hi, n_lo = sizes[r + 1], sizes[r]
        vmap = {
            j * n_hi + i: j * n_lo + (i % n_lo)
            for j in range(h + 1)
            for i in range(n_hi)
        }
        projections.append(SimplicialMap(levels[r + 1].total, levels[r].total, vmap))
    deck_actions = [
        [
            {
                j * sizes[r] + i: j * sizes[r] + (i + base_k * t) % sizes[r]
                for j in range(h + 1)
                for i in range(sizes[r])
            }
            for t in range(p ** r)
        ]
        for r in range(r_max + 1)
    ]
    return Tower(levels, projections, [p ** r for r in range(r_max + 1)], deck_actions)


def _relabel_complex(cx: SimplicialComplex, label: dict) -> SimplicialComplex:
    return SimplicialComplex([tuple(label[v] for v in s) for s in cx.simplices])


def _trivial_tower(base: Pair, p: int, r_max: int) -> Tower:
    n_verts = len(base.total.vertices)
    index = {v: i for i, v in enumerate(base.total.vertices)}
    levels = []
    for r in range(r_max + 1):
        fibers = p ** r
        total = SimplicialComplex([
            tuple(f * n_verts + index[v] for v in s)
            for f in range(fibers)
            for s in base.total.simplices
        ])
        if base.sub.simplices:
            sub = SimplicialComplex([
                tuple(f * n_verts + index[v] for v in s)
                for f in range(fibers)
                for s in base.sub.simplices
            ])
        else:
            sub = EMPTY_COMPLEX
        levels.append(Pair(total, sub))
    projections = []
    for r in range(r_max):
        fibers_lo = p ** r
        vmap = {
            f * n_verts + i: (f % fibers_lo) * n_verts + i
            for f in range(p ** (r + 1))
            for i in range(n_verts)
        }
        projections.append(SimplicialMap(levels[r + 1].total, levels[r].total, vmap))
    deck_actions = [
        [
            {
                f * n_verts + i: ((f + t) % p ** r) * n_verts + i
                for f in range(p ** r)
                for i in range(n_verts)
            }
            for t in range(p ** r)
        ]
        for r in range(r_max + 1)
    ]
    return Tower(levels, projections, [p ** r for r in range(r_max + 1)], deck_actions)


def _voltage_tower(num_vertices: int, edges: tuple, p: int, r_max: int) -> Tower:
    """Derived-graph tower of a voltage graph with group Z/p^r at level r.

    ``edges`` lists (tail, head, voltage) with voltages in Z.  Every base edge
    is subdivided at two midpoints (so loops and parallel edges stay simple at
    every level); edge m's midpoints get vertex ids num_vertices + 2m and
    num_vertices + 2m + 1, and group coordinate g shifts ids by g * width.
    """
    if num_vertices < 1 or not edges:
        raise ValueError("need at least one vertex and one edge")
    for (u, v, _a) in edges:
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise ValueError("edge endpoint out of range")
    width = num_vertices + 2 * len(edges)

    def level_complex(r: int) -> SimplicialComplex:
        group = p ** r
        level_edges = []
        for g in range(group):
            for m, (u, v, a) in enumerate(edges):
                mid1 = num_vertices + 2 * m
                mid2 = num_vertices + 2 * m + 1
                level_edges.append((g * width + u, ((g + a) % group) * width + mid1))
                level_edges.append((g * width + mid1, g * width + mid2))
                level_edges.append((g * width + mid2, g * width + v))
        return SimplicialComplex(level_edges)

    levels = [Pair(level_complex(r), EMPTY_COMPLEX) for r in range(r_max + 1)]
    projections = []
    for r in range(r_max):
        group_lo = p ** r
        vmap = {
            g * width + w: (g % group_lo) * width + w
            for g in range(p ** (r + 1))
            for w in range(width)
        }
        projections.append(SimplicialMap(levels[r + 1].total, levels[r].total, vmap))
    deck_actions = [
        [
            {
                g * width + w: ((g + t) % p ** r) * width + w
                for g in range(p ** r)
                for w in range(width)
            }
            for t in range(p ** r)
        ]
        for r in range(r_max + 1)
    ]
    return Tower(levels, projections, [p ** r for r in range(r_max + 1)], deck_actions)


def _graph_components(cx: SimplicialComplex) -> int:
    parent = {v: v for v in cx.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in cx.n_simplices(1):
        ra, rb = find(e[0]), find(e[1])
        if ra != rb:
            parent[ra] = rb
    return len({find(v) for v in cx.vertices})


# ----------------------------------------------------------------------
# dispatch


def build(spec: GeneratorSpec) -> GeneratedObject:
    """Construct the object named by the spec, with its oracle record attached.

    Towers are validated on construction; an invalid construction is a bug in
    the generator, not an input condition.
    """
    kind = spec.kind
    g = spec.get
    if kind == "point":
        return GeneratedObject("complex", SimplicialComplex.point(), {"ranks": {0: 1}}, spec)
    if kind == "cycle":
        k = g("k", 3)
        return GeneratedObject("complex", _cycle(k), {"ranks": {0: 1, 1: 1}}, spec)
    if kind == "interval":
        k = g("k", 1)
        return GeneratedObject("complex", _interval(k), {"ranks": {0: 1}}, spec)
    if kind == "disk":
        k = g("subdiv", 3)
        return GeneratedObject("complex", _disk(k), {"ranks": {0: 1}}, spec)
    if kind == "cylinder":
        k, h = g("k", 3), g("height", 1)
        return GeneratedObject("complex", _cylinder(k, h), {"ranks": {0: 1, 1: 1}}, spec)
    if kind == "interval_pair":
        k = g("k", 1)
        total = _interval(k)
        pair = Pair(total, SimplicialComplex([(0,), (k,)]))
        return GeneratedObject("pair", pair, {"ranks": {1: 1}}, spec)
    if kind == "circle_pair":
        k = g("k", 3)
        pair = Pair(_cycle(k), SimplicialComplex([(0,)]))
        return GeneratedObject("pair", pair, {"ranks": {1: 1}}, spec)
    if kind == "disk_pair":
        k = g("subdiv", 3)
        pair = Pair(_disk(k), _cycle(k))
        return GeneratedObject("pair", pair, {"ranks": {2: 1}}, spec)
    if kind == "cylinder_pair":
        k, h = g("k", 3), g("height", 1)
        pair = Pair(_cylinder(k, h), _cylinder_rims(k, h))
        return GeneratedObject("pair", pair, {"ranks": {1: 1, 2: 1}}, spec)
    if kind == "solenoid_tower":
        p, r_max, base_k = g("p", 2), g("r_max", 2), g("base_k", 3)
        tower = _solenoid_tower(p, r_max, base_k)
        oracle = {
            "level_ranks": {0: [1] * (r_max + 1), 1: [1] * (r_max + 1)},
            "classification": {0: "STABILIZES", 1: "VANISHES"},
            "inferred": {0: {"kind": "module", "free_rank": 1}, 1: {"kind": "zero"}},
        }
        obj = GeneratedObject("tower", tower, oracle, spec)
        _assert_valid(tower)
        return obj
    if kind == "solenoid_cylinder_tower":
        p, r_max, base_k, h = g("p", 2), g("r_max", 2), g("base_k", 3), g("height", 1)
        tower = _solenoid_cylinder_tower(p, r_max, base_k, h)
        oracle = {
            "level_ranks": {1: [1] * (r_max + 1), 2: [1] * (r_max + 1)},
            "boundary_level_ranks": {0: [2] * (r_max + 1), 1: [2] * (r_max + 1)},
        }
        obj = GeneratedObject("tower", tower, oracle, spec)
        _assert_valid(tower)
        return obj
    if kind == "trivial_tower":
        p, r_max = g("p", 2), g("r_max", 2)
        base_spec = GeneratorSpec.of(g("base", "point"), **{
            key: value for key, value in spec.params if key not in ("p", "r_max", "base")
        })
        base_obj = build(base_spec)
        if base_obj.category == "complex":
            base_pair = Pair(base_obj.obj, EMPTY_COMPLEX)
        else:
            base_pair = base_obj.obj
        tower = _trivial_tower(base_pair, p, r_max)
        base_ranks = base_obj.oracle["ranks"]
        oracle = {
            "base_ranks": base_ranks,
            "level_ranks": {
                n: [rank * p ** r for r in range(r_max + 1)] for n, rank in base_ranks.items()
            },
            "classification": {n: "GROWING" for n in base_ranks},
            "growth_ratio": p,
        }
        obj = GeneratedObject("tower", tower, oracle, spec)
        _assert_valid(tower)
        return obj
    if kind == "voltage_tower":
        p, r_max = g("p", 2), g("r_max", 2)
        num_vertices = g("num_vertices", 1)
        edges = tuple(tuple(e) for e in g("edges", ((0, 0, 1), (0, 0, 0))))
        tower = _voltage_tower(num_vertices, edges, p, r_max)
        width = num_vertices + 2 * len(edges)
        h0 = []
        h1 = []
        for r in range(r_max + 1):
            cx = tower.levels[r].total
            v_count = len(cx.vertices)
            e_count = len(cx.n_simplices(1))
            assert v_count == width * p ** r
            assert e_count == 3 * len(edges) * p ** r
            comps = _graph_components(cx)
            h0.append(comps)
            h1.append(comps - (v_count - e_count))
        oracle = {
            "level_ranks": {0: h0, 1: h1},
            "vertex_counts": [width * p ** r for r in range(r_max + 1)],
            "edge_counts": [3 * len(edges) * p ** r for r in range(r_max + 1)],
        }
        obj = GeneratedObject("tower", tower, oracle, spec)
        _assert_valid(tower)
        return obj
    raise ValueError(f"unknown generator kind {kind!r}")


def _assert_valid(tower: Tower) -> None:
    report = validate_tower(tower)
    if not report.ok:
        failing = ", ".join(f"{c.name}@{c.level}" for c in report.failures())
        raise AssertionError(f"generated tower fails validation: {failing}")


def suite_complexes() -> list[GeneratedObject]:
    """The standard complex/pair suite used by comparison and exactness tests."""
    return [
        build(GeneratorSpec.of("cycle", k=3)),
        build(GeneratorSpec.of("interval", k=2)),
        build(GeneratorSpec.of("disk", subdiv=3)),
        build(GeneratorSpec.of("cylinder", k=3, height=1)),
        build(GeneratorSpec.of("interval_pair", k=2)),
        build(GeneratorSpec.of("circle_pair", k=3)),
        build(GeneratorSpec.of("disk_pair", subdiv=3)),
        build(GeneratorSpec.of("cylinder_pair", k=3, height=1)),
    ]
