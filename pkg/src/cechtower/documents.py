"""The structured text format for complexes, pairs, towers and generator specs.

Documents are line-oriented with bracketed section headers; the first
non-blank line must be the versioned header ``cechtower-doc v1``.  Vertex
tokens are whitespace-free strings; an all-digit token parses as an integer,
anything else as a string, and a document mixes the two kinds at its own
peril (generated objects always use integers).  Serialization is canonical,
so serialize-parse-serialize is the identity on bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .generators import GeneratorSpec
from .simplicial import EMPTY_COMPLEX, Pair, SimplicialComplex, SimplicialMap
from .tower import Tower

HEADER = "cechtower-doc v1"

_INT_TOKEN = re.compile(r"^-?\d+$")


class DocumentParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


@dataclass
class ParsedDocument:
    kind: str  # complex | pair | tower | generate
    obj: object


def _token(value) -> str:
    return str(value)


def _parse_token(tok: str):
    return int(tok) if _INT_TOKEN.match(tok) else tok


def _parse_sections(text: str) -> list[tuple[str, list[tuple[int, str, str]]]]:
    lines = text.splitlines()
    stripped = [(i + 1, ln.strip()) for i, ln in enumerate(lines)]
    body = [(no, ln) for no, ln in stripped if ln and not ln.startswith("#")]
    if not body:
        raise DocumentParseError("empty document")
    first_no, first = body[0]
    if first != HEADER:
        raise DocumentParseError(f"missing header {HEADER!r}", first_no)
    sections: list[tuple[str, list[tuple[int, str, str]]]] = []
    current: list[tuple[int, str, str]] | None = None
    for no, ln in body[1:]:
        if ln.startswith("[") and ln.endswith("]"):
            current = []
            sections.append((ln[1:-1].strip(), current))
            continue
        if current is None:
            raise DocumentParseError("content before the first section", no)
        if ":" not in ln:
            raise DocumentParseError("expected 'key: value'", no)
        key, _, value = ln.partition(":")
        current.append((no, key.strip(), value.strip()))
    return sections


def _complex_from_entries(entries, where: str) -> tuple[SimplicialComplex, tuple]:
    vertices: list = []
    simplices = []
    for no, key, value in entries:
        if key == "vertices":
            vertices = [_parse_token(t) for t in value.split()]
        elif key == "simplex":
            toks = [_parse_token(t) for t in value.split()]
            if not toks:
                raise DocumentParseError(f"empty simplex in [{where}]", no)
            simplices.append(tuple(toks))
        else:
            raise DocumentParseError(f"unknown field {key!r} in [{where}]", no)
    simplices.extend((v,) for v in vertices)
    if not simplices:
        raise DocumentParseError(f"section [{where}] describes no simplices")
    cx = SimplicialComplex(simplices)
    return cx, tuple(vertices) if vertices else cx.vertices


def parse_document(text: str) -> ParsedDocument:
    """Parse a document into a complex, pair, tower or generator spec."""
    sections = _parse_sections(text)
    names = [name for name, _ in sections]
    by_name = dict(sections)

    if "generate" in names:
        fields = {}
        for no, key, value in by_name["generate"]:
            if key == "kind":
                fields["kind"] = value
            elif key == "edges":
                edges = []
                for chunk in value.split("|"):
                    toks = chunk.split()
                    if len(toks) != 3:
                        raise DocumentParseError("edges need 'tail head voltage' triples", no)
                    edges.append(tuple(int(t) for t in toks))
                fields["edges"] = tuple(edges)
            elif key == "base":
                fields["base"] = value
            else:
                try:
                    fields[key] = int(value)
                except ValueError as exc:
                    raise DocumentParseError(f"non-integer value for {key!r}", no) from exc
        if "kind" not in fields:
            raise DocumentParseError("[generate] needs a kind")
        kind = fields.pop("kind")
        return ParsedDocument("generate", GeneratorSpec.of(kind, **fields))

    if "tower" in names:
        return ParsedDocument("tower", _parse_tower(sections))

    if "complex" in names:
        cx, _ = _complex_from_entries(by_name["complex"], "complex")
        if "subcomplex" in names:
            sub, _ = _complex_from_entries(by_name["subcomplex"], "subcomplex")
            try:
                return ParsedDocument("pair", Pair(cx, sub))
            except ValueError as exc:
                raise DocumentParseError(str(exc)) from exc
        return ParsedDocument("complex", cx)

    raise DocumentParseError("document has no [generate], [tower] or [complex] section")


def _parse_tower(sections) -> Tower:
    deck_orders = None
    levels: dict[int, SimplicialComplex] = {}
    level_vertices: dict[int, tuple] = {}
    subs: dict[int, SimplicialComplex] = {}
    proj_maps: dict[int, dict] = {}
    deck_lines: dict[int, list[list]] = {}

    for name, entries in sections:
        if name == "tower":
            for no, key, value in entries:
                if key == "deck_orders":
                    deck_orders = [int(t) for t in value.split()]
                else:
                    raise DocumentParseError(f"unknown field {key!r} in [tower]", no)
        elif m := re.fullmatch(r"level (\d+)", name):
            r = int(m.group(1))
            levels[r], level_vertices[r] = _complex_from_entries(entries, name)
        elif m := re.fullmatch(r"level (\d+) subcomplex", name):
            subs[int(m.group(1))], _ = _complex_from_entries(entries, name)
        elif m := re.fullmatch(r"projection (\d+)", name):
            r = int(m.group(1))
            vmap = {}
            for no, key, value in entries:
                if key != "map":
                    raise DocumentParseError(f"unknown field {key!r} in [{name}]", no)
                parts = value.split("->")
                if len(parts) != 2:
                    raise DocumentParseError("expected 'map: src -> dst'", no)
                vmap[_parse_token(parts[0].strip())] = _parse_token(parts[1].strip())
            proj_maps[r] = vmap
        elif m := re.fullmatch(r"deck (\d+)", name):
            r = int(m.group(1))
            deck_lines[r] = []
            for no, key, value in entries:
                if key != "action":
                    raise DocumentParseError(f"unknown field {key!r} in [{name}]", no)
                deck_lines[r].append([_parse_token(t) for t in value.split()])
        else:
            raise DocumentParseError(f"unknown section [{name}]")

    if deck_orders is None:
        raise DocumentParseError("[tower] needs deck_orders")
    r_max = len(deck_orders) - 1
    missing = [r for r in range(r_max + 1) if r not in levels]
    if missing:
        raise DocumentParseError(f"missing [level {missing[0]}]")
    pairs = [Pair(levels[r], subs.get(r, EMPTY_COMPLEX)) for r in range(r_max + 1)]
    projections = []
    for r in range(1, r_max + 1):
        if r not in proj_maps:
            raise DocumentParseError(f"missing [projection {r}]")
        try:
            projections.append(SimplicialMap(pairs[r].total, pairs[r - 1].total, proj_maps[r]))
        except ValueError as exc:
            raise DocumentParseError(f"projection {r}: {exc}") from exc
    deck_actions = None
    if deck_lines:
        deck_actions = []
        for r in range(r_max + 1):
            rows = deck_lines.get(r)
            if rows is None:
                raise DocumentParseError(f"missing [deck {r}] (deck sections must cover all levels)")
            order = level_vertices[r]
            actions = []
            for row in rows:
                if len(row) != len(order):
                    raise DocumentParseError(
                        f"[deck {r}] action lists {len(row)} images for {len(order)} vertices")
                actions.append(dict(zip(order, row)))
            deck_actions.append(actions)
    try:
        return Tower(pairs, projections, deck_orders, deck_actions)
    except ValueError as exc:
        raise DocumentParseError(str(exc)) from exc


# ----------------------------------------------------------------------
# serialization


def _complex_lines(cx: SimplicialComplex, section: str) -> list[str]:
    lines = [f"[{section}]"]
    lines.append("vertices: " + " ".join(_token(v) for v in cx.vertices))
    maximal = _maximal_simplices(cx)
    for s in maximal:
        lines.append("simplex: " + " ".join(_token(v) for v in s))
    return lines


def _maximal_simplices(cx: SimplicialComplex) -> list[tuple]:
    maximal = []
    for s in sorted(cx.simplices, key=lambda t: (len(t), t)):
        if not any(set(s) < set(t) for t in cx.simplices if len(t) > len(s)):
            maximal.append(s)
    return sorted(maximal)


def serialize_complex(cx: SimplicialComplex) -> str:
    return "\n".join([HEADER, ""] + _complex_lines(cx, "complex")) + "\n"


def serialize_pair(pair: Pair) -> str:
    lines = [HEADER, ""] + _complex_lines(pair.total, "complex")
    lines += [""] + _complex_lines(pair.sub, "subcomplex")
    return "\n".join(lines) + "\n"


def serialize_tower(tower: Tower) -> str:
    lines = [HEADER, "", "[tower]",
             "deck_orders: " + " ".join(str(d) for d in tower.deck_orders)]
    for r, pair in enumerate(tower.levels):
        lines += [""] + _complex_lines(pair.total, f"level {r}")
        if pair.sub.simplices:
            lines += [""] + _complex_lines(pair.sub, f"level {r} subcomplex")
    for r, proj in enumerate(tower.projections, start=1):
        lines += ["", f"[projection {r}]"]
        for v in tower.levels[r].total.vertices:
            lines.append(f"map: {_token(v)} -> {_token(proj.vertex_map[v])}")
    if tower.deck_actions is not None:
        for r, actions in enumerate(tower.deck_actions):
            lines += ["", f"[deck {r}]"]
            order = tower.levels[r].total.vertices
            for g in actions:
                lines.append("action: " + " ".join(_token(g[v]) for v in order))
    return "\n".join(lines) + "\n"


def serialize_generator_spec(spec: GeneratorSpec) -> str:
    lines = [HEADER, "", "[generate]", f"kind: {spec.kind}"]
    for key, value in spec.params:
        if key == "edges":
            chunks = [" ".join(str(x) for x in e) for e in value]
            lines.append("edges: " + " | ".join(chunks))
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def serialize(obj) -> str:
    """Serialize a complex, pair, tower or generator spec."""
    if isinstance(obj, SimplicialComplex):
        return serialize_complex(obj)
    if isinstance(obj, Pair):
        return serialize_pair(obj)
    if isinstance(obj, Tower):
        return serialize_tower(obj)
    if isinstance(obj, GeneratorSpec):
        return serialize_generator_spec(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
