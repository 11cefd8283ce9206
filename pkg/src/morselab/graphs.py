"""Defining graphs and their induced-subgraph combinatorics.

A defining graph is a finite simplicial graph (no loops, no multi-edges).
Its vertices name the generators of a right-angled Coxeter group (RACG) or
right-angled Artin group (RAAG); edges record which generators commute.
Everything downstream — word reduction order, classifier verdicts,
divergence experiments — keys off the structures computed here:
induced 4-cycles, longer induced cycles, joins, stars.

Vertex order is fixed at construction time and is load-bearing: it is the
letter order used for canonical (shortlex-least) word forms.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx

from .errors import ParseError, PreconditionError, ValidationError

VertexSet = frozenset  # of vertex indices


class DefiningGraph:
    """Immutable simplicial graph with named, ordered vertices.

    >>> g = graph_from_parts(["a", "b", "c"], [("a", "b"), ("b", "c")])
    >>> g.adjacent(g.index("a"), g.index("b"))
    True
    >>> sorted(g.neighbor_names("b"))
    ['a', 'c']
    """

    __slots__ = ("names", "edges", "_index", "_nbr_mask", "_hash")

    def __init__(self, names: Sequence[str], edges: Iterable[tuple[str, str]]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValidationError("duplicate vertex names")
        self.names = names
        self._index = {v: i for i, v in enumerate(names)}
        nbr = [0] * len(names)
        edge_set = set()
        for u, v in edges:
            if u not in self._index or v not in self._index:
                raise ValidationError(f"edge endpoint not a vertex: {(u, v)}")
            if u == v:
                raise ValidationError(f"self-loop at {u!r} (graph must be simplicial)")
            i, j = self._index[u], self._index[v]
            key = (min(i, j), max(i, j))
            if key in edge_set:
                raise ValidationError(f"duplicate edge {(u, v)}")
            nbr[i] |= 1 << j
            nbr[j] |= 1 << i
            edge_set.add(key)
        self.edges = frozenset(edge_set)
        self._nbr_mask = tuple(nbr)
        self._hash = hash((self.names, self.edges))

    # -- basic accessors ------------------------------------------------

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DefiningGraph)
            and self.names == other.names
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DefiningGraph({len(self.names)} vertices, {len(self.edges)} edges)"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown vertex {name!r}") from None

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self._nbr_mask[i] >> j & 1)

    def neighbor_mask(self, i: int) -> int:
        return self._nbr_mask[i]

    def star_mask(self, i: int) -> int:
        """Neighbors of i plus i itself, as a bitmask."""
        return self._nbr_mask[i] | (1 << i)

    def neighbor_names(self, name: str) -> list[str]:
        i = self.index(name)
        return [self.names[j] for j in range(len(self.names)) if self.adjacent(i, j)]

    def vertex_set(self, names: Iterable[str]) -> VertexSet:
        """Parse a collection of vertex names into an index set."""
        return frozenset(self.index(n) for n in names)

    def names_of(self, s: Iterable[int]) -> list[str]:
        return [self.names[i] for i in sorted(s)]

    def as_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.names)))
        g.add_edges_from(self.edges)
        return g

    def digest(self) -> str:
        """Stable content hash (names + edges), used to key disk caches."""
        payload = json.dumps(
            {"vertices": list(self.names), "edges": sorted(map(list, self.edges))},
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def graph_from_parts(
    vertices: Sequence[str], edges: Iterable[tuple[str, str]]
) -> DefiningGraph:
    return DefiningGraph(vertices, edges)


def load_graph(path) -> DefiningGraph:
    """Load a defining graph from a JSON file.

    Expected document shape: {"vertices": [...], "edges": [[u, v], ...]}.
    """
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read graph file {path}: {e}") from None
    return graph_from_json(text)


def graph_from_json(text: str) -> DefiningGraph:
    """Parse a graph from a JSON document string (see `load_graph`)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e}") from None
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise ParseError("document must be an object with 'vertices' and 'edges'")
    vertices = doc["vertices"]
    edges = doc["edges"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise ParseError("'vertices' must be a list of strings")
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 for e in edges
    ):
        raise ParseError("'edges' must be a list of 2-element lists")
    return DefiningGraph(vertices, [tuple(e) for e in edges])


# -- induced-subgraph predicates ----------------------------------------


def is_triangle_free(g: DefiningGraph) -> bool:
    """True iff no three vertices are pairwise adjacent."""
    return _first_triangle(g) is None


def _first_triangle(g: DefiningGraph) -> tuple[int, int, int] | None:
    n = len(g)
    for i in range(n):
        mi = g.neighbor_mask(i)
        for j in range(i + 1, n):
            if not (mi >> j & 1):
                continue
            common = mi & g.neighbor_mask(j)
            common >>= j + 1
            if common:
                k = j + 1 + (common & -common).bit_length() - 1
                return (i, j, k)
    return None


def is_join(g: DefiningGraph, s: VertexSet) -> bool:
    """True iff the induced subgraph on s splits as a nontrivial join.

    Equivalent test: the complement of the induced subgraph is disconnected
    (the connected components of the complement are the join factors).
    """
    if not s:
        raise PreconditionError("is_join requires a nonempty vertex set")
    verts = sorted(s)
    if len(verts) == 1:
        return False
    comp = nx.Graph()
    comp.add_nodes_from(verts)
    for u, v in itertools.combinations(verts, 2):
        if not g.adjacent(u, v):
            comp.add_edge(u, v)
    return not nx.is_connected(comp)


def join_extendable(g: DefiningGraph, s: VertexSet) -> bool:
    """Does s sit inside *some* join subgraph of g?

    Holds iff the induced complement on s is disconnected (s itself meets
    both factors of a join) or s ⊆ st(v) for some non-isolated v (st(v) is
    the join {v} * lk(v)).  A single vertex is extendable exactly when it
    has a neighbor; an isolated vertex lies in no join.
    """
    if not s:
        return False
    mask = 0
    for i in s:
        mask |= 1 << i
    for v in range(len(g)):
        if g.neighbor_mask(v) and mask & ~g.star_mask(v) == 0:
            return True
    return len(s) >= 2 and is_join(g, frozenset(s))


# -- induced cycles ------------------------------------------------------


@dataclass(frozen=True)
class InducedCycle:
    """An induced cycle, stored in canonical rotation/reflection order.

    `vertices` is the cyclic vertex-index sequence; consecutive entries
    (cyclically) are adjacent and all other pairs are non-adjacent.
    """

    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def names(self, g: DefiningGraph) -> list[str]:
        return [g.names[i] for i in self.vertices]

    def diagonal_pairs(self) -> list[tuple[int, int]]:
        """Non-adjacent vertex pairs of the cycle (all non-consecutive pairs)."""
        k = len(self.vertices)
        out = []
        for a in range(k):
            for b in range(a + 2, k):
                if a == 0 and b == k - 1:
                    continue
                out.append((self.vertices[a], self.vertices[b]))
        return out

    def check(self, g: DefiningGraph) -> None:
        """Raise ValidationError unless this really is an induced cycle of g."""
        vs = self.vertices
        k = len(vs)
        if k < 3 or len(set(vs)) != k:
            raise ValidationError(f"not a simple cycle: {vs}")
        for a in range(k):
            for b in range(a + 1, k):
                consecutive = (b - a == 1) or (a == 0 and b == k - 1)
                if consecutive != g.adjacent(vs[a], vs[b]):
                    raise ValidationError(
                        f"cycle {vs} fails induced condition at ({vs[a]},{vs[b]})"
                    )


def canonical_cycle(vertices: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least rotation over both orientations."""
    seq = tuple(vertices)
    k = len(seq)
    best = None
    for orient in (seq, seq[::-1]):
        for shift in range(k):
            cand = orient[shift:] + orient[:shift]
            if best is None or cand < best:
                best = cand
    return best


def enumerate_induced_cycles(
    g: DefiningGraph, min_len: int, max_len: int
) -> list[InducedCycle]:
    """All induced cycles with length in [min_len, max_len], deduplicated.

    DFS over simple paths anchored at their smallest vertex; a path may only
    be extended by a vertex adjacent to its tip and to nothing else on the
    path (except, when closing up, the anchor).
    """
    if not (4 <= min_len <= max_len <= len(g)):
        raise PreconditionError(
            f"need 4 <= min_len <= max_len <= |V|, got [{min_len},{max_len}]"
        )
    n = len(g)
    found: set[tuple[int, ...]] = set()

    def extend(path: list[int], path_mask: int, banned: int) -> None:
        tip = path[-1]
        anchor = path[0]
        if len(path) >= 3 and g.adjacent(tip, anchor):
            # `banned` excludes neighbors of interior vertices, so adjacency
            # of tip and anchor alone closes an induced cycle.  Extending
            # past this point would leave tip-anchor as a chord, so stop
            # either way.
            if len(path) >= min_len:
                found.add(canonical_cycle(path))
            return
        if len(path) == max_len:
            return
        for u in range(anchor + 1, n):
            if path_mask >> u & 1 or banned >> u & 1:
                continue
            if not g.adjacent(tip, u):
                continue
            if g.adjacent(u, anchor) and len(path) + 1 < min_len:
                # would close below min_len; u may still appear on other
                # branches, just not on this path
                continue
            # once u is appended, the old tip becomes interior: ban its
            # remaining neighbors from later positions
            extend(path + [u], path_mask | 1 << u, banned | g.neighbor_mask(tip))

    for a in range(n):
        for b in range(a + 1, n):
            if g.adjacent(a, b):
                extend([a, b], (1 << a) | (1 << b), 0)
    cycles = [InducedCycle(v) for v in sorted(found)]
    for c in cycles:
        c.check(g)
    return cycles


def enumerate_induced_4cycles(g: DefiningGraph) -> list[InducedCycle]:
    """All induced 4-cycles, each once up to rotation/reflection."""
    if len(g) < 4:
        return []
    return enumerate_induced_cycles(g, 4, 4)


# -- constructors ---------------------------------------------------------


def cone_off(g: DefiningGraph, u: str, v: str, t: str) -> DefiningGraph:
    """Add a new vertex t adjacent to exactly the non-adjacent pair u, v."""
    iu, iv = g.index(u), g.index(v)
    if g.adjacent(iu, iv):
        raise PreconditionError(f"cone_off requires {u!r},{v!r} non-adjacent")
    if t in g.names:
        raise PreconditionError(f"vertex name {t!r} already in use")
    edges = [(g.names[i], g.names[j]) for i, j in g.edges]
    edges += [(u, t), (v, t)]
    return DefiningGraph(g.names + (t,), edges)


def build_c4() -> DefiningGraph:
    """The 4-cycle a1-b1-a2-b2: the smallest graph with two non-adjacent pairs."""
    return DefiningGraph(
        ["a1", "b1", "a2", "b2"],
        [("a1", "b1"), ("b1", "a2"), ("a2", "b2"), ("b2", "a1")],
    )


def build_p4() -> DefiningGraph:
    """The path a-b-c-d."""
    return DefiningGraph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])


def build_cycle(n: int) -> DefiningGraph:
    if n < 3:
        raise ValidationError("cycle needs at least 3 vertices")
    names = [f"v{i}" for i in range(n)]
    edges = [(names[i], names[(i + 1) % n]) for i in range(n)]
    return DefiningGraph(names, edges)


def build_gamma_d(d: int) -> DefiningGraph:
    """The d-parameter family with polynomial divergence of degree d.

    Vertices a0..ad, b0..bd.  a0 and b0 are each adjacent to every ai
    (1 <= i <= d); additionally a0-b1 and b0-b1; the bi form a path
    b1-b2-...-bd; and ai-b(i+1) for 1 <= i <= d-1.  Total 4d edges.
    """
    if d < 2:
        raise PreconditionError("family is defined for d >= 2")
    names = [f"a{i}" for i in range(d + 1)] + [f"b{i}" for i in range(d + 1)]
    edges: list[tuple[str, str]] = []
    for i in range(1, d + 1):
        edges.append(("a0", f"a{i}"))
        edges.append(("b0", f"a{i}"))
    edges.append(("a0", "b1"))
    edges.append(("b0", "b1"))
    for i in range(1, d):
        edges.append((f"b{i}", f"b{i+1}"))
        edges.append((f"a{i}", f"b{i+1}"))
    return DefiningGraph(names, edges)


def build_omega_d(d: int) -> DefiningGraph:
    """build_gamma_d(d) with the non-adjacent pair (a_d, b_d) coned off by t."""
    return cone_off(build_gamma_d(d), f"a{d}", f"b{d}", "t")


def family(name: str) -> DefiningGraph:
    """Resolve a built-in family name: c4, p4, c5/cycle:<n>, gamma_d:<d>, omega_d:<d>."""
    name = name.strip().lower()
    if name == "c4":
        return build_c4()
    if name == "p4":
        return build_p4()
    if name.startswith("cycle:"):
        return build_cycle(int(name.split(":", 1)[1]))
    if name == "c5":
        return build_cycle(5)
    if name.startswith("gamma_d:"):
        return build_gamma_d(int(name.split(":", 1)[1]))
    if name.startswith("omega_d:"):
        return build_omega_d(int(name.split(":", 1)[1]))
    raise ValidationError(
        f"unknown family {name!r}; known: c4, p4, c5, cycle:<n>, gamma_d:<d>, omega_d:<d>"
    )
