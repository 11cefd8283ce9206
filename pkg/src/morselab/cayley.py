"""Cayley-ball indexing and the metric primitives built on it.

The ball of radius R around the identity is materialized once (BFS over
canonical words) and then queried read-only: word distance, distance to a
subgroup, boundary spheres, and the complement metric d_r used by the
divergence measurements.  Ids are dense integers assigned in BFS order with
each layer sorted, so id order is exactly shortlex order and
``dist_from_identity(id) == len(word_of(id))``.

Special (vertex-generated) subgroups get exact distances without any ball
via greedy descent to the minimal coset representative; the ball-based
multi-source BFS is kept as an independent cross-check and as the bulk
query used by boundary spheres.

Finitely generated subgroups are handled by enumerating subgroup elements
inside the ball to a fixpoint.  Distances derived that way are upper
bounds; they are only reported when a certificate shows no element outside
the enumeration could do better, otherwise `Unresolved` is raised.
"""

from __future__ import annotations

import os
import struct
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    ParseError,
    PreconditionError,
    Unresolved,
    ValidationError,
)
from .graphs import VertexSet
from .words import EPSILON, RAAG, Presentation, Word

DEFAULT_ELEMENT_BUDGET = 2_000_000

INF = float("inf")


# -- subgroup specifications ------------------------------------------------


@dataclass(frozen=True)
class Special:
    """Subgroup generated by a subset of the vertex generators."""

    vertices: VertexSet

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))


@dataclass(frozen=True)
class FinitelyGenerated:
    """Subgroup generated by arbitrary elements (canonical words)."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(bytes(g) for g in self.generators)
        if not gens:
            raise ValidationError("FinitelyGenerated requires at least one generator")
        object.__setattr__(self, "generators", gens)


SubgroupSpec = Special | FinitelyGenerated


def spec_letters(p: Presentation, s1: VertexSet) -> list[int]:
    """Letter codes generating the special subgroup on s1, in vertex order."""
    out = []
    for v in sorted(s1):
        out.append(2 * v)
        if p.kind == RAAG:
            out.append(2 * v + 1)
    return out


# -- the ball index -----------------------------------------------------------


class BallIndex:
    """Immutable index of the radius-R ball: id ↔ word, adjacency, layers.

    `neighbors` is a dense int32 matrix of shape (elements, letters):
    column j holds the id reached by right-multiplying with
    ``letters[j]``, or -1 when that takes the element outside the ball.
    """

    __slots__ = (
        "presentation",
        "radius",
        "words",
        "letters",
        "neighbors",
        "_ids",
        "_layer_sizes",
        "_subgroup_members",
        "_subgroup_dists",
    )

    def __init__(self, presentation, radius, words, letters, neighbors):
        self.presentation = presentation
        self.radius = radius
        self.words = words
        self.letters = letters
        self.neighbors = neighbors
        self._ids = {w: i for i, w in enumerate(words)}
        sizes = [0] * (radius + 1)
        for w in words:
            sizes[len(w)] += 1
        self._layer_sizes = tuple(sizes)
        self._subgroup_members: dict = {}
        self._subgroup_dists: dict = {}

    def __len__(self) -> int:
        return len(self.words)

    def __repr__(self) -> str:
        return (
            f"BallIndex({self.presentation!r}, R={self.radius}, "
            f"{len(self.words)} elements)"
        )

    def __contains__(self, word: Word) -> bool:
        return word in self._ids

    def id_of(self, word: Word) -> int:
        try:
            return self._ids[word]
        except KeyError:
            raise ValidationError(
                f"word of length {len(word)} not in ball of radius {self.radius}"
            ) from None

    def word_of(self, i: int) -> Word:
        return self.words[i]

    def dist_from_identity(self, i: int) -> int:
        return len(self.words[i])

    def adjacency(self, i: int) -> list[tuple[int, int]]:
        """(generator letter, neighbor id) pairs for in-ball neighbors."""
        row = self.neighbors[i]
        return [(self.letters[j], int(row[j])) for j in range(len(row)) if row[j] >= 0]

    def layer_sizes(self) -> tuple[int, ...]:
        """Number of elements at each distance 0..R."""
        return self._layer_sizes

    def sphere(self, k: int) -> range:
        """Ids at distance exactly k (contiguous because ids are shortlex)."""
        lo = sum(self._layer_sizes[:k])
        return range(lo, lo + self._layer_sizes[k])

    # -- subgroup geometry ------------------------------------------------

    def subgroup_members(self, spec: SubgroupSpec) -> frozenset:
        """Ids of subgroup elements inside the ball.

        Special: support test.  FinitelyGenerated: closure of the
        generators under multiplication, intersected with the ball and
        iterated to fixpoint — complete whenever membership can be reached
        without leaving the ball (true for undistorted generating sets;
        distorted subgroups may be undercounted, which only ever makes the
        derived distances larger).
        """
        cached = self._subgroup_members.get(spec)
        if cached is not None:
            return cached
        p = self.presentation
        if isinstance(spec, Special):
            s1 = spec.vertices
            members = frozenset(
                i for i, w in enumerate(self.words) if p.support(w) <= s1
            )
        else:
            moves = list(spec.generators) + [p.inverse(g) for g in spec.generators]
            seen = {EPSILON}
            frontier = [EPSILON]
            while frontier:
                nxt = []
                for h in frontier:
                    for m in moves:
                        w = p.multiply(h, m)
                        if len(w) <= self.radius and w not in seen:
                            seen.add(w)
                            nxt.append(w)
                frontier = nxt
            members = frozenset(self._ids[w] for w in seen)
        self._subgroup_members[spec] = members
        return members

    def subgroup_distances(self, spec: SubgroupSpec) -> np.ndarray:
        """Per-id distance to the subgroup, by multi-source BFS over the ball.

        For Special specs this equals the true distance d_S(g, G_{S1}) for
        every in-ball g: the nearest-point geodesic g → g_H runs through
        prefixes of decreasing length, hence never leaves the ball.  For
        FinitelyGenerated specs it is the ball-local distance (an upper
        bound on the true one).
        """
        cached = self._subgroup_dists.get(spec)
        if cached is not None:
            return cached
        dist = np.full(len(self.words), -1, dtype=np.int32)
        queue = deque()
        for i in self.subgroup_members(spec):
            dist[i] = 0
            queue.append(i)
        neighbors = self.neighbors
        while queue:
            i = queue.popleft()
            d = dist[i] + 1
            for j in neighbors[i]:
                if j >= 0 and dist[j] < 0:
                    dist[j] = d
                    queue.append(j)
        # unreachable ids (possible only for FinitelyGenerated specs whose
        # in-ball members miss a component) keep -1; callers treat that as
        # "beyond the ball"
        self._subgroup_dists[spec] = dist
        return dist


def build_ball(
    p: Presentation,
    radius: int,
    *,
    element_budget: int = DEFAULT_ELEMENT_BUDGET,
    cache_dir=None,
) -> BallIndex:
    """BFS the ball of the given radius; deterministic shortlex id order.

    Raises BudgetExceeded (carrying the last fully built layer) as soon as
    the element count would pass `element_budget`; a partial ball is never
    returned.  With `cache_dir` (or the MORSELAB_CACHE_DIR environment
    variable) set, finished balls are stored and reloaded by
    (graph digest, kind, radius).
    """
    if radius < 0:
        raise PreconditionError("radius must be non-negative")
    cache_path = _cache_path(p, radius, cache_dir)
    if cache_path is not None and cache_path.exists():
        return load_ball(p, cache_path)

    letters = tuple(p.letters())
    layers: list[list[Word]] = [[EPSILON]]
    seen = {EPSILON}
    count = 1
    for k in range(radius):
        nxt = set()
        for w in layers[k]:
            for code in letters:
                w2 = p.append_letter(w, code)
                if len(w2) > len(w) and w2 not in seen:
                    nxt.add(w2)
        count += len(nxt)
        if count > element_budget:
            raise BudgetExceeded(
                f"ball would exceed {element_budget} elements at radius {k + 1}",
                layer_reached=k,
            )
        layer = sorted(nxt)
        seen.update(layer)
        layers.append(layer)

    words = tuple(w for layer in layers for w in layer)
    ids = {w: i for i, w in enumerate(words)}
    neighbors = np.full((len(words), len(letters)), -1, dtype=np.int32)
    for i, w in enumerate(words):
        for j, code in enumerate(letters):
            w2 = p.append_letter(w, code)
            if len(w2) <= radius:
                neighbors[i, j] = ids[w2]
    ball = BallIndex(p, radius, words, letters, neighbors)
    if cache_path is not None:
        save_ball(ball, cache_path)
    return ball


# -- metric primitives --------------------------------------------------------


def word_distance(p: Presentation, g: Word, h: Word) -> int:
    """Word-metric distance |g⁻¹h|; exact, no ball required."""
    return len(p.multiply(p.inverse(g), h))


def distance(b: BallIndex, g: Word, h: Word) -> int:
    """Distance between two in-ball elements (computed as |reduce(g⁻¹h)|)."""
    return word_distance(b.presentation, g, h)


def greedy_special_distance(p: Presentation, g: Word, s1: VertexSet) -> int:
    """d_S(g, G_{S1}) by greedy descent to the minimal coset representative.

    Right-multiplying u = g⁻¹ by an S1-letter stays in the coset g⁻¹G_{S1};
    repeating whenever it shortens lands on the unique minimal-length
    representative, whose length is the subgroup distance.  Letters are
    tried in vertex order and the scan restarts after each success, so the
    descent is deterministic.  Exact for special subgroups; no ball needed.
    """
    letters = spec_letters(p, s1)
    u = p.inverse(g)
    improved = True
    while improved:
        improved = False
        for code in letters:
            u2 = p.append_letter(u, code)
            if len(u2) < len(u):
                u = u2
                improved = True
                break
    return len(u)


def subgroup_distance(b: BallIndex, spec: SubgroupSpec, g: Word) -> int:
    """Distance from g to the subgroup.

    Special: exact, via greedy descent.  FinitelyGenerated: minimum over
    the subgroup elements enumerated in the ball; returned only when the
    certificate best < R − |g| guarantees no farther subgroup element could
    be closer, otherwise Unresolved is raised.
    """
    if len(g) > b.radius:
        raise PreconditionError("element lies outside the ball")
    p = b.presentation
    if isinstance(spec, Special):
        return greedy_special_distance(p, g, spec.vertices)
    members = b.subgroup_members(spec)
    if g in b and b.id_of(g) in members:
        return 0
    best = min(word_distance(p, g, b.word_of(i)) for i in members)
    if best == 0 or best < b.radius - len(g):
        return best
    raise Unresolved(
        f"nearest enumerated subgroup element at distance {best}, but the "
        f"certificate needs < R - |g| = {b.radius - len(g)}; raise R"
    )


def boundary_sphere(
    b: BallIndex, spec: SubgroupSpec, r: int, *, margin: int = 0
) -> list[int]:
    """Ids of in-ball elements at subgroup-distance exactly r, ascending."""
    if r < 0:
        raise PreconditionError("r must be non-negative")
    if r > b.radius - margin:
        raise PreconditionError(
            f"r={r} exceeds ball radius {b.radius} minus margin {margin}"
        )
    dist = b.subgroup_distances(spec)
    return [int(i) for i in np.flatnonzero(dist == r)]


def complement_distance(
    b: BallIndex, spec: SubgroupSpec, r: int, x: int, y: int
) -> int | float:
    """Length metric d_r: shortest in-ball path keeping subgroup-distance ≥ r.

    Endpoints must themselves lie at subgroup-distance ≥ r (the complement
    of the *open* r-neighborhood keeps distance exactly r).  Returns ∞ when
    no admissible in-ball path exists.
    """
    path = complement_path(b, spec, r, x, y)
    return INF if path is None else len(path) - 1


def complement_path(
    b: BallIndex, spec: SubgroupSpec, r: int, x: int, y: int
) -> list[int] | None:
    """An actual shortest d_r-path as a list of ids, or None if disconnected."""
    dist = b.subgroup_distances(spec)
    for endpoint in (x, y):
        if dist[endpoint] < r:
            raise PreconditionError(
                f"endpoint id {endpoint} lies inside N_{r}(A) "
                f"(subgroup-distance {int(dist[endpoint])})"
            )
    if x == y:
        return [x]
    admissible = dist >= r
    parent = {x: -1}
    queue = deque([x])
    neighbors = b.neighbors
    while queue:
        i = queue.popleft()
        for j in neighbors[i]:
            j = int(j)
            if j < 0 or not admissible[j] or j in parent:
                continue
            parent[j] = i
            if j == y:
                path = [y]
                while path[-1] != x:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            queue.append(j)
    return None


def restricted_word_distance(
    p: Presentation,
    start: Word,
    goal: Word,
    *,
    min_len: int = 0,
    max_len: int,
    admissible=None,
    node_budget: int = 4_000_000,
) -> int | float:
    """Shortest-path length between two words through {g : min_len ≤ |g| ≤ max_len}.

    Lazy bidirectional BFS over canonical words — nothing is
    pre-materialized, so max_len can be far beyond any buildable ball.
    An extra per-word `admissible` predicate narrows the region further.
    Endpoint admissibility is checked; ∞ means the two sides never met
    within the region.
    """
    for w in (start, goal):
        if not (min_len <= len(w) <= max_len):
            raise PreconditionError(
                f"endpoint of length {len(w)} outside window [{min_len}, {max_len}]"
            )
        if admissible is not None and not admissible(w):
            raise PreconditionError("endpoint outside the admissible region")
    if start == goal:
        return 0
    letters = p.letters()

    def expand(frontier: list, mine: dict, other: dict, depth: int):
        """One full BFS level; returns (next frontier, best meeting value)."""
        nxt = []
        best_here = INF
        for w in frontier:
            for code in letters:
                w2 = p.append_letter(w, code)
                if not (min_len <= len(w2) <= max_len) or w2 in mine:
                    continue
                if admissible is not None and not admissible(w2):
                    continue
                mine[w2] = depth
                nxt.append(w2)
                if w2 in other:
                    best_here = min(best_here, depth + other[w2])
        return nxt, best_here

    # level-complete bidirectional BFS; a first meeting can overshoot, so
    # keep going until no path through the unexplored middle could be shorter
    fwd_all = {start: 0}
    bwd_all = {goal: 0}
    fwd: list = [start]
    bwd: list = [goal]
    df = db = 0
    best = INF
    visited = 2
    while fwd and bwd and df + db + 1 < best:
        if visited > node_budget:
            raise BudgetExceeded(
                f"restricted BFS visited more than {node_budget} words",
                layer_reached=df + db,
            )
        if len(fwd) <= len(bwd):
            df += 1
            fwd, met = expand(fwd, fwd_all, bwd_all, df)
        else:
            db += 1
            bwd, met = expand(bwd, bwd_all, fwd_all, db)
        best = min(best, met)
        visited += len(fwd) + len(bwd)
    return best


# -- binary ball cache ---------------------------------------------------------

_CACHE_MAGIC = b"MLBALL01"


def _cache_path(p: Presentation, radius: int, cache_dir) -> Path | None:
    if cache_dir is None:
        cache_dir = os.environ.get("MORSELAB_CACHE_DIR")
    if not cache_dir:
        return None
    directory = Path(cache_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / f"ball_{p.graph.digest()}_{p.kind}_r{radius}.bin"


def save_ball(ball: BallIndex, path) -> None:
    """Write header + id↔word table + adjacency matrix."""
    p = ball.presentation
    digest = p.graph.digest().encode()
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<B16sBIQ", len(digest), digest,
                             1 if p.kind == RAAG else 0, ball.radius,
                             len(ball.words)))
        fh.write(struct.pack("<B", len(ball.letters)))
        fh.write(bytes(ball.letters))
        for w in ball.words:
            fh.write(struct.pack("<B", len(w)))
            fh.write(w)
        fh.write(ball.neighbors.astype("<i4").tobytes())


def load_ball(p: Presentation, path) -> BallIndex:
    """Read a ball written by save_ball; validates it matches (graph, kind)."""
    with open(path, "rb") as fh:
        if fh.read(len(_CACHE_MAGIC)) != _CACHE_MAGIC:
            raise ParseError(f"{path}: not a ball cache file (or wrong version)")
        dlen, digest, kind_flag, radius, count = struct.unpack(
            "<B16sBIQ", fh.read(struct.calcsize("<B16sBIQ"))
        )
        if digest[:dlen].decode() != p.graph.digest():
            raise ValidationError(f"{path}: cached ball is for a different graph")
        if (kind_flag == 1) != (p.kind == RAAG):
            raise ValidationError(f"{path}: cached ball is for a different kind")
        (nletters,) = struct.unpack("<B", fh.read(1))
        letters = tuple(fh.read(nletters))
        words = []
        for _ in range(count):
            (wlen,) = struct.unpack("<B", fh.read(1))
            words.append(fh.read(wlen))
        neighbors = np.frombuffer(
            fh.read(count * nletters * 4), dtype="<i4"
        ).reshape(count, nletters).copy()
    return BallIndex(p, radius, tuple(words), letters, neighbors)


# -- free subgroups over an anticlique ----------------------------------------
#
# For a finitely generated subgroup H whose generators are supported on an
# anticlique S1 (pairwise non-adjacent vertices), distances decompose exactly:
# the parabolic P = A_{S1} is a free group, every g splits as g = p·m with
# p ∈ P and m the minimal-length representative of the coset P·g, and
# |q·m| = |q| + |m| for every q ∈ P, so
#
#     d(g, H) = d(g, P) + d_P(p, H) = |m| + d_F(p, H).
#
# The free-group part is answered on the Schreier graph of H\F, whose
# vertices are the classic (core vertex, hanging tail) pairs over the folded
# Stallings core of H.  Only the part of the Schreier graph within a given
# distance cap of the base coset is ever materialized.


class FreeSubgroupGeometry:
    """Exact subgroup distances for anticlique-supported subgroups of a RAAG."""

    def __init__(self, p: Presentation, generators: Sequence[Word]):
        if p.kind != RAAG:
            raise PreconditionError(
                "free-subgroup geometry needs a RAAG presentation"
            )
        if not generators:
            raise ValidationError("need at least one subgroup generator")
        self.presentation = p
        self.generators = tuple(bytes(g) for g in generators)
        support = frozenset()
        for g in self.generators:
            support |= p.support(g)
        if not support:
            raise ValidationError("generators must be nontrivial")
        for u in support:
            for v in support:
                if u < v and p.graph.adjacent(u, v):
                    raise PreconditionError(
                        "subgroup generators must be supported on an anticlique "
                        f"({p.graph.names[u]} and {p.graph.names[v]} are adjacent)"
                    )
        self.support = support
        self._letters = spec_letters(p, support)
        self._core = _fold_core(self.generators)
        # distance from each core vertex to the base point, over core edges
        dist = [-1] * len(self._core)
        dist[0] = 0
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in self._core[u].values():
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        self._core_dist = dist

    def parabolic_split(self, g: Word) -> tuple[Word, Word]:
        """g = p·m with p ∈ A_{S1} and m the minimal rep of the coset P·g.

        A letter can be pulled to the front exactly when every surviving
        letter before it commutes with it, so one left-to-right pass with a
        vertex bitmask finds all strippable S1-letters.  The stripped
        subword (in original order) is the P-part and is already freely
        reduced; the survivors form the minimal coset representative.
        """
        graph = self.presentation.graph
        in_s1 = 0
        for v in self.support:
            in_s1 |= 1 << v
        blocking = 0  # vertices of surviving letters seen so far
        part = bytearray()
        m = bytearray()
        for code in g:
            v = code >> 1
            bit = 1 << v
            if in_s1 & bit and blocking & ~graph.neighbor_mask(v) == 0:
                part.append(code)
            else:
                m.append(code)
                blocking |= bit
        return bytes(part), bytes(m)

    def _coset_key(self, w: Word) -> tuple[int, Word]:
        """Schreier-graph coordinates of the coset H·w for w over S1.

        The Schreier graph of H\\F is the folded core with an infinite tree
        hanging off every unused (vertex, letter) slot; a coset is pinned by
        the core vertex reached by the longest readable prefix plus the
        unread tail.
        """
        node = 0
        i = 0
        core = self._core
        while i < len(w):
            nxt = core[node].get(w[i])
            if nxt is None:
                break
            node = nxt
            i += 1
        return node, w[i:]

    def free_part_distance(self, p_word: Word) -> int:
        """d_F(p, H): graph distance from coset H·p to H in the Schreier graph.

        While the tail is nonempty every generator move pushes or pops the
        tail and leaves the core vertex alone, so the distance splits exactly
        as |tail| + (core distance to the base point).
        """
        node, tail = self._coset_key(p_word)
        return len(tail) + self._core_dist[node]

    def distance(self, g: Word) -> int:
        """Exact d(g, H) in the ambient word metric."""
        part, m = self.parabolic_split(g)
        return len(m) + self.free_part_distance(part)

    def on_boundary(self, g: Word, r: int) -> bool:
        return self.distance(g) == r


def _fold_core(generators: Sequence[Word]) -> list[dict[int, int]]:
    """Folded Stallings core of ⟨generators⟩ as transition maps.

    core[node][letter code] = node reached by reading that letter; inverse
    letters are stored explicitly (code ^ 1 gives the reverse transition).
    Node 0 is the base point.
    """
    # build the wedge of loops
    edges: list[dict[int, int]] = [dict()]

    def add_edge(u: int, code: int, v: int):
        edges[u][code] = v
        edges[v][code ^ 1] = u

    for g in generators:
        node = 0
        for i, code in enumerate(g):
            if i == len(g) - 1:
                target = 0
            else:
                edges.append(dict())
                target = len(edges) - 1
            add_edge(node, code, target)
            node = target

    # fold: merge targets of same-labeled edges until deterministic
    parent = list(range(len(edges)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    changed = True
    while changed:
        changed = False
        for u in range(len(edges)):
            if find(u) != u:
                continue
            seen: dict[int, int] = {}
            for code, v in list(edges[u].items()):
                v = find(v)
                if code in seen and seen[code] != v:
                    a, b = sorted((seen[code], v))
                    parent[b] = a
                    # merge b's transitions into a
                    for c2, w2 in edges[b].items():
                        if c2 in edges[a] and find(edges[a][c2]) != find(w2):
                            x, y = sorted((find(edges[a][c2]), find(w2)))
                            parent[y] = x
                        edges[a].setdefault(c2, w2)
                    edges[b] = {}
                    changed = True
                else:
                    seen[code] = v
    # compact: renumber live roots, base stays 0
    roots = sorted({find(u) for u in range(len(edges)) if edges[find(u)] or find(u) == 0})
    assert find(0) == 0
    renum = {r: i for i, r in enumerate(roots)}
    out: list[dict[int, int]] = [dict() for _ in roots]
    for r in roots:
        for code, v in edges[r].items():
            out[renum[r]][code] = renum[find(v)]
    return out
