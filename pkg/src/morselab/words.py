"""Group-element arithmetic for RACGs and RAAGs.

Elements are represented by canonical words: among all reduced spellings of
an element, the shortlex-least under the defining graph's vertex order.
Canonical words are `bytes`, one letter per byte: letter code 2*v for
generator v, 2*v+1 for its inverse.  RACG letters are involutions, so only
even codes appear there and exponents are normalized away at parse time.

The canonical form doubles as the element's hash key everywhere downstream
(ball indexing, region search), which is why all the arithmetic here goes
through a single primitive: `append_letter`, which multiplies a canonical
word by one letter and re-canonicalizes in O(length).

Correctness of the normal form is oracle-tested (BFS distances, exhaustive
small balls) rather than argued here; see the test suite.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import networkx as nx

from .errors import ParseError, PreconditionError, ValidationError
from .graphs import DefiningGraph, VertexSet, is_join, join_extendable

Word = bytes  # letter codes; canonical unless stated otherwise
EPSILON: Word = b""

RACG = "racg"
RAAG = "raag"


class Presentation:
    """A defining graph together with a group kind ('racg' or 'raag').

    Immutable; all word operations hang off this object because they need
    the commutation relation and (for RACGs) the involution rule.
    """

    __slots__ = ("graph", "kind", "_commute", "_nvertices")

    def __init__(self, graph: DefiningGraph, kind: str):
        if kind not in (RACG, RAAG):
            raise ValidationError(f"kind must be 'racg' or 'raag', got {kind!r}")
        self.graph = graph
        self.kind = kind
        self._nvertices = len(graph)
        # commute[v] = bitmask of vertices commuting with v (neighbors only;
        # a vertex does not "commute" with itself for word-shuffling purposes)
        self._commute = tuple(graph.neighbor_mask(v) for v in range(len(graph)))

    def __repr__(self) -> str:
        return f"Presentation({self.graph!r}, {self.kind!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Presentation)
            and self.kind == other.kind
            and self.graph == other.graph
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.graph))

    # -- letters ----------------------------------------------------------

    def letters(self) -> list[int]:
        """All letter codes, in canonical (shortlex) order."""
        if self.kind == RACG:
            return [2 * v for v in range(self._nvertices)]
        return list(range(2 * self._nvertices))

    def letter(self, name: str, exponent: int = 1) -> int:
        v = self.graph.index(name)
        if exponent == 1:
            return 2 * v
        if exponent == -1:
            return 2 * v if self.kind == RACG else 2 * v + 1
        raise ValidationError(f"exponent must be +1 or -1, got {exponent}")

    def inverse_letter(self, code: int) -> int:
        return code if self.kind == RACG else code ^ 1

    @staticmethod
    def vertex_of(code: int) -> int:
        return code >> 1

    # -- parsing / formatting ----------------------------------------------

    def parse_word(self, text: str) -> Word:
        """Parse whitespace-separated tokens like "a1 b2^-1" to a raw word.

        The result is *not* reduced; feed it to `reduce`.  The "^-1" suffix
        is only meaningful for RAAGs; for RACGs it is accepted and dropped
        (generators are involutions).
        """
        letters = []
        for token in text.split():
            if "^" in token:
                name, _, exp = token.partition("^")
                if exp not in ("-1", "1", "+1"):
                    raise ParseError(f"bad exponent in token {token!r}")
                e = -1 if exp == "-1" else 1
            else:
                name, e = token, 1
            try:
                letters.append(self.letter(name, e))
            except ValidationError as err:
                raise ParseError(str(err)) from None
        return bytes(letters)

    def format_word(self, w: Word) -> str:
        if not w:
            return "ε"
        parts = []
        for code in w:
            name = self.graph.names[code >> 1]
            parts.append(name + "^-1" if code & 1 else name)
        return " ".join(parts)

    # -- the core primitive --------------------------------------------------

    def append_letter(self, w: Word, code: int) -> Word:
        """Canonical form of w * letter, assuming w is canonical.

        Two phases.  Cancellation: scan right-to-left past letters that
        commute with the new one; if we hit a letter on the same vertex
        first, it either cancels (RACG always; RAAG on opposite exponent)
        or blocks.  Insertion: if nothing cancelled, the new letter goes at
        the first position after its last non-commuting (or same-vertex)
        predecessor where the following old letter is larger.  That is where
        a greedy smallest-available-letter linearization would emit it, so
        the result stays shortlex-least; note this can jump left over
        commuting letters *smaller* than the new one, so a simple
        bubble-past-larger scan from the right is not enough.
        """
        v = code >> 1
        commute = self._commute[v]
        racg = self.kind == RACG
        n = len(w)
        i = n - 1
        while i >= 0:
            c = w[i]
            cv = c >> 1
            if cv == v:
                if racg or c == code ^ 1:
                    return w[:i] + w[i + 1 :]
                break  # same vertex, same sign: blocks, no cancellation
            if not (commute >> cv & 1):
                break
            i -= 1
        # no cancellation: find the shortlex insertion point
        j = 0
        for k in range(n):
            cv = w[k] >> 1
            if cv == v or not (commute >> cv & 1):
                j = k + 1
        while j < n and w[j] < code:
            j += 1
        return w[:j] + bytes([code]) + w[j:]

    # -- derived operations ---------------------------------------------------

    def reduce(self, w: Iterable[int]) -> Word:
        """Canonical form of an arbitrary letter sequence."""
        out = EPSILON
        for code in w:
            if not 0 <= code < 2 * self._nvertices or (self.kind == RACG and code & 1):
                raise ValidationError(f"letter code {code} invalid for this presentation")
            out = self.append_letter(out, code)
        return out

    def multiply(self, u: Word, v: Word) -> Word:
        out = u
        for code in v:
            out = self.append_letter(out, code)
        return out

    def inverse(self, u: Word) -> Word:
        if self.kind == RACG:
            return self.reduce(u[::-1])
        return self.reduce(bytes(c ^ 1 for c in reversed(u)))

    def conjugate(self, g: Word, u: Word) -> Word:
        """g * u * g^-1."""
        return self.multiply(self.multiply(g, u), self.inverse(g))

    def support(self, u: Word) -> VertexSet:
        return frozenset(c >> 1 for c in u)


# -- module-level operations (the public vocabulary) -------------------------


def reduce(p: Presentation, w: Iterable[int]) -> Word:
    return p.reduce(w)


def multiply(p: Presentation, u: Word, v: Word) -> Word:
    return p.multiply(u, v)


def inverse(p: Presentation, u: Word) -> Word:
    return p.inverse(u)


def support(p: Presentation, u: Word) -> VertexSet:
    return p.support(u)


def special_subgroup_member(p: Presentation, u: Word, s1: VertexSet) -> bool:
    """Membership in the special subgroup on s1 is a support condition."""
    return p.support(u) <= s1


def cyclically_reduce(p: Presentation, u: Word) -> tuple[Word, Word]:
    """Split u = conjugator * core * conjugator^-1 with core cyclically reduced.

    A word is cyclically reduced when no single-letter conjugation shortens
    it.  We repeatedly peel any letter x that can reach the front (everything
    before it commutes with it): x^-1 (x rest) x = rest x, which is shorter
    exactly when x cancels at the far end.
    """
    conj = EPSILON
    core = u
    while True:
        for idx in range(len(core)):
            code = core[idx]
            v = code >> 1
            if any(not (p._commute[v] >> (c >> 1) & 1) for c in core[:idx]):
                continue  # cannot reach the front
            candidate = p.append_letter(core[:idx] + core[idx + 1 :], code)
            if len(candidate) == len(core) - 2:
                conj = p.append_letter(conj, code)
                core = candidate
                break
        else:
            return conj, core


def is_loxodromic(p: Presentation, u: Word) -> bool:
    """Is u loxodromic, i.e. not conjugate into any join subgroup?

    Only meaningful when the defining graph is connected and not itself a
    join.  The support s of the cyclic core lies in a join subgraph iff the
    complement of the induced subgraph on s is disconnected or s sits inside
    some vertex star; u is loxodromic iff neither holds.
    """
    if p.kind != RAAG:
        raise PreconditionError("loxodromic elements are an Artin-group notion here")
    g = p.graph
    all_vertices = frozenset(range(len(g)))
    if not nx.is_connected(g.as_networkx()):
        raise PreconditionError("defining graph must be connected")
    if is_join(g, all_vertices):
        raise PreconditionError("defining graph must not decompose as a join")
    if not u:
        raise PreconditionError("identity element is not classified")
    _, core = cyclically_reduce(p, u)
    return not join_extendable(g, p.support(core))


def max_join_subword_length(p: Presentation, u: Word) -> int:
    """Longest contiguous subword of u whose support extends to a join.

    0 for the empty word; a single letter counts (length 1) whenever its
    vertex has a neighbor, since an edge is a join of two points.
    """
    if p.kind != RAAG:
        raise PreconditionError("join subwords are an Artin-group notion here")
    n = len(u)
    best = 0
    for i in range(n):
        seen: set[int] = set()
        for j in range(i, n):
            seen.add(u[j] >> 1)
            length = j - i + 1
            if length > best and join_extendable(p.graph, frozenset(seen)):
                best = length
    return best


def geodesic_power_check(p: Presentation, period: Word, horizon: int = 8) -> bool:
    """Do powers of `period` stay geodesic (|period^k| = k*|period|) up to horizon?"""
    w = EPSILON
    for k in range(1, horizon + 1):
        w = p.multiply(w, period)
        if len(w) != k * len(period):
            return False
    return True


def enumerate_products(
    p: Presentation, gens: Sequence[Word], max_factors: int
) -> dict[Word, tuple[int, ...]]:
    """All distinct nontrivial products of <= max_factors generators/inverses.

    Returns canonical word -> one witnessing factor sequence (indices into
    gens for the generator, ~index for its inverse).  The identity, if it
    arises, is skipped.
    """
    alphabet = [(i, g) for i, g in enumerate(gens)] + [
        (~i, p.inverse(g)) for i, g in enumerate(gens)
    ]
    out: dict[Word, tuple[int, ...]] = {}
    frontier: list[tuple[Word, tuple[int, ...]]] = [(EPSILON, ())]
    for _ in range(max_factors):
        nxt = []
        for word, seq in frontier:
            for tag, g in alphabet:
                w = p.multiply(word, g)
                s = seq + (tag,)
                nxt.append((w, s))
                if w and w not in out:
                    out[w] = s
        frontier = nxt
    return out
