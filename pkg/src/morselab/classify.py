"""Decision procedures packaged as evidence-carrying reports.

Each classifier answers a yes/no question about a special subgroup or a
group element and records *why*: a failing verdict names the concrete
obstruction (an induced 4-cycle and the separated pair inside it, a join
that swallows a cyclic core), a passing verdict names what was exhausted.
Questions that only make sense under a hypothesis the input violates are
answered ``"outside_scope"`` rather than guessed at.

All graph-level conditions here are finite checks over induced 4-cycles,
so every verdict is recomputable from its own witness payload.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .errors import PreconditionError, ScopeError, ValidationError
from .graphs import (
    DefiningGraph,
    InducedCycle,
    VertexSet,
    enumerate_induced_4cycles,
    enumerate_induced_cycles,
    is_join,
    is_triangle_free,
    _first_triangle,
)
from .words import Presentation, Word, is_loxodromic, max_join_subword_length
from .words import cyclically_reduce, enumerate_products

OUTSIDE_SCOPE = "outside_scope"

Verdict = "bool | str"  # True / False / OUTSIDE_SCOPE


@dataclass
class ClassificationReport:
    """Verdicts plus the evidence they rest on.

    `verdicts` maps a property name to True, False, or "outside_scope".
    `witnesses` carries, under the same keys, either the obstruction that
    forced a False, the certificate behind a True, or an exhaustion note
    saying what finite search came up empty.  Everything in both maps is
    plain JSON data (names, not indices), so a report can be re-checked
    without the objects that produced it.
    """

    subject: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def __getitem__(self, prop: str):
        return self.verdicts[prop]


def _graph_payload(g: DefiningGraph) -> dict:
    return {
        "vertices": list(g.names),
        "edges": sorted([g.names[i], g.names[j]] for i, j in g.edges),
    }


def _cycle_payload(g: DefiningGraph, cyc: InducedCycle) -> list[str]:
    return cyc.names(g)


def _sqc_violation(
    g: DefiningGraph, four_cycles: list[InducedCycle], s1: VertexSet
) -> tuple[InducedCycle, tuple[int, int]] | None:
    """First 4-cycle with a diagonal pair inside s1 but a vertex outside it."""
    for cyc in four_cycles:
        if set(cyc.vertices) <= s1:
            continue
        for pair in cyc.diagonal_pairs():
            if pair[0] in s1 and pair[1] in s1:
                return cyc, pair
    return None


def _stability_violation(
    four_cycles: list[InducedCycle], s1: VertexSet
) -> tuple[InducedCycle, tuple[int, int]] | None:
    """First 4-cycle with a diagonal pair inside s1 (regardless of the rest)."""
    for cyc in four_cycles:
        for pair in cyc.diagonal_pairs():
            if pair[0] in s1 and pair[1] in s1:
                return cyc, pair
    return None


def classify_special_racg(g: DefiningGraph, s1: VertexSet) -> ClassificationReport:
    """Classify the special subgroup of the RACG on g generated by s1.

    Decides three properties, each a finite condition on induced 4-cycles
    of the defining graph:

    * strongly_quasiconvex — every induced 4-cycle that meets s1 in a
      non-adjacent (diagonal) pair lies entirely inside s1;
    * stable — no induced 4-cycle has a diagonal pair inside s1 (this is
      the strongly-quasiconvex condition with the escape clause removed,
      so stable implies strongly_quasiconvex);
    * finite — s1 induces a clique, i.e. the subgroup is a finite
      reflection group.

    The 4-cycle criteria characterise these properties only for
    triangle-free defining graphs; if g has a triangle, every verdict is
    "outside_scope" and the triangle is recorded under witnesses["scope"].
    """
    s1 = frozenset(s1)
    for v in s1:
        if not 0 <= v < len(g):
            raise ValidationError(f"vertex index {v} out of range for this graph")
    report = ClassificationReport(
        subject={
            "graph": _graph_payload(g),
            "kind": "racg",
            "subset": g.names_of(s1),
        }
    )
    triangle = _first_triangle(g)
    if triangle is not None:
        for prop in ("strongly_quasiconvex", "stable", "finite"):
            report.verdicts[prop] = OUTSIDE_SCOPE
        report.witnesses["scope"] = {
            "kind": "triangle",
            "vertices": g.names_of(triangle),
            "note": "4-cycle criteria apply to triangle-free graphs only",
        }
        return report

    four_cycles = enumerate_induced_4cycles(g)
    exhausted = {
        "kind": "exhaustion",
        "note": f"checked all {len(four_cycles)} induced 4-cycles",
    }

    hit = _sqc_violation(g, four_cycles, s1)
    if hit is None:
        report.verdicts["strongly_quasiconvex"] = True
        report.witnesses["strongly_quasiconvex"] = exhausted
    else:
        cyc, pair = hit
        report.verdicts["strongly_quasiconvex"] = False
        report.witnesses["strongly_quasiconvex"] = {
            "kind": "induced_4_cycle",
            "cycle": _cycle_payload(g, cyc),
            "separated_pair": g.names_of(pair),
            "note": "diagonal pair inside the subset, cycle not contained in it",
        }

    hit = _stability_violation(four_cycles, s1)
    if hit is None:
        report.verdicts["stable"] = True
        report.witnesses["stable"] = exhausted
    else:
        cyc, pair = hit
        report.verdicts["stable"] = False
        report.witnesses["stable"] = {
            "kind": "induced_4_cycle",
            "cycle": _cycle_payload(g, cyc),
            "separated_pair": g.names_of(pair),
            "note": "diagonal pair inside the subset",
        }

    non_edge = next(
        (
            (u, v)
            for u, v in itertools.combinations(sorted(s1), 2)
            if not g.adjacent(u, v)
        ),
        None,
    )
    if non_edge is None:
        report.verdicts["finite"] = True
        report.witnesses["finite"] = {
            "kind": "clique",
            "vertices": g.names_of(s1),
            "note": "subset induces a complete subgraph",
        }
    else:
        report.verdicts["finite"] = False
        report.witnesses["finite"] = {
            "kind": "non_adjacent_pair",
            "pair": g.names_of(non_edge),
        }
    return report


def morse_boundary_witness(
    g: DefiningGraph, max_len: int
) -> InducedCycle | None:
    """Search for an induced cycle of length in (4, max_len] that is stable.

    Such a cycle generates a stable special subgroup that is itself one-ended
    (a surface-like subgroup), which certifies that the Morse boundary of the
    RACG is not totally disconnected.  Cycles are tried shortest first, ties
    broken by the canonical vertex tuple, and the first one whose vertex set
    passes the stability condition is returned; None means the search space
    was exhausted up to max_len, not that no witness exists in the group.

    Raises ScopeError when g has a triangle (the cycle criteria do not apply).
    """
    if max_len < 1:
        raise ValidationError(f"max_len must be positive, got {max_len}")
    triangle = _first_triangle(g)
    if triangle is not None:
        raise ScopeError(
            f"graph has a triangle {g.names_of(triangle)}; "
            "boundary-witness search applies to triangle-free graphs only"
        )
    span = min(max_len, len(g))
    if span < 5:
        return None
    four_cycles = enumerate_induced_4cycles(g)
    candidates = sorted(
        enumerate_induced_cycles(g, 5, span),
        key=lambda c: (len(c), c.vertices),
    )
    for cyc in candidates:
        if _stability_violation(four_cycles, frozenset(cyc.vertices)) is None:
            return cyc
    return None


def _join_witness(g: DefiningGraph, s: VertexSet) -> dict | None:
    """Explain *how* s extends to a join, or None if it does not.

    Mirrors join_extendable: either some vertex star contains s (record the
    dominating vertex) or s itself splits as a join (record the two factors,
    read off the complement components).
    """
    mask = 0
    for i in s:
        mask |= 1 << i
    for v in range(len(g)):
        if g.neighbor_mask(v) and mask & ~g.star_mask(v) == 0:
            return {"kind": "dominating_vertex", "vertex": g.names[v]}
    if len(s) >= 2 and is_join(g, frozenset(s)):
        comp = nx.Graph()
        comp.add_nodes_from(s)
        for u, v in itertools.combinations(sorted(s), 2):
            if not g.adjacent(u, v):
                comp.add_edge(u, v)
        factors = [g.names_of(c) for c in nx.connected_components(comp)]
        return {"kind": "join_split", "factors": sorted(factors)}
    return None


def loxodromic_report(
    p: Presentation, words: Sequence[Word], *, max_factors: int = 4
) -> ClassificationReport:
    """Which of these elements act loxodromically on the contact graph?

    An element is loxodromic exactly when the support of its cyclic core
    does not extend to a join subgraph.  Per input word the report records
    the verdict with the core, its support, and — on failure — the join
    that absorbs it (a dominating vertex or an explicit join split).

    The report also screens all nontrivial products of at most
    `max_factors` of the words and their inverses, under the verdict key
    "purely_loxodromic_products".  A False there comes with the offending
    product; a True only says "no counterexample up to max_factors
    factors" — it is a sample diagnostic, not a proof that the generated
    subgroup is purely loxodromic.

    Preconditions (PreconditionError): RAAG presentation, connected
    defining graph, graph not itself a join, at least one nonempty word.
    """
    if p.kind != "raag":
        raise PreconditionError("loxodromic elements are an Artin-group notion here")
    g = p.graph
    if not nx.is_connected(g.as_networkx()):
        raise PreconditionError("defining graph must be connected")
    if is_join(g, frozenset(range(len(g)))):
        raise PreconditionError("defining graph must not decompose as a join")
    if not words:
        raise ValidationError("no words given")

    labels = [p.format_word(w) for w in words]  # as given, not canonicalized
    reduced = [p.reduce(w) for w in words]
    report = ClassificationReport(
        subject={"graph": _graph_payload(g), "kind": p.kind, "words": labels}
    )
    for given, w in zip(labels, reduced):
        label = f"loxodromic:{given}"
        verdict = is_loxodromic(p, w)  # PreconditionError on the empty word
        _, core = cyclically_reduce(p, w)
        witness = {
            "element": p.format_word(w),
            "core": p.format_word(core),
            "support": g.names_of(p.support(core)),
            "max_join_subword_length": max_join_subword_length(p, w),
        }
        if verdict:
            witness["kind"] = "core_escapes_joins"
            witness["note"] = "core support extends to no join subgraph"
        else:
            # kind becomes "dominating_vertex" or "join_split"
            witness.update(_join_witness(g, p.support(core)))
        report.verdicts[label] = verdict
        report.witnesses[label] = witness

    products = enumerate_products(p, reduced, max_factors)
    counterexample = None
    longest_join_subword = 0
    for word, factors in products.items():
        if not is_loxodromic(p, word):
            counterexample = (word, factors)
            break
        longest_join_subword = max(
            longest_join_subword, max_join_subword_length(p, word)
        )
    key = "purely_loxodromic_products"
    if counterexample is None:
        report.verdicts[key] = True
        report.witnesses[key] = {
            "kind": "exhaustion",
            "note": (
                f"no counterexample up to {max_factors} factors "
                f"({len(products)} distinct nontrivial products checked)"
            ),
            "max_join_subword_length": longest_join_subword,
        }
    else:
        word, factors = counterexample
        spelled = " * ".join(
            report.subject["words"][i] if i >= 0 else f"({report.subject['words'][~i]})^-1"
            for i in factors
        )
        report.verdicts[key] = False
        report.witnesses[key] = {
            "kind": "counterexample",
            "word": p.format_word(word),
            "factors": spelled,
        }
    return report
