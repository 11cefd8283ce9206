"""Empirical divergence measurements on Cayley graphs.

Everything here is window-honest: distances are measured inside an explicit
finite region (a ball of radius ``r_max``, or a lazily explored tube around a
subgroup), and restricting the region can only *overstate* a divergence
value, never understate it.  Rows carry the flags needed to read them that
way: ``ball_local`` marks the window, ``capped`` marks incomplete pair
enumeration.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cayley import (
    INF,
    BallIndex,
    FinitelyGenerated,
    FreeSubgroupGeometry,
    Special,
    SubgroupSpec,
    build_ball,
    greedy_special_distance,
    restricted_word_distance,
)
from .errors import (
    InsufficientData,
    ParseError,
    PreconditionError,
    ValidationError,
)
from .graphs import DefiningGraph, InducedCycle
from .words import RAAG, RACG, Presentation, Word

__all__ = [
    "SigmaRow",
    "DivergenceProfile",
    "sigma_profile",
    "WitnessPath",
    "pip1_witness_path",
    "geodesic_divergence",
    "geodesic_lower_divergence",
    "pip1_upper",
    "pip2_lower",
    "kmt_lower",
    "GrowthDiagnostic",
    "growth_diagnostic",
    "emit_profile_csv",
    "parse_profile_csv",
]


# -- profiles -----------------------------------------------------------------


@dataclass(frozen=True)
class SigmaRow:
    """One measured radius of a lower relative divergence profile.

    ``value`` is the minimum region-restricted detour distance found over
    the examined pairs (∞ when no examined pair had a finite detour), and
    ``witness`` holds the realizing pair as formatted words.
    """

    r: int
    value: int | float
    pairs_examined: int
    capped: bool
    witness: tuple[str, str] | None
    ball_local: bool = True


@dataclass
class DivergenceProfile:
    """σ-profile of a subgroup: rows indexed by radius, plus the parameters.

    Two profiles compare equal when their parameters and rows agree; the
    measurement-window metadata (``r_max``, ``method``,
    ``subgroup_unbounded``) is informational and excluded from equality so
    that CSV round-trips are exact.
    """

    n: int
    rho: Fraction
    rows: list[SigmaRow]
    r_max: int | None = field(default=None, compare=False)
    method: str = field(default="", compare=False)
    subgroup_unbounded: bool | None = field(default=None, compare=False)

    def row(self, r: int) -> SigmaRow:
        for row in self.rows:
            if row.r == r:
                return row
        raise KeyError(r)

    def values(self) -> dict[int, int | float]:
        return {row.r: row.value for row in self.rows}


def _as_rho(rho) -> Fraction:
    if isinstance(rho, float):
        rho = Fraction(str(rho))
    rho = Fraction(rho)
    if not 0 < rho <= 1:
        raise ValidationError(f"rho must lie in (0, 1], got {rho}")
    return rho


def sigma_profile(
    p: Presentation,
    subgroup: SubgroupSpec,
    n: int,
    rho,
    r_list: Sequence[int],
    r_max: int,
    *,
    pair_cap: int = 100_000,
    element_budget: int = 2_000_000,
    tube_slack: int = 1,
    node_budget: int = 6_000_000,
    cache_dir=None,
) -> DivergenceProfile:
    """Measure σ^n_ρ(r) for the subgroup over each r in ``r_list``.

    For every radius the scan enumerates pairs x, y on the r-boundary of the
    subgroup with d_S(x, y) ≥ n·r — in id order, at most ``pair_cap`` of
    them — and minimizes the distance between them through the complement of
    the open ⌈ρ·r⌉-neighborhood.  A row of ∞ means no examined pair had a
    finite detour inside the window.

    Special subgroups are scanned over an explicit ball of radius ``r_max``.
    Finitely generated subgroups over an anticlique are scanned lazily in a
    tube of thickness ``tube_slack`` around the subgroup (no ball is built,
    so ``r_max`` may be far beyond any enumerable ball); their pair
    enumeration is a deterministic seed family, so those rows are always
    flagged ``capped``.
    """
    if n < 2:
        raise ValidationError(f"n must be at least 2, got {n}")
    rho = _as_rho(rho)
    r_list = sorted(set(int(r) for r in r_list))
    if not r_list or r_list[0] < 1:
        raise ValidationError("radii must be positive integers")
    for r in r_list:
        if math.ceil(n * r / 2) + r + 2 > r_max:
            raise PreconditionError(
                f"r_max={r_max} too small to separate pairs at r={r} with "
                f"n={n}: need at least {math.ceil(n * r / 2) + r + 2}"
            )
    if isinstance(subgroup, FinitelyGenerated) and _anticlique_free(p, subgroup):
        return _sigma_regional(
            p, subgroup, n, rho, r_list, r_max,
            tube_slack=tube_slack, node_budget=node_budget,
        )
    return _sigma_ball(
        p, subgroup, n, rho, r_list, r_max,
        pair_cap=pair_cap, element_budget=element_budget, cache_dir=cache_dir,
    )


def _anticlique_free(p: Presentation, subgroup: FinitelyGenerated) -> bool:
    if p.kind != RAAG:
        return False
    support = frozenset()
    for g in subgroup.generators:
        support |= p.support(g)
    return all(
        not p.graph.adjacent(u, v) for u in support for v in support if u < v
    )


def _admissible_bfs(neighbors, admissible, source: int, depth_cap) -> np.ndarray:
    """Distances from source through admissible vertices, level by level.

    Entries are -1 where the vertex was not reached (inadmissible, cut off,
    or beyond ``depth_cap``).
    """
    dist = np.full(neighbors.shape[0], -1, np.int32)
    if not admissible[source]:
        return dist
    dist[source] = 0
    frontier = np.array([source], np.int64)
    d = 0
    while frontier.size and d < depth_cap:
        nxt = neighbors[frontier].ravel()
        nxt = nxt[nxt >= 0]
        nxt = nxt[admissible[nxt] & (dist[nxt] < 0)]
        if nxt.size == 0:
            break
        nxt = np.unique(nxt)
        d += 1
        dist[nxt] = d
        frontier = nxt
    return dist


def _sigma_ball(p, subgroup, n, rho, r_list, r_max, *, pair_cap,
                element_budget, cache_dir) -> DivergenceProfile:
    ball = build_ball(p, r_max, element_budget=element_budget,
                      cache_dir=cache_dir)
    dist = ball.subgroup_distances(subgroup)
    member_lengths = [len(ball.word_of(i)) for i in ball.subgroup_members(subgroup)]
    unbounded = bool(member_lengths) and max(member_lengths) >= r_max - 1

    # a finite subgroup bounds how far apart boundary points can be:
    # d_S(x, y) ≤ r + diam + r, which can rule out every pair up front
    member_diam = None
    members = ball.subgroup_members(subgroup)
    if len(members) <= 200:
        member_words = [ball.word_of(i) for i in members]
        member_diam = max(
            (len(p.multiply(p.inverse(a), b))
             for a in member_words for b in member_words),
            default=0,
        )

    rows = []
    for r in r_list:
        rr = math.ceil(rho * r)
        target = math.ceil(n * r)
        if member_diam is not None and 2 * r + member_diam < target:
            rows.append(SigmaRow(r=r, value=INF, pairs_examined=0,
                                 capped=False, witness=None))
            continue
        admissible = dist >= rr
        boundary = [int(i) for i in np.flatnonzero(dist == r)]
        words = [ball.word_of(i) for i in boundary]
        inverses = [p.inverse(w) for w in words]
        best: int | float = INF
        witness = None
        pairs = 0
        capped = False
        for i, x in enumerate(boundary):
            if pairs >= pair_cap:
                capped = True
                break
            if best <= 1:
                break  # no strictly shorter detour is possible
            cap = best - 1 if best is not INF else math.inf
            dx = _admissible_bfs(ball.neighbors, admissible, x, cap)
            for j in range(i + 1, len(boundary)):
                if pairs >= pair_cap:
                    capped = True
                    break
                if len(p.multiply(inverses[i], words[j])) < target:
                    continue
                pairs += 1
                dy = int(dx[boundary[j]])
                if 0 <= dy < best:
                    best = dy
                    witness = (p.format_word(words[i]), p.format_word(words[j]))
        rows.append(SigmaRow(r=r, value=best, pairs_examined=pairs,
                             capped=capped, witness=witness))
    return DivergenceProfile(n=n, rho=rho, rows=rows, r_max=r_max,
                             method="ball", subgroup_unbounded=unbounded)


def _alternating(p: Presentation, gens: Sequence[Word], k: int,
                 start: int) -> Word:
    out = b""
    m = len(gens)
    for i in range(k):
        out = p.multiply(out, gens[(start + i) % m])
    return out


def _common_prefix_len(a: Word, b: Word) -> int:
    i = 0
    stop = min(len(a), len(b))
    while i < stop and a[i] == b[i]:
        i += 1
    return i


def _sigma_regional(p, subgroup, n, rho, r_list, r_max, *, tube_slack,
                    node_budget, corridor_slack: int = 3) -> DivergenceProfile:
    """σ rows for an anticlique-supported subgroup, without building a ball.

    The scan works in a corridor around an alternating-generator spine
    segment: a path vertex w = part·offset is admissible when its subgroup
    distance lies in [⌈ρr⌉, r + tube_slack], its offset is spelled entirely
    in non-support letters, and its free part deviates from a prefix of
    either spine endpoint by at most ``corridor_slack`` letters.  Each
    restriction shrinks the region, so reported values can only overstate
    the true σ — flagged by ``capped`` and ``ball_local``.

    Seed pairs are canonical lifts v^r translated symmetrically along the
    spine, at the two smallest syllable counts separating them by n·r.
    """
    geom = FreeSubgroupGeometry(p, subgroup.generators)
    outside = [v for v in range(len(p.graph)) if v not in geom.support]
    if not outside:
        raise PreconditionError(
            "no vertex outside the subgroup support to lift boundary "
            "points from"
        )
    lift_vertex = outside[0]
    gens = list(geom.generators)
    support = geom.support

    rows = []
    for r in r_list:
        rr = math.ceil(rho * r)
        target = math.ceil(n * r)
        lift = p.reduce(bytes([2 * lift_vertex] * r))
        if geom.distance(lift) != r:
            raise PreconditionError(
                f"canonical lift {p.format_word(lift)} is not at subgroup "
                f"distance {r}"
            )

        def seed_pair(k: int):
            left = _alternating(p, gens, k, start=len(gens) - 1)
            right = _alternating(p, gens, k, start=0)
            x = p.multiply(p.inverse(left), lift)
            y = p.multiply(right, lift)
            if max(len(x), len(y)) > r_max:
                return None
            return x, y, len(p.multiply(p.inverse(x), y)), p.inverse(left), right

        k0 = None
        for k in range(1, 4 * r_max):
            got = seed_pair(k)
            if got is None:
                break
            if got[2] >= target:
                k0 = k
                break

        best: int | float = INF
        witness = None
        pairs = 0
        if k0 is not None:
            for kk in (k0, k0 + 1):
                got = seed_pair(kk)
                if got is None or got[2] < target:
                    continue
                x, y, _, left_part, right_part = got
                if geom.distance(x) != r or geom.distance(y) != r:
                    continue
                cache: dict = {}

                def admissible(w, lo=rr, hi=r + tube_slack, cache=cache,
                               lp=left_part, rp=right_part):
                    v = cache.get(w)
                    if v is None:
                        part, m = geom.parabolic_split(w)
                        height = len(m) + geom.free_part_distance(part)
                        off_ok = all((c >> 1) not in support for c in m)
                        dev = len(part) - max(_common_prefix_len(part, lp),
                                              _common_prefix_len(part, rp))
                        v = (height, dev, off_ok)
                        cache[w] = v
                    return v[2] and lo <= v[0] <= hi and v[1] <= corridor_slack
                pairs += 1
                val = restricted_word_distance(
                    p, x, y, max_len=r_max, admissible=admissible,
                    node_budget=node_budget,
                )
                if val < best:
                    best = val
                    witness = (p.format_word(x), p.format_word(y))
        rows.append(SigmaRow(r=r, value=best, pairs_examined=pairs,
                             capped=True, witness=witness))
    return DivergenceProfile(n=n, rho=rho, rows=rows, r_max=r_max,
                             method="region", subgroup_unbounded=True)


# -- explicit detour witnesses ------------------------------------------------


@dataclass(frozen=True)
class WitnessPath:
    """A verified detour: consecutive path entries differ by one generator,
    both endpoints sit at subgroup-distance exactly r, and every vertex was
    re-checked to keep subgroup-distance at least r."""

    path: tuple[Word, ...]
    endpoints: tuple[Word, Word]
    length: int


def pip1_witness_path(
    graph: DefiningGraph,
    s1: Sequence,
    cyc: InducedCycle,
    n: int,
    r: int,
) -> WitnessPath:
    """Detour of length exactly (4n+2)·r along a failing 4-cycle pattern.

    The hypothesis: ``cyc`` is an induced 4-cycle with one diagonal inside
    ``s1`` and the other diagonal not fully inside (in a right-angled
    Coxeter group).  The path climbs from the r-boundary of the special
    subgroup on ``s1`` to height 2r along the outside diagonal, runs 4nr
    steps along the inside diagonal, and climbs back down.  Endpoints are
    2·(2r)·n apart in the word metric, which meets the pair threshold n·r.

    Every vertex's subgroup distance is recomputed; a construction that
    cannot be verified raises instead of returning.
    """
    if n < 1 or r < 1:
        raise ValidationError("need n >= 1 and r >= 1")
    p = Presentation(graph, RACG)
    cyc.check(graph)
    s1_idx = frozenset(
        graph.index(v) if isinstance(v, str) else int(v) for v in s1
    )
    v0, v1, v2, v3 = (graph.index(v) if isinstance(v, str) else int(v)
                      for v in cyc.vertices)
    diagonals = [(v0, v2), (v1, v3)]
    a_diag = b_diag = None
    for da, db in (diagonals, diagonals[::-1]):
        if set(da) <= s1_idx and not set(db) <= s1_idx:
            a_diag, b_diag = da, db
            break
    if a_diag is None:
        raise PreconditionError(
            "cycle does not exhibit the failing pattern: need one diagonal "
            "inside s1 and the other not fully inside"
        )
    out = sorted(v for v in b_diag if v not in s1_idx)
    b1 = out[0]
    b2 = b_diag[1] if b_diag[0] == b1 else b_diag[0]
    a1, a2 = sorted(a_diag)

    m = 2 * r
    climb = bytes([2 * b1, 2 * b2] * r)  # length m, alternating the diagonal
    prefixes = [p.reduce(climb[:t]) for t in range(m + 1)]
    x = prefixes[m]

    path: list[Word] = []
    expected: list[int] = []
    for t in range(r, m + 1):
        path.append(prefixes[t])
        expected.append(t)
    along = x
    fence = bytes([2 * a1, 2 * a2] * (m * n))  # 2mn letters inside s1
    # every fence letter commutes with every climb letter (4-cycle edges), so
    # right-multiplying keeps the subgroup distance pinned at m while each
    # step stays a Cayley edge
    for j in range(len(fence)):
        along = p.multiply(along, bytes([fence[j]]))
        path.append(along)
        expected.append(m)
    shift = p.reduce(fence)
    for t in range(m - 1, r - 1, -1):
        path.append(p.multiply(shift, prefixes[t]))
        expected.append(t)

    for vertex, want in zip(path, expected):
        got = greedy_special_distance(p, vertex, s1_idx)
        if got != want:
            raise PreconditionError(
                f"path verification failed at {p.format_word(vertex)}: "
                f"subgroup distance {got}, expected {want}"
            )
    for a, b in zip(path, path[1:]):
        if len(p.multiply(p.inverse(a), b)) != 1:
            raise PreconditionError("path verification failed: non-edge step")
    endpoints = (path[0], path[-1])
    sep = len(p.multiply(p.inverse(endpoints[0]), endpoints[1]))
    if sep < n * r:
        raise PreconditionError(
            f"endpoint separation {sep} below the pair threshold {n * r}"
        )
    return WitnessPath(path=tuple(path), endpoints=endpoints,
                       length=len(path) - 1)


# -- geodesic divergence ------------------------------------------------------


class PeriodicGeodesic:
    """The bi-infinite path spelled by repeating a word in both directions.

    Construction checks that powers of the period stay geodesic out to a
    horizon wide enough for every window the instance is later asked about.
    """

    def __init__(self, p: Presentation, period: Word, horizon: int = 8):
        period = bytes(period)
        if not period:
            raise ValidationError("period must be nonempty")
        canon = p.reduce(period)
        if len(canon) != len(period):
            raise PreconditionError("period is not a geodesic word")
        self.presentation = p
        self.period = canon
        self.horizon = 0
        self.ensure_horizon(horizon)

    def ensure_horizon(self, horizon: int) -> None:
        if horizon <= self.horizon:
            return
        p = self.presentation
        power = b""
        for k in range(1, horizon + 1):
            power = p.multiply(power, self.period)
            if len(power) != k * len(self.period):
                raise PreconditionError(
                    f"period powers stop being geodesic at exponent {k}"
                )
        self.horizon = horizon

    def point(self, t: int) -> Word:
        """α(t): the canonical word of the ray position t letters out."""
        p = self.presentation
        spelling = self.period if t >= 0 else p.inverse(self.period)
        t = abs(t)
        reps = -(-t // len(spelling))
        self.ensure_horizon(max(self.horizon, reps))
        return p.reduce((spelling * reps)[:t])


def _line_window(p: Presentation, line: PeriodicGeodesic, t: int, r: int
                 ) -> tuple[Word, Word]:
    """Start and goal of the r-window at offset t, in coordinates centered
    on α(t); both must come out at length exactly r or the path is not a
    two-sided geodesic there."""
    center = line.point(t)
    start = p.multiply(p.inverse(center), line.point(t - r))
    goal = p.multiply(p.inverse(center), line.point(t + r))
    if len(start) != r or len(goal) != r:
        raise PreconditionError(
            f"period does not spell a two-sided geodesic across offset {t}"
        )
    return start, goal


def geodesic_divergence(
    p: Presentation,
    period: Word,
    r_list: Sequence[int],
    r_max: int,
    *,
    node_budget: int = 4_000_000,
) -> dict[int, int | float]:
    """Div(r): shortest path α(−r) → α(r) avoiding the open r-ball at α(0),
    measured inside the ball of radius ``r_max`` around α(0)."""
    line = PeriodicGeodesic(p, period)
    out: dict[int, int | float] = {}
    for r in sorted(set(int(r) for r in r_list)):
        if r < 1 or r > r_max:
            raise ValidationError(f"radius {r} outside [1, r_max]")
        start, goal = _line_window(p, line, 0, r)
        out[r] = restricted_word_distance(
            p, start, goal, min_len=r, max_len=r_max, node_budget=node_budget
        )
    return out


def geodesic_lower_divergence(
    p: Presentation,
    period: Word,
    r_list: Sequence[int],
    r_max: int,
    *,
    node_budget: int = 4_000_000,
) -> dict[int, int | float]:
    """ldiv(r): the minimum of the Div-style window over one period of
    basepoint offsets (offset 0 reproduces Div(r) exactly)."""
    line = PeriodicGeodesic(p, period)
    out: dict[int, int | float] = {}
    for r in sorted(set(int(r) for r in r_list)):
        if r < 1 or r > r_max:
            raise ValidationError(f"radius {r} outside [1, r_max]")
        best: int | float = INF
        for t in range(len(line.period)):
            start, goal = _line_window(p, line, t, r)
            val = restricted_word_distance(
                p, start, goal, min_len=r, max_len=r_max,
                node_budget=node_budget,
            )
            if val < best:
                best = val
        out[r] = best
    return out


def geodesic_divergence_ball(
    p: Presentation,
    period: Word,
    r_list: Sequence[int],
    r_max: int,
    *,
    element_budget: int = 4_000_000,
    cache_dir=None,
) -> dict[int, int | float]:
    """Div(r) over an explicit indexed ball instead of the lazy word BFS.

    Same window as geodesic_divergence; the trade-off is one up-front ball
    of radius ``r_max`` (feasible only while the ball fits the element
    budget) against vectorized per-radius sweeps.  Preferable when the
    group's growth makes the bidirectional word search flood — detour-rich
    groups with many generators — and the window still fits in memory.
    """
    line = PeriodicGeodesic(p, period)
    radii = sorted(set(int(r) for r in r_list))
    for r in radii:
        if r < 1 or r > r_max:
            raise ValidationError(f"radius {r} outside [1, r_max]")
    ball = build_ball(p, r_max, element_budget=element_budget,
                      cache_dir=cache_dir)
    lengths = np.fromiter((len(w) for w in ball.words), np.int32, len(ball))
    out: dict[int, int | float] = {}
    for r in radii:
        start, goal = _line_window(p, line, 0, r)
        dist = _admissible_bfs(
            ball.neighbors, lengths >= r, ball.id_of(start), len(ball)
        )
        d = int(dist[ball.id_of(goal)])
        out[r] = INF if d < 0 else d
    return out


# -- closed-form comparison bounds ---------------------------------------------


def pip1_upper(n: int, r: int) -> Fraction:
    """Upper comparison line (4n+2)·r for profiles along a failing 4-cycle."""
    if n < 1 or r < 1:
        raise ValidationError("need n >= 1 and r >= 1")
    return Fraction((4 * n + 2) * r)


def pip2_lower(r: int, rho, n: int | None = None) -> Fraction:
    """Lower comparison curve (r−1)(ρr−1); meaningful for n ≥ 3."""
    rho = _as_rho(rho)
    if r < 1:
        raise ValidationError("need r >= 1")
    if n is not None and n < 3:
        raise PreconditionError("the quadratic lower bound needs n >= 3")
    return (Fraction(r) - 1) * (rho * r - 1)


def kmt_lower(r: int, rho, big_n: int, big_m: int | None = None) -> Fraction:
    """Lower comparison curve ((r−1)/(3N+1))·(ρr−3N) − 2r.

    N bounds the generator lengths of the subgroup; when the Morse gauge
    summand M is supplied, the radius must clear (2M+3N+2)/ρ for the curve
    to be meaningful, and that precondition is enforced.
    """
    rho = _as_rho(rho)
    if r < 1 or big_n < 1:
        raise ValidationError("need r >= 1 and N >= 1")
    if big_m is not None and Fraction(r) <= Fraction(2 * big_m + 3 * big_n + 2) / rho:
        raise PreconditionError(
            f"radius {r} does not clear (2M+3N+2)/rho = "
            f"{Fraction(2 * big_m + 3 * big_n + 2) / rho}"
        )
    return Fraction(r - 1, 3 * big_n + 1) * (rho * r - 3 * big_n) - 2 * r


# -- growth diagnostics ---------------------------------------------------------


@dataclass(frozen=True)
class GrowthDiagnostic:
    """Log–log slope of value against radius plus a superlinearity flag
    (value/r strictly increasing across the finite rows)."""

    slope: float
    superlinear: bool
    points: tuple[tuple[int, float], ...]


def growth_diagnostic(rows) -> GrowthDiagnostic:
    """Fit the finite rows of a profile (or (r, value) pairs) in log–log."""
    if isinstance(rows, DivergenceProfile):
        pairs = [(row.r, row.value) for row in rows.rows]
    elif isinstance(rows, dict):
        pairs = sorted(rows.items())
    else:
        pairs = [(int(r), v) for r, v in rows]
    finite = [(r, float(v)) for r, v in pairs
              if v != INF and v is not None and float(v) > 0]
    if len(finite) < 3:
        raise InsufficientData(
            f"need at least 3 finite positive rows, have {len(finite)}"
        )
    finite.sort()
    xs = np.log([r for r, _ in finite])
    ys = np.log([v for _, v in finite])
    slope = float(np.polyfit(xs, ys, 1)[0])
    ratios = [v / r for r, v in finite]
    superlinear = all(b > a for a, b in zip(ratios, ratios[1:]))
    return GrowthDiagnostic(slope=slope, superlinear=superlinear,
                            points=tuple(finite))


# -- CSV ------------------------------------------------------------------------

_CSV_COLUMNS = ["r", "n", "rho", "value", "pairs_examined", "capped",
                "witness_x", "witness_y"]


def emit_profile_csv(profile: DivergenceProfile) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in profile.rows:
        wx, wy = row.witness if row.witness is not None else ("", "")
        value = "inf" if row.value == INF else str(int(row.value))
        writer.writerow([row.r, profile.n, profile.rho, value,
                         row.pairs_examined,
                         "true" if row.capped else "false", wx, wy])
    return buf.getvalue()


def parse_profile_csv(text: str) -> DivergenceProfile:
    # '#' lines are summary annotations (the CLI appends one); skip them
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV") from None
    if header != _CSV_COLUMNS:
        raise ParseError(f"unexpected CSV header {header!r}")
    rows = []
    n = None
    rho = None
    for rec in reader:
        if not rec:
            continue
        if len(rec) != len(_CSV_COLUMNS):
            raise ParseError(f"malformed CSV record {rec!r}")
        r_s, n_s, rho_s, value_s, pairs_s, capped_s, wx, wy = rec
        try:
            r = int(r_s)
            row_n = int(n_s)
            row_rho = Fraction(rho_s)
            value: int | float = INF if value_s == "inf" else int(value_s)
            pairs = int(pairs_s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed CSV record {rec!r}") from exc
        if capped_s not in ("true", "false"):
            raise ParseError(f"malformed capped flag {capped_s!r}")
        if n is None:
            n, rho = row_n, row_rho
        elif (row_n, row_rho) != (n, rho):
            raise ParseError("rows disagree on n or rho")
        witness = (wx, wy) if wx or wy else None
        rows.append(SigmaRow(r=r, value=value, pairs_examined=pairs,
                             capped=(capped_s == "true"), witness=witness))
    if n is None:
        raise ParseError("CSV has no data rows")
    return DivergenceProfile(n=n, rho=rho, rows=rows, method="csv")
