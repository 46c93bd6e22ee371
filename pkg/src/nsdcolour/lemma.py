"""Randomised balanced-colouring engine with local resampling.

Stage one draws three independent uniform colourings of a graph: a small
"attractor" palette on vertices (c1), an auxiliary palette on edges (c2),
and a target palette on vertices (c3v); the derived edge colour is the sum
c3e(uv) = c1(u) + c1(v) + c2(uv). Stage two rewires c3e so that equal-target
neighbours share their joining edge's colour and the leftover edges get
uniform colours, again under counting caps.

The engine certifies a state against ten counting/structural properties,
identified as I..VI and 1°..4° (the ids are part of this package's report
format). All caps scale as powers of the max degree D and ln D; permissive
mode multiplies each cap by a slack factor, strict mode requires D large
enough for the engine's feasibility predicate. Caps are evaluated in floating
point once, floored to integers, and recorded; every comparison afterwards is
integer or exact rational arithmetic.

Checked per vertex v (d = degree, "large" means 3d >= D):

  I    large v: every attractor colour appears among neighbours d/r1 +- sqrt(D)
       times (checked as |r1*count - d| <= floor(slack*r1*sqrt(D)))
  II   large v: every auxiliary colour appears on incident edges d/r2 +-
       3 D^{1/3} ln^{2/3} D times (scaled by r2 likewise)
  III  the sum formula c3e = c1+c1+c2 fails for at most cap(1°b)+cap(2°)
       incident edges
  IV   no target colour appears on more than cap(3°)+cap(4°) incident edges
  V    equal target colours on adjacent vertices force the joining edge to
       carry that same target colour
  VI   large v: within every score interval, at most
       D^{5/6} ln^{1/6} D + sqrt(D) large neighbours' scores land
  1°   (a) no value of the sum c1(u)+c1(v)+c2(uv) appears on more than
       D^{2/3} ln^{1/3} D + 3 D^{1/3} ln^{2/3} D incident edges;
       (b) the sum hits a target colour of either endpoint on at most
       2 D^{2/3} ln^{1/3} D + 5 D^{1/3} ln^{2/3} D incident edges
  2°   no target colour appears on more than cap(1°a) neighbours
  3°   after stage two, edges coloured before the uniform redraw carry no
       colour more than cap(1°a) times per vertex
  4°   the uniformly redrawn edges carry no colour more than
       2 D^{1/3} ln^{2/3} D times per vertex

Resampling follows the usual algorithmic local-lemma discipline: sweep
vertices in index order, find the first violated event, redraw exactly the
random variables in that event's scope, repeat under a round budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import Graph

STAGE_ONE_PROPERTIES = ("I", "II", "VI", "1°", "2°")
ALL_PROPERTIES = ("I", "II", "III", "IV", "V", "VI", "1°", "2°", "3°", "4°")


class InfeasibleStrictError(ValueError):
    """Strict mode refused: the max degree fails the feasibility predicate."""


def _ln_floor(delta: int) -> float:
    if delta < 1:
        return 1.0
    return max(math.log(delta), 1.0)


class LemmaParams:
    """Palette sizes and integer caps for a given max degree.

    r1 = ceil(D^{1/6} / ln^{1/6} D) sizes the attractor palette, r2 the
    auxiliary and target palettes, r3 = 2 r1 + r2 the full edge target range.
    ``caps`` maps check ids to the enforced integer caps; "I" and "II" are on
    the r-scaled axis (see module docstring), "1°" splits into "1°a"/"1°b".
    """

    def __init__(self, delta: int, strict: bool = False, slack: float = 1.0):
        if delta < 0:
            raise ValueError("max degree must be non-negative")
        if slack < 1.0:
            raise ValueError("slack multiplier must be at least 1")
        if strict and slack != 1.0:
            raise ValueError("strict mode does not take slack")
        self.delta = int(delta)
        self.strict = bool(strict)
        self.slack = float(slack)
        self.ln_floor = _ln_floor(delta)

        x = float(max(delta, 0))
        L = self.ln_floor
        self.r1 = max(1, math.ceil(x ** (1 / 6) / L ** (1 / 6)))
        self.r2 = max(1, math.ceil(x ** (1 / 3) / L ** (1 / 3)))
        self.r3 = 2 * self.r1 + self.r2

        a = x ** (2 / 3) * L ** (1 / 3)
        b = x ** (1 / 3) * L ** (2 / 3)
        self.b_unit = math.ceil(a) + 6 * math.ceil(b)
        base = {
            "I": self.r1 * math.sqrt(x),
            "II": self.r2 * 3.0 * b,
            "VI": x ** (5 / 6) * L ** (1 / 6) + math.sqrt(x),
            "1°a": a + 3 * b,
            "1°b": 2 * a + 5 * b,
            "2°": a + 3 * b,
            "3°": a + 3 * b,
            "4°": 2 * b,
            "dH": 15.0 * L,
        }
        caps = {k: int(math.floor(self.slack * v)) for k, v in base.items()}
        caps["III"] = caps["1°b"] + caps["2°"]
        caps["IV"] = caps["3°"] + caps["4°"]
        self.caps: dict[str, int] = caps

        reasons = []
        if delta < 3 or math.log(max(delta, 1)) < 1.0:
            reasons.append("ln(max degree) below 1")
        small = [k for k in ("I", "II", "VI", "1°a", "1°b", "2°", "3°", "4°")
                 if caps[k] < 1]
        if small:
            reasons.append(f"caps below 1: {','.join(small)}")
        # largest score must stay within D^2 for the interval machinery
        s2_max = self.b_unit * delta * (3 * self.r1 + self.r2 + 2)
        if s2_max > 2 * delta * delta:
            reasons.append("max score exceeds squared max degree")
        self.feasibility_reasons: list[str] = reasons
        self.feasible_strict = not reasons
        if strict and not self.feasible_strict:
            raise InfeasibleStrictError(
                f"max degree {delta} fails the strict feasibility predicate: "
                + "; ".join(reasons)
            )

    def __repr__(self) -> str:
        mode = "strict" if self.strict else f"permissive(slack={self.slack})"
        return f"LemmaParams(delta={self.delta}, r1={self.r1}, r2={self.r2}, {mode})"


class SParams:
    """Exact-arithmetic score machinery.

    score(d, c1) = b_unit * (d*c1 + (d/r1)*T(r1) + (d/r2)*T(r2)) with
    T(r) = r(r+1)/2, kept as an exact Fraction (twice the score is always an
    integer). interval_len is the float evaluation of D^{5/3} ln^{1/3} D / 3
    converted to an exact Fraction once, so boundary membership of the
    right-closed intervals ((a-1)*len, a*len] is deterministic.
    """

    def __init__(self, delta: int, ln_floor: float | None = None):
        self.delta = int(delta)
        L = _ln_floor(delta) if ln_floor is None else ln_floor
        self.ln_floor = L
        x = float(max(delta, 0))
        self.r1 = max(1, math.ceil(x ** (1 / 6) / L ** (1 / 6)))
        self.r2 = max(1, math.ceil(x ** (1 / 3) / L ** (1 / 3)))
        self.b_unit = math.ceil(x ** (2 / 3) * L ** (1 / 3)) + 6 * math.ceil(
            x ** (1 / 3) * L ** (2 / 3))
        self.interval_len = Fraction(x ** (5 / 3) * L ** (1 / 3)) / 3

    @classmethod
    def from_params(cls, p: LemmaParams) -> "SParams":
        return cls(p.delta, p.ln_floor)

    def score2(self, d: int, c1v: int) -> int:
        """Twice the score; integer by the closed form b_unit*d*(2c1+r1+r2+2)."""
        return self.b_unit * d * (2 * c1v + self.r1 + self.r2 + 2)

    def score2_array(self, degrees: np.ndarray, c1: np.ndarray) -> np.ndarray:
        return self.b_unit * degrees * (2 * c1 + self.r1 + self.r2 + 2)


def s_of(d: int, c1v: int, sp: SParams) -> Fraction:
    """Exact score of a vertex with degree d and attractor colour c1v."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    return Fraction(sp.score2(d, c1v), 2)


def interval_index(s, sp: SParams) -> int:
    """1-based index a of the right-closed interval ((a-1)*len, a*len] holding s."""
    s = Fraction(s)
    if s <= 0:
        raise ValueError(f"score {s} not positive")
    if sp.interval_len <= 0:
        raise ValueError("interval length is zero for this max degree")
    return math.ceil(s / sp.interval_len)


@dataclass
class LemmaState:
    """The engine's random variables plus the derived edge target colours.

    c1: vertex attractor colours in {1..r1}; c2: edge auxiliary colours in
    {1..r2}; c3v: vertex target colours in {1..r2}; c3e: edge target colours,
    equal to c1(u)+c1(v)+c2(uv) after stage one (so at most r3), 0 only as the
    transient uncoloured sentinel inside stage two.
    """
    c1: np.ndarray
    c2: np.ndarray
    c3v: np.ndarray
    c3e: np.ndarray
    seed: int

    def copy(self) -> "LemmaState":
        return LemmaState(self.c1.copy(), self.c2.copy(),
                          self.c3v.copy(), self.c3e.copy(), self.seed)


def _sum_colours(g: Graph, st: LemmaState) -> np.ndarray:
    return st.c1[g.edge_u] + st.c1[g.edge_v] + st.c2


def _sample_with_rng(g: Graph, p: LemmaParams, rng, seed: int) -> LemmaState:
    c1 = rng.integers(1, p.r1 + 1, size=g.n, dtype=np.int64)
    c2 = rng.integers(1, p.r2 + 1, size=g.m, dtype=np.int64)
    c3v = rng.integers(1, p.r2 + 1, size=g.n, dtype=np.int64)
    st = LemmaState(c1, c2, c3v, np.zeros(g.m, dtype=np.int64), seed)
    st.c3e = _sum_colours(g, st)
    return st


def sample_stage_one(g: Graph, p: LemmaParams, seed: int) -> LemmaState:
    """Draw the three independent colourings and the derived edge targets."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return _sample_with_rng(g, p, rng, seed)


@dataclass
class PropertyReport:
    """Outcome of a property check pass.

    verdicts: property id -> pass/fail for every evaluated property.
    violators: finer-grained lists of (vertex, value) pairs; "1°" splits into
    "1°a"/"1°b", III reports (vertex, exception count), V reports
    (smaller endpoint, shared target colour).
    caps_used: the integer cap each check enforced (None for structural V).
    """
    verdicts: dict[str, bool] = field(default_factory=dict)
    violators: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    caps_used: dict[str, int | None] = field(default_factory=dict)

    def all_pass(self, properties=None) -> bool:
        ids = self.verdicts if properties is None else properties
        return all(self.verdicts.get(q, False) for q in ids)

    def violation_total(self, properties=None) -> int:
        if properties is None:
            return sum(len(v) for v in self.violators.values())
        keys = []
        for q in properties:
            keys.extend(("1°a", "1°b") if q == "1°" else (q,))
        return sum(len(self.violators.get(k, ())) for k in keys)

    def violator_counts(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.violators.items()}


def _pair_counts(n: int, centers: np.ndarray, values: np.ndarray, width: int) -> np.ndarray:
    key = centers * width + values
    return np.bincount(key, minlength=n * width).reshape(n, width)


def _alphas(g: Graph, st: LemmaState, sp: SParams, large: np.ndarray) -> np.ndarray:
    """Interval index per large vertex (0 elsewhere); exact integer arithmetic."""
    out = np.zeros(g.n, dtype=np.int64)
    if sp.interval_len <= 0:
        return out
    num, den = sp.interval_len.numerator, sp.interval_len.denominator
    twice_num = 2 * num
    s2 = sp.score2_array(g.degrees, st.c1)
    for v in np.nonzero(large & (g.degrees > 0))[0]:
        scaled = int(s2[v]) * den
        out[v] = (scaled + twice_num - 1) // twice_num
    return out


def check_properties(g: Graph, st: LemmaState, sp: SParams, p: LemmaParams,
                     properties=None, h3_edge_ids=None) -> PropertyReport:
    """Evaluate the requested properties (default: all that are meaningful).

    3° and 4° partition edges by membership in the uniformly redrawn set and
    need h3_edge_ids; without it they are skipped unless explicitly requested.
    """
    if properties is None:
        properties = [q for q in ALL_PROPERTIES
                      if q not in ("3°", "4°") or h3_edge_ids is not None]
    else:
        properties = list(properties)
        if ("3°" in properties or "4°" in properties) and h3_edge_ids is None:
            raise ValueError("3°/4° need the redrawn edge set")

    n = g.n
    caps = p.caps
    deg = g.degrees
    large = 3 * deg >= p.delta
    eu, ev = g.edge_u, g.edge_v
    centers = np.concatenate([eu, ev])
    others = np.concatenate([ev, eu])
    svals = _sum_colours(g, st)
    rep = PropertyReport()

    def record(q, cap_key, bad_pairs):
        rep.caps_used[cap_key] = caps.get(cap_key)
        rep.violators[cap_key] = bad_pairs
        base = "1°" if cap_key in ("1°a", "1°b") else cap_key
        ok = not bad_pairs
        rep.verdicts[base] = rep.verdicts.get(base, True) and ok

    def over_cap_pairs(cnt: np.ndarray, cap: int, row_mask=None, col_lo=1):
        bad = cnt[:, col_lo:] > cap
        if row_mask is not None:
            bad &= row_mask[:, None]
        return [(int(v), int(c) + col_lo) for v, c in np.argwhere(bad)]

    for q in properties:
        if q == "I":
            cnt = _pair_counts(n, centers, st.c1[others], p.r1 + 1)
            dev = np.abs(p.r1 * cnt[:, 1:] - deg[:, None]) > caps["I"]
            dev &= large[:, None]
            record("I", "I", [(int(v), int(c) + 1) for v, c in np.argwhere(dev)])
        elif q == "II":
            vals = np.concatenate([st.c2, st.c2])
            cnt = _pair_counts(n, centers, vals, p.r2 + 1)
            dev = np.abs(p.r2 * cnt[:, 1:] - deg[:, None]) > caps["II"]
            dev &= large[:, None]
            record("II", "II", [(int(v), int(c) + 1) for v, c in np.argwhere(dev)])
        elif q == "VI":
            rep.caps_used["VI"] = caps["VI"]
            bad_pairs: list[tuple[int, int]] = []
            if g.m:
                alpha = _alphas(g, st, sp, large)
                mask = large[centers] & large[others]
                if mask.any():
                    ctr = centers[mask]
                    av = alpha[others[mask]]
                    width = int(av.max()) + 1
                    cnt = _pair_counts(n, ctr, av, width)
                    over = cnt > caps["VI"]
                    over &= large[:, None]
                    bad_pairs = [(int(v), int(c)) for v, c in np.argwhere(over)]
            rep.violators["VI"] = bad_pairs
            rep.verdicts["VI"] = not bad_pairs
        elif q == "1°":
            vals = np.concatenate([svals, svals])
            cnt = _pair_counts(n, centers, vals, p.r3 + 1)
            record("1°", "1°a", over_cap_pairs(cnt, caps["1°a"]))
            hit = (svals == st.c3v[eu]) | (svals == st.c3v[ev])
            per_v = np.bincount(np.concatenate([eu[hit], ev[hit]]), minlength=n)
            bad = np.nonzero(per_v > caps["1°b"])[0]
            record("1°", "1°b", [(int(v), int(per_v[v])) for v in bad])
        elif q == "2°":
            vals = np.concatenate([st.c3v[ev], st.c3v[eu]])
            cnt = _pair_counts(n, centers, vals, p.r3 + 1)
            record("2°", "2°", over_cap_pairs(cnt, caps["2°"]))
        elif q == "III":
            ex = st.c3e != svals
            per_v = np.bincount(np.concatenate([eu[ex], ev[ex]]), minlength=n)
            bad = np.nonzero(per_v > caps["III"])[0]
            record("III", "III", [(int(v), int(per_v[v])) for v in bad])
        elif q == "IV":
            width = max(int(st.c3e.max(initial=0)), p.r3) + 1
            vals = np.concatenate([st.c3e, st.c3e])
            cnt = _pair_counts(n, centers, vals, width)
            record("IV", "IV", over_cap_pairs(cnt, caps["IV"]))
        elif q == "V":
            rep.caps_used["V"] = None
            mask = (st.c3v[eu] == st.c3v[ev]) & (st.c3e != st.c3v[eu])
            rep.violators["V"] = [
                (int(eu[i]), int(st.c3v[eu[i]])) for i in np.nonzero(mask)[0]
            ]
            rep.verdicts["V"] = not rep.violators["V"]
        elif q in ("3°", "4°"):
            in_h3 = np.zeros(g.m, dtype=bool)
            in_h3[np.asarray(h3_edge_ids, dtype=np.int64)] = True
            sel = in_h3 if q == "4°" else ~in_h3
            width = max(int(st.c3e.max(initial=0)), p.r3) + 1
            ctr = np.concatenate([eu[sel], ev[sel]])
            vals = np.concatenate([st.c3e[sel], st.c3e[sel]])
            cnt = _pair_counts(n, ctr, vals, width)
            record(q, q, over_cap_pairs(cnt, caps[q]))
        else:
            raise ValueError(f"unknown property id {q!r}")
    return rep


# ---------------------------------------------------------------------------
# resampling

def event_scope(g: Graph, v: int, prop: str):
    """Random variables a stage-one event at vertex v depends on.

    Returned as (c1 vertex ids, c2 edge ids, c3v vertex ids), each sorted.
    """
    nbrs = list(g.adjacency[v])
    inc = sorted(g.incident_edges(v))
    closed = sorted([v] + nbrs)
    if prop in ("I", "VI"):
        return nbrs, [], []
    if prop == "II":
        return [], inc, []
    if prop == "1°":
        return closed, inc, closed
    if prop == "2°":
        return [], [], nbrs
    raise ValueError(f"{prop!r} is not a stage-one event")


def resample_event(g: Graph, st: LemmaState, v: int, prop: str, rng,
                   p: LemmaParams) -> None:
    """Redraw exactly the variables in the event's scope, in index order,
    then refresh the derived edge targets."""
    c1_ids, c2_ids, c3v_ids = event_scope(g, v, prop)
    if c1_ids:
        st.c1[np.array(c1_ids, dtype=np.int64)] = rng.integers(
            1, p.r1 + 1, size=len(c1_ids), dtype=np.int64)
    if c2_ids:
        st.c2[np.array(c2_ids, dtype=np.int64)] = rng.integers(
            1, p.r2 + 1, size=len(c2_ids), dtype=np.int64)
    if c3v_ids:
        st.c3v[np.array(c3v_ids, dtype=np.int64)] = rng.integers(
            1, p.r2 + 1, size=len(c3v_ids), dtype=np.int64)
    st.c3e = _sum_colours(g, st)


@dataclass
class ResampleResult:
    state: LemmaState
    report: PropertyReport
    rounds: int
    valid: bool


def _first_violation(report: PropertyReport):
    best = None
    for order, prop in enumerate(STAGE_ONE_PROPERTIES):
        keys = ("1°a", "1°b") if prop == "1°" else (prop,)
        for k in keys:
            for v, _ in report.violators.get(k, ()):
                if best is None or (v, order) < best[:2]:
                    best = (v, order, prop)
    if best is None:
        return None
    return best[0], best[2]


def resample_until_valid(g: Graph, p: LemmaParams, sp: SParams, seed: int,
                         max_rounds: int) -> ResampleResult:
    """Sample stage one, then resample first-violated events until the five
    stage-one properties hold or the round budget runs out.

    Deterministic per seed. On budget exhaustion the best state seen (fewest
    total violations) comes back with valid=False.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    st = _sample_with_rng(g, p, rng, seed)
    rounds = 0
    best: tuple[int, LemmaState, PropertyReport] | None = None
    while True:
        report = check_properties(g, st, sp, p, properties=STAGE_ONE_PROPERTIES)
        total = report.violation_total(STAGE_ONE_PROPERTIES)
        if best is None or total < best[0]:
            best = (total, st.copy(), report)
        if total == 0:
            return ResampleResult(st, report, rounds, True)
        if rounds >= max_rounds:
            return ResampleResult(best[1], best[2], rounds, False)
        v, prop = _first_violation(report)
        resample_event(g, st, v, prop, rng, p)
        rounds += 1


@dataclass
class Stage2Result:
    state: LemmaState
    report: PropertyReport
    rounds: int
    valid: bool
    h3_edge_ids: np.ndarray
    e1_count: int
    e2_count: int
    h1_max_degree: int
    h2_max_degree: int


def stage_two(g: Graph, st: LemmaState, p: LemmaParams, seed: int,
              max_rounds: int) -> Stage2Result:
    """Rewire edge targets: uncolour edges whose sum value hits an endpoint
    target, give equal-target pairs their shared target, uniformly redraw the
    rest of the uncoloured edges under the 4° cap with local resampling.

    Never touches c1, c2, or c3v. The returned report evaluates all ten
    properties; valid means 4° held within the round budget.
    """
    st2 = st.copy()
    sp = SParams.from_params(p)
    svals = _sum_colours(g, st2)
    e1 = (svals == st2.c3v[g.edge_u]) | (svals == st2.c3v[g.edge_v])
    e2 = st2.c3v[g.edge_u] == st2.c3v[g.edge_v]
    c3e = svals.copy()
    c3e[e1] = 0
    c3e[e2] = st2.c3v[g.edge_u][e2]
    h3 = e1 & ~e2
    h3_ids = np.nonzero(h3)[0].astype(np.int64)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if h3_ids.size:
        c3e[h3_ids] = rng.integers(1, p.r3 + 1, size=h3_ids.size, dtype=np.int64)
    st2.c3e = c3e

    cap4 = p.caps["4°"]
    rounds = 0
    valid = True
    while h3_ids.size:
        ctr = np.concatenate([g.edge_u[h3_ids], g.edge_v[h3_ids]])
        vals = np.concatenate([c3e[h3_ids], c3e[h3_ids]])
        width = p.r3 + 1
        cnt = _pair_counts(g.n, ctr, vals, width)
        over = np.nonzero((cnt[:, 1:] > cap4).any(axis=1))[0]
        if over.size == 0:
            break
        if rounds >= max_rounds:
            valid = False
            break
        v = int(over[0])
        mine = h3_ids[(g.edge_u[h3_ids] == v) | (g.edge_v[h3_ids] == v)]
        c3e[mine] = rng.integers(1, p.r3 + 1, size=mine.size, dtype=np.int64)
        rounds += 1

    per_v_e1 = np.bincount(
        np.concatenate([g.edge_u[e1], g.edge_v[e1]]), minlength=g.n)
    per_v_e2 = np.bincount(
        np.concatenate([g.edge_u[e2], g.edge_v[e2]]), minlength=g.n)
    report = check_properties(g, st2, sp, p, h3_edge_ids=h3_ids)
    return Stage2Result(
        state=st2,
        report=report,
        rounds=rounds,
        valid=valid and report.verdicts.get("4°", True),
        h3_edge_ids=h3_ids,
        e1_count=int(e1.sum()),
        e2_count=int(e2.sum()),
        h1_max_degree=int(per_v_e1.max(initial=0)),
        h2_max_degree=int(per_v_e2.max(initial=0)),
    )
