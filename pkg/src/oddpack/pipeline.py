"""Maximum integer packings of odd T-trails in inner Eulerian ``(G, T, 2)``.

Stages:

1. ``initial_classify``: a maximum integer multiflow in the unit-capacity
   double cover gives the odd trails ``P``; the unused cover edges split into
   even T-trails ``Q``, odd closed trails through a terminal ``R`` and even
   closed trails ``E``.  Cover edge ``CoverEdge(e, k)`` is read as the valence
   ``Valence(e, k + 1)``.
2. ``terminal_evacuation``: every terminal ``t`` gets a new terminal
   ``Evac(t)`` and each trail end at ``t`` is extended by one new valence.
   The trails are signed so that they alternate.
3. ``subcubize_step``: inner vertices of degree at least 4 are split until
   every inner vertex has degree at most 3.
4. ``regularize``: trails using both valencies of an edge are shortened
   (Cases 1-3) or the edge layout proves an edge redundant (Case 4), which is
   removed before the alternating packing is rebuilt.
5. The surviving odd trails are mapped back to ``G``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

from .cover import CoverEdge, build_commodity_graph, build_double_cover, is_primed, unprime
from .flow import eulerian_decompose
from .graph import Multigraph, Network, Packing, PackingItem, Step, Walk, is_trail, odd_inner_vertices, validate_packing
from .multiflow import max_multiflow_integer
from .signed import (MINUS, PLUS, SignedValenceNetwork, Valence, alternating_packing,
                     count_minus_at_terminals, is_alternating, is_inner_balanced, valencies)


class PipelineInputError(ValueError):
    pass


class PipelineError(AssertionError):
    """An invariant of the construction failed; always a bug."""


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise PipelineError(message)


class Evac(NamedTuple):
    t: object

    def __str__(self):
        return f"{self.t}*"


class EvacEdge(NamedTuple):
    t: object
    j: int

    def __str__(self):
        return f"evac({self.t},{self.j})"


class Sub(NamedTuple):
    k: int
    role: str          # "u", "m" or "w"

    def __str__(self):
        return f"sub{self.k}{self.role}"


class SubEdge(NamedTuple):
    k: int
    role: str          # "um" or "mw"

    def __str__(self):
        return f"sub{self.k}:{self.role}"


# ---------------------------------------------------------------- records

@dataclass(frozen=True)
class EvacuationRecord:
    terminals: tuple           # (t, Evac(t)) pairs
    added_edges: tuple         # (t, number of new edges)
    p: int
    q: int
    r: int
    e: int
    kind: str = "evacuation"


@dataclass(frozen=True)
class SubcubizationRecord:
    k: int
    vertex: object
    left: tuple
    right: tuple
    split_pairs: int
    s_before: int
    s_after: int
    kind: str = "subcubization"


@dataclass(frozen=True)
class RegularizationRecord:
    case: int
    trail: int
    edge: object
    c_length: int
    measure_before: tuple
    measure_after: tuple
    p_measure_before: tuple = ()   # (|E|, length of the odd witness trails only)
    p_measure_after: tuple = ()
    removed: object = None
    subcase: str = ""
    deg_y: int = 0
    edge_sign: int = 0         # sign of both valencies of the irregular edge
    end_signs: tuple = ()
    u: object = None
    v: object = None
    kind: str = "regularization"


def _jsonable(x):
    if isinstance(x, (str, int)) or x is None:
        return x
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    return str(x)


@dataclass
class PipelineTrace:
    records: list = field(default_factory=list)

    def add(self, rec) -> None:
        self.records.append(rec)

    def of_kind(self, kind: str) -> list:
        return [r for r in self.records if r.kind == kind]

    def as_json(self) -> list:
        return [{k: _jsonable(v) for k, v in asdict(r).items()} for r in self.records]


# ---------------------------------------------------------------- classification

@dataclass(frozen=True)
class ComponentClassification:
    network: Network
    P: tuple       # odd T-trails of G^12
    Q: tuple       # even T-trails
    R: tuple       # odd closed trails through a terminal
    E: tuple       # even closed trails

    @property
    def p(self) -> int:
        return len(self.P)

    @property
    def q(self) -> int:
        return len(self.Q)

    def valence_usage(self) -> dict:
        use: dict = {}
        for w in self.P + self.Q + self.R + self.E:
            for s in w.steps:
                use[s.edge] = use.get(s.edge, 0) + 1
        return use


def check_trail_input(n: Network) -> None:
    bad = [e.id for e in n.graph.edges if n.cap[e.id] != 2]
    if bad:
        raise PipelineInputError(f"edge {bad[0]} has capacity {n.cap[bad[0]]}, expected 2")
    odd = odd_inner_vertices(n)
    if odd:
        raise PipelineInputError(f"non-terminal vertex {odd[0]} has odd degree")


def _to_valence(w: Walk) -> Walk:
    return Walk(tuple(Step(Valence(s.edge.base, s.edge.k + 1), unprime(s.tail), unprime(s.head))
                      for s in w.steps))


def initial_classify(n: Network) -> ComponentClassification:
    check_trail_input(n)
    if len(n.terminals) < 2:
        raise PipelineInputError("at least two terminals are needed")
    dc = build_double_cover(n)
    h, _ = build_commodity_graph(n.terminals)
    mf = max_multiflow_integer(dc.cover, h)
    flows = []
    for weight, walk in mf.packing:
        flows += [walk] * int(weight)
    used = {s.edge for w in flows for s in w.steps}
    leftover = Multigraph(dc.cover.graph.vertices,
                          [e for e in dc.cover.graph.edges if e.id not in used])
    t_trails, cycles = eulerian_decompose(leftover, dc.cover.terminals)
    Q, R, E = [], [], []
    for w in t_trails:
        a, b = w.start, w.end
        if a == b:
            E.append(w)
        elif is_primed(a) == is_primed(b):
            Q.append(w)
        elif unprime(a) == unprime(b):
            R.append(w)
        else:
            raise PipelineError(f"leftover trail joins {a} and {b}; the multiflow is not maximum")
    E += cycles
    cc = ComponentClassification(n, tuple(_to_valence(w) for w in flows),
                                 tuple(_to_valence(w) for w in Q),
                                 tuple(_to_valence(w) for w in R),
                                 tuple(_to_valence(w) for w in E))
    use = cc.valence_usage()
    _require(len(use) == 2 * len(n.graph.edges) and set(use.values()) <= {1},
             "classification does not use every valence exactly once")
    _require(cc.p == mf.value, "P differs from the multiflow")
    return cc


# ---------------------------------------------------------------- evacuation

def _alternate(steps, first: int, sign: dict) -> None:
    s = first
    for st in steps:
        _require(st.edge not in sign, f"valence {st.edge} signed twice")
        sign[st.edge] = s
        s = -s


def terminal_evacuation(cc: ComponentClassification):
    """Signed valence network with evacuated terminals, and its record."""
    n = cc.network
    count = {t: 0 for t in n.terminals}

    def new_valence(t):
        k = count[t]
        count[t] += 1
        return Valence(EvacEdge(t, k // 2), k % 2 + 1)

    extended = {"P": [], "Q": [], "R": []}
    for kind, trails in (("P", cc.P), ("Q", cc.Q), ("R", cc.R)):
        for w in trails:
            first = Step(new_valence(w.start), Evac(w.start), w.start)
            last = Step(new_valence(w.end), w.end, Evac(w.end))
            extended[kind].append(Walk((first,) + w.steps + (last,)))
    for t, c in count.items():
        _require(c % 2 == 0, f"odd number of trail ends at terminal {t}")
    vertices = list(n.graph.vertices) + [Evac(t) for t in n.terminals]
    edges = [(e.id, e.u, e.v) for e in n.graph.edges]
    for t in n.terminals:
        edges += [(EvacEdge(t, j), Evac(t), t) for j in range(count[t] // 2)]
    base = Multigraph(vertices, edges)
    sign: dict = {}
    for w in extended["P"] + extended["R"]:
        _require(len(w) % 2 == 1, "odd trail has even length after extension")
        _alternate(w.steps, PLUS, sign)
    for w in extended["Q"]:
        _alternate(w.steps, PLUS, sign)
    for w in cc.E:
        _require(len(w) % 2 == 0, "closed trail in E is odd")
        _alternate(w.steps, PLUS, sign)
    witness = tuple(extended["P"] + extended["Q"])
    svn = SignedValenceNetwork(base, tuple(Evac(t) for t in n.terminals), sign,
                               cc.p, cc.q, witness)
    _require(is_inner_balanced(svn), "evacuated signing is not inner balanced")
    _require(count_minus_at_terminals(svn) == cc.q, "'-' count at terminals differs from q")
    for w in witness:
        _require(is_alternating(w, sign), "witness trail does not alternate")
    rec = EvacuationRecord(tuple((t, Evac(t)) for t in n.terminals),
                           tuple((t, count[t] // 2) for t in n.terminals),
                           cc.p, cc.q, len(cc.R), len(cc.E))
    return svn, rec


# ---------------------------------------------------------------- subcubization

def supercubicity(svn: SignedValenceNetwork) -> int:
    terms = svn.terminal_set
    return sum(max(0, svn.base.degree(v) - 3) for v in svn.base.vertices if v not in terms)


@dataclass(frozen=True)
class TransitPair:
    i: int
    j: int
    first: Valence        # valence on edge i
    second: Valence       # valence on edge j
    trail: int | None     # witness index, None for a pairing of unused valencies
    position: int | None  # index of the step entering the vertex


def transit_plan(svn: SignedValenceNetwork, v) -> list[TransitPair]:
    """All ``deg(v)`` transit pairs at ``v``: witness pairs, then unused ones."""
    inc = svn.base.incident(v)
    pos = {e.id: i for i, e in enumerate(inc)}
    plan = []
    used = set()
    for ti, w in enumerate(svn.witness):
        used.update(w.edge_ids)
        for si in range(len(w) - 1):
            a, b = w.steps[si], w.steps[si + 1]
            if a.head != v:
                continue
            _require(svn.sign[a.edge] != svn.sign[b.edge], "transit pair with equal signs")
            ia, ib = pos[a.edge.edge], pos[b.edge.edge]
            if ia <= ib:
                plan.append(TransitPair(ia, ib, a.edge, b.edge, ti, si))
            else:
                plan.append(TransitPair(ib, ia, b.edge, a.edge, ti, si))
    free = [val for e in inc for val in valencies(e.id) if val not in used]
    taken = [False] * len(free)
    for x in range(len(free)):
        if taken[x]:
            continue
        for y in range(x + 1, len(free)):
            if not taken[y] and svn.sign[free[y]] != svn.sign[free[x]]:
                taken[x] = taken[y] = True
                plan.append(TransitPair(pos[free[x].edge], pos[free[y].edge],
                                        free[x], free[y], None, None))
                break
        _require(taken[x], f"unused valencies at {v} cannot be paired by sign")
    _require(len(plan) == len(inc), "transit plan has the wrong size")
    return plan


def subcubize_step(svn: SignedValenceNetwork, k: int, v):
    """Split inner vertex ``v`` (degree >= 4) into ``u - m - w``."""
    g = svn.base
    deg = g.degree(v)
    _require(v not in svn.terminal_set and deg >= 4, f"{v} is not an inner vertex of degree >= 4")
    s_before = supercubicity(svn)
    inc = g.incident(v)
    plan = transit_plan(svn, v)
    pick = next((tp for tp in plan if tp.i != tp.j), None)
    left_idx = {pick.i, pick.j} if pick else {0, 1}
    left = {inc[i].id for i in left_idx}
    right = [e.id for e in inc if e.id not in left]
    split = [tp for tp in plan if (tp.i in left_idx) != (tp.j in left_idx)]
    _require(len(split) in (0, 2), f"{len(split)} split transit pairs at {v}")
    u, m, w = Sub(k, "u"), Sub(k, "m"), Sub(k, "w")
    um, mw = SubEdge(k, "um"), SubEdge(k, "mw")
    sign = dict(svn.sign)
    if not split:
        sign[Valence(um, 1)], sign[Valence(um, 2)] = PLUS, MINUS
        sign[Valence(mw, 1)], sign[Valence(mw, 2)] = PLUS, MINUS
    inserts = {}
    for j, tp in enumerate(split):
        lval = tp.first if tp.i in left_idx else tp.second
        a = svn.sign[lval]
        sign[Valence(um, j + 1)] = -a
        sign[Valence(mw, j + 1)] = a
        if tp.trail is not None:
            inserts.setdefault(tp.trail, []).append((tp.position, j))

    def side(eid):
        return u if eid in left else w

    vertices = []
    for x in g.vertices:
        vertices += [u, m, w] if x == v else [x]
    edges = []
    for e in g.edges:
        a = side(e.id) if e.u == v else e.u
        b = side(e.id) if e.v == v else e.v
        edges.append((e.id, a, b))
    edges += [(um, u, m), (mw, m, w)]
    base = Multigraph(vertices, edges)

    witness = []
    for ti, trail in enumerate(svn.witness):
        steps = [Step(s.edge,
                      side(s.edge.edge) if s.tail == v else s.tail,
                      side(s.edge.edge) if s.head == v else s.head) for s in trail.steps]
        for position, j in sorted(inserts.get(ti, []), reverse=True):
            if steps[position].head == u:
                extra = [Step(Valence(um, j + 1), u, m), Step(Valence(mw, j + 1), m, w)]
            else:
                extra = [Step(Valence(mw, j + 1), w, m), Step(Valence(um, j + 1), m, u)]
            steps[position + 1:position + 1] = extra
        witness.append(Walk(tuple(steps)))
    new = SignedValenceNetwork(base, svn.terminals, sign, svn.p, svn.q, tuple(witness))
    s_after = supercubicity(new)
    _require(s_after == s_before - 1, "supercubicity did not drop by one")
    _require((base.degree(u), base.degree(m), base.degree(w)) == (1 + len(left), 2, 1 + len(right)),
             "unexpected degrees after subcubization")
    _require(is_inner_balanced(new), "subcubized signing is not inner balanced")
    _require(count_minus_at_terminals(new) == count_minus_at_terminals(svn),
             "'-' count at terminals changed")
    vg = new.valence_graph
    for tr in witness:
        tr.check_in(vg)
        _require(is_alternating(tr, sign), "rerouted trail does not alternate")
    rec = SubcubizationRecord(k, v, tuple(inc[i].id for i in sorted(left_idx)), tuple(right),
                              len(split), s_before, s_after)
    return new, rec


# ---------------------------------------------------------------- regularization

def classify_case(sign1: int, sign2: int, same_direction: bool) -> int:
    if sign1 != sign2:
        return 1 if same_direction else 2
    return 3 if same_direction else 4


@dataclass(frozen=True)
class Irregular:
    trail: int
    i: int            # position of the first valence of the edge
    j: int            # position of the second one
    edge: object
    case: int

    @property
    def c_length(self) -> int:
        return self.j - self.i - 1


def find_irregular(svn: SignedValenceNetwork, witness) -> Irregular | None:
    """An edge whose two valencies are used by one trail.

    Cases 1-3 come first (lowest trail index, then earliest position); when
    only Case 4 remains the candidate with the shortest fragment is chosen.
    """
    terms = svn.terminal_set
    best13 = best4 = None
    for ti, w in enumerate(witness):
        first: dict = {}
        for pos, s in enumerate(w.steps):
            e = s.edge.edge
            if e not in first:
                first[e] = pos
                continue
            i = first[e]
            a = w.steps[i]
            same = (a.tail, a.head) == (s.tail, s.head)
            case = classify_case(svn.sign[a.edge], svn.sign[s.edge], same)
            edge = svn.base.edge(e)
            _require(edge.u not in terms and edge.v not in terms,
                     f"irregular edge {e} touches a terminal")
            cand = Irregular(ti, i, pos, e, case)
            if case < 4:
                if best13 is None or (ti, i) < (best13.trail, best13.i):
                    best13 = cand
            elif best4 is None or (cand.c_length, ti, i) < (best4.c_length, best4.trail, best4.i):
                best4 = cand
    return best13 if best13 is not None else best4


def apply_case_1_2_3(w: Walk, i: int, j: int, case: int, sign: dict) -> Walk:
    steps = w.steps
    a, c, b = steps[:i], steps[i + 1:j], steps[j + 1:]
    if case == 1:
        mid = tuple(Step(s.edge, s.head, s.tail) for s in reversed(c))
        new = Walk(a + mid + b)
    elif case == 2:
        new = Walk(a + b)
    elif case == 3:
        new = Walk(a + (steps[i],) + b)
    else:
        raise ValueError(f"case {case} is not handled here")
    _require(is_alternating(new, sign), f"case {case} result does not alternate")
    _require(is_trail(new), f"case {case} result repeats a valence")
    _require(len(new) < len(w) and (len(w) - len(new)) % 2 == 0,
             f"case {case} changed parity or did not shorten")
    _require((new.start, new.end) == (w.start, w.end), f"case {case} moved the endpoints")
    return new


def _other_valence(val: Valence) -> Valence:
    return Valence(val.edge, 3 - val.k)


def apply_case_4(svn: SignedValenceNetwork, witness: list, irr: Irregular):
    """Remove the redundant edge next to the fragment and repair the packing."""
    w = witness[irr.trail]
    steps = w.steps
    si, sj = steps[irr.i], steps[irr.j]
    x, y = si.tail, si.head
    _require((sj.tail, sj.head) == (y, x), "case 4 traversals are not opposite")
    s = svn.sign[si.edge]
    _require(svn.sign[sj.edge] == s, "case 4 valencies differ in sign")
    c = steps[irr.i + 1:irr.j]
    _require(len(c) > 0, "empty fragment in case 4")
    g = svn.base
    deg_y = g.degree(y)
    _require(deg_y == 3, f"deg {y} = {deg_y}, expected 3")
    end_signs = (svn.sign[c[0].edge], svn.sign[c[-1].edge])
    _require(end_signs == (-s, -s), "fragment does not start and end with the opposite sign")
    yu, vy = c[0].edge.edge, c[-1].edge.edge
    u, v = g.edge(yu).other(y), g.edge(vy).other(y)
    _require(u != v, "fragment ends share their far vertex")
    options = [(eid, val) for eid, val in ((yu, c[0].edge), (vy, c[-1].edge))
               if svn.sign[_other_valence(val)] == s]
    _require(len(options) >= 1, "no redundant edge found")
    options.sort(key=lambda o: str(o[0]))
    red, e1 = options[0]
    e2 = _other_valence(e1)
    frag = c[1:] if e1 == c[0].edge else c[:-1]
    new_w = Walk(steps[:irr.i] + steps[irr.j + 1:])
    repaired = list(witness)
    repaired[irr.trail] = new_w
    if e2 in {st.edge for st in c}:
        subcase = "ii"
    else:
        holder = next((ti for ti, tr in enumerate(repaired) if e2 in tr.edge_ids), None)
        if holder is None:
            subcase = "i"
        else:
            subcase = "iii" if holder == irr.trail else "iv"
            tr = repaired[holder]
            p = tr.edge_ids.index(e2)
            st = tr.steps[p]
            fw = Walk(tuple(frag))
            if (fw.start, fw.end) != (st.tail, st.head):
                fw = fw.reversed()
            _require((fw.start, fw.end) == (st.tail, st.head), "fragment does not replace e2")
            repaired[holder] = Walk(tr.steps[:p] + fw.steps + tr.steps[p + 1:])
    edge = g.edge(red)
    _require(edge.u not in svn.terminal_set and edge.v not in svn.terminal_set,
             "redundant edge touches a terminal")
    base = Multigraph(g.vertices, [(e.id, e.u, e.v) for e in g.edges if e.id != red])
    sign = {k: val for k, val in svn.sign.items() if k.edge != red}
    new = SignedValenceNetwork(base, svn.terminals, sign, svn.p, svn.q, tuple(repaired))
    _require(is_inner_balanced(new), "signing unbalanced after removing the redundant edge")
    _require(count_minus_at_terminals(new) == count_minus_at_terminals(svn),
             "'-' count at terminals changed in case 4")
    vg = new.valence_graph
    seen: set = set()
    for tr in repaired:
        tr.check_in(vg)
        _require(is_trail(tr) and not seen & set(tr.edge_ids), "repaired packing is not valence-disjoint")
        _require(tr.start in new.terminal_set and tr.end in new.terminal_set and tr.start != tr.end,
                 "repaired trail is not a T-trail")
        seen |= set(tr.edge_ids)
    info = dict(removed=red, subcase=subcase, deg_y=deg_y, edge_sign=s, end_signs=end_signs,
                u=u, v=v)
    return new, repaired, info


def _measure(svn, witness) -> tuple:
    return (len(svn.base.edges), sum(len(w) for w in witness))


def _p_measure(svn, witness) -> tuple:
    return (len(svn.base.edges), sum(len(w) for w in witness if len(w) % 2))


def regularize(svn: SignedValenceNetwork, trace: PipelineTrace | None = None):
    """Odd alternating trails without irregular edges; at least ``p`` of them."""
    odd, even = alternating_packing(svn)
    witness = odd + even
    svn = replace(svn, witness=tuple(witness))
    while True:
        irr = find_irregular(svn, witness)
        if irr is None:
            break
        before = _measure(svn, witness)
        p_before = _p_measure(svn, witness)
        info = {}
        if irr.case < 4:
            witness[irr.trail] = apply_case_1_2_3(witness[irr.trail], irr.i, irr.j, irr.case, svn.sign)
            svn = replace(svn, witness=tuple(witness))
        else:
            svn, repaired, info = apply_case_4(svn, witness, irr)
            odd, even = alternating_packing(svn)
            witness = odd + even
            svn = replace(svn, witness=tuple(witness))
        after = _measure(svn, witness)
        info.update(p_measure_before=p_before, p_measure_after=_p_measure(svn, witness))
        _require(after < before, "regularization measure did not decrease")
        if trace is not None:
            trace.add(RegularizationRecord(irr.case, irr.trail, irr.edge, irr.c_length,
                                           before, after, **info))
    odd = [w for w in witness if len(w) % 2]
    _require(len(odd) >= (svn.p or 0), f"{len(odd)} odd trails, fewer than p = {svn.p}")
    return odd, svn


# ---------------------------------------------------------------- assembly

@dataclass(frozen=True)
class PipelineResult:
    packing: Packing
    p: int
    trace: PipelineTrace

    @property
    def value(self):
        return self.packing.value


def _map_back(w: Walk, subs: list[SubcubizationRecord], n: Network) -> Walk:
    steps = [Step(s.edge.edge, s.tail, s.head) for s in w.steps]
    for rec in reversed(subs):
        names = {Sub(rec.k, "u"), Sub(rec.k, "m"), Sub(rec.k, "w")}
        steps = [Step(s.edge, rec.vertex if s.tail in names else s.tail,
                      rec.vertex if s.head in names else s.head)
                 for s in steps if not (isinstance(s.edge, SubEdge) and s.edge.k == rec.k)]
    _require(isinstance(steps[0].edge, EvacEdge) and isinstance(steps[-1].edge, EvacEdge),
             "trail does not start and end on evacuation edges")
    inner = steps[1:-1]
    _require(not any(isinstance(s.edge, (EvacEdge, SubEdge)) for s in inner),
             "auxiliary edge left inside a trail")
    out = Walk(tuple(inner))
    out.check_in(n.graph)
    return out


def run_pipeline(n: Network, trace: PipelineTrace | None = None) -> PipelineResult:
    """Maximum integer packing of odd T-trails in ``(G, T, 2)``, G inner Eulerian."""
    trace = trace if trace is not None else PipelineTrace()
    check_trail_input(n)
    if len(n.terminals) < 2:
        return PipelineResult(Packing(), 0, trace)
    cc = initial_classify(n)
    svn, rec = terminal_evacuation(cc)
    trace.add(rec)
    k = 0
    while supercubicity(svn) > 0:
        v = next(x for x in svn.base.vertices
                 if x not in svn.terminal_set and svn.base.degree(x) >= 4)
        svn, rec = subcubize_step(svn, k, v)
        trace.add(rec)
        k += 1
    odd, svn = regularize(svn, trace)
    subs = trace.of_kind("subcubization")
    trails = [_map_back(w, subs, n) for w in odd]
    terms = n.terminal_set
    for w in trails:
        _require(len(w) % 2 == 1 and is_trail(w), "mapped trail is not an odd trail")
        _require(w.start in terms and w.end in terms and w.start != w.end,
                 "mapped trail is not a T-trail")
    packing = Packing(tuple(PackingItem(1, w) for w in trails)).normalized()
    report = validate_packing(n, packing)
    _require(report.ok, "trail packing overloads an edge")
    _require(packing.value == cc.p, f"trail packing value {packing.value} differs from p = {cc.p}")
    return PipelineResult(packing, cc.p, trace)
