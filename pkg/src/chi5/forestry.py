"""Growing, thinning and minimising refutation trees."""

from __future__ import annotations

import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .certificates import (BRANCH, END, ROOT, STEM, Diagram, DiagramNode,
                           renumber, verify_diagram)
from .coloring import COLORS, RootColoringClass, is_proper

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))


class GrowthExhausted(RuntimeError):
    """Some path coloured the whole working graph; carries that colouring."""

    def __init__(self, coloring):
        super().__init__(f"working graph is 4-colourable from this root ({len(coloring)} vertices)")
        self.coloring = coloring


class NodeCapHit(RuntimeError):
    pass


class BaseGraphInsufficient(RuntimeError):
    pass


@dataclass(frozen=True)
class TreeRecord:
    current_node: int
    next_node: int  # 0 after an End
    vertex: int
    color: int  # 0 for an End


@dataclass(frozen=True)
class GrowthPolicy:
    vertex_order: tuple[int, ...] | None = None  # working-graph ids; None = id order
    tie_break: str = "max-degree"  # or "first-index"
    seed: int = 0
    node_cap: int | None = None


@dataclass
class GrowResult:
    diagram: Diagram
    log: list[TreeRecord]


def root_ids(g, root: RootColoringClass) -> dict[int, int]:
    """Working-graph id -> colour for the root class."""
    out = {}
    for v, c in root.points().items():
        i = g.get_id(v)
        if i is None:
            raise ValueError(f"root vertex {v} of {root.label} is not in {g.name}")
        out[i] = c
    return out


def _root_nodes(root: RootColoringClass):
    return [DiagramNode(k, v, ROOT, out_color=c)
            for k, (v, c) in enumerate(root.points().items(), start=1)]


def grow_with_log(g, root: RootColoringClass, policy: GrowthPolicy = GrowthPolicy(),
                  name: str | None = None) -> GrowResult:
    """Depth-first tree: always colour the first uncoloured vertex with the
    fewest allowed colours, trying its colours in ascending order."""
    rc = root_ids(g, root)
    if not is_proper(g, rc):
        raise ValueError(f"root colouring {root.label} is not proper on {g.name}")
    order = list(policy.vertex_order) if policy.vertex_order is not None else list(g.ids)
    if sorted(order) != sorted(g.ids):
        raise ValueError("vertex_order must be a permutation of the working graph ids")
    rank = {v: k for k, v in enumerate(order)}
    if policy.tie_break == "max-degree":
        scan = sorted(g.ids, key=lambda v: (-g.degree(v), rank[v]))
    elif policy.tie_break == "first-index":
        scan = order
    else:
        raise ValueError(f"unknown tie_break {policy.tie_break!r}")
    nbrs = {v: tuple(g.neighbors(v)) for v in g.ids}

    nodes = _root_nodes(root)
    color = dict.fromkeys(g.ids, 0)
    node_at: dict[int, int] = {}
    for n in nodes:
        i = g.id_of(n.vertex)
        color[i] = n.out_color
        node_at[i] = n.ordinal
    n_roots = len(nodes)
    cap = policy.node_cap
    log: list[TreeRecord] = []

    def pick():
        best, bk = None, 5
        for v in scan:
            if color[v]:
                continue
            k = 4 - len({color[w] for w in nbrs[v]} - {0})
            if k < bk:
                best, bk = v, k
                if k == 0:
                    break
        return best

    def rec(parent: int, via):
        v = pick()
        if v is None:
            raise GrowthExhausted({g.vertex(u): c for u, c in color.items()})
        o = len(nodes) + 1
        if cap is not None and o - n_roots > cap:
            raise NodeCapHit(f"more than {cap} non-root nodes")
        ports: dict[int, list[int]] = {}
        for w in nbrs[v]:
            if color[w]:
                ports.setdefault(color[w], []).append(node_at[w])
        ports = {c: tuple(sorted(js)) for c, js in sorted(ports.items())}
        free = [c for c in COLORS if c not in ports]
        kind = END if not free else STEM if len(free) == 1 else BRANCH
        node = DiagramNode(o, g.vertex(v), kind, parent, ports,
                           free[0] if kind == STEM else None, via)
        nodes.append(node)
        if kind == END:
            log.append(TreeRecord(o, 0, v, 0))
            return
        node_at[v] = o
        for c in free:
            color[v] = c
            log.append(TreeRecord(o, len(nodes) + 1, v, c))
            rec(o, c if kind == BRANCH else None)
        color[v] = 0
        del node_at[v]

    rec(n_roots, None)
    d = Diagram(name or f"grow-{root.label}", root.label, nodes, root)
    return GrowResult(d, log)


def grow(g, root: RootColoringClass, policy: GrowthPolicy = GrowthPolicy(), name=None) -> Diagram:
    return grow_with_log(g, root, policy, name).diagram


def replay(g, root: RootColoringClass, log: list[TreeRecord], name: str | None = None) -> Diagram:
    """Rebuild a grown diagram from its record log alone."""
    nodes = _root_nodes(root)
    n_roots = len(nodes)
    color = {g.id_of(n.vertex): n.out_color for n in nodes}
    node_at = {g.id_of(n.vertex): n.ordinal for n in nodes}
    passes: dict[int, list[TreeRecord]] = {}
    for r in log:
        passes.setdefault(r.current_node, []).append(r)
    parent_of = {n_roots + 1: (n_roots, None)}
    for o, recs in passes.items():
        branch = len(recs) > 1
        for r in recs:
            if r.next_node:
                parent_of[r.next_node] = (o, r.color if branch else None)

    def rec(o: int):
        recs = passes[o]
        v = recs[0].vertex
        ports: dict[int, list[int]] = {}
        for w in g.neighbors(v):
            if color.get(w):
                ports.setdefault(color[w], []).append(node_at[w])
        ports = {c: tuple(sorted(js)) for c, js in sorted(ports.items())}
        parent, via = parent_of[o]
        if recs[0].color == 0:
            kind, out = END, None
        elif len(recs) == 1:
            kind, out = STEM, recs[0].color
        else:
            kind, out = BRANCH, None
        nodes.append(DiagramNode(o, g.vertex(v), kind, parent, ports, out, via))
        if kind == END:
            return
        node_at[v] = o
        for r in recs:
            color[v] = r.color
            rec(r.next_node)
        del color[v], node_at[v]

    rec(n_roots + 1)
    nodes.sort(key=lambda n: n.ordinal)
    return Diagram(name or f"grow-{root.label}", root.label, nodes, root)


# ------------------------------------------------------------------ thinning

NECESSARY, UNDEFINED, REDUNDANT = "necessary", "undefined", "redundant"


def thin_status(d: Diagram) -> dict[int, str]:
    """Status of each removable (stem) node from the port citations."""
    cites: dict[int, list[tuple[int, ...]]] = {}
    for n in d.nodes:
        for js in n.ports.values():
            for j in js:
                cites.setdefault(j, []).append(js)
    out = {}
    for n in d.nodes:
        if n.kind != STEM:
            continue
        cs = cites.get(n.ordinal, [])
        if not cs:
            out[n.ordinal] = REDUNDANT
        elif any(len(js) == 1 for js in cs):
            out[n.ordinal] = NECESSARY
        else:
            out[n.ordinal] = UNDEFINED
    return out


def _drop(nodes: dict[int, DiagramNode], o: int):
    gone = nodes.pop(o)
    for n in nodes.values():
        if n.parent == o:
            n.parent, n.via = gone.parent, gone.via
        for c, js in list(n.ports.items()):
            if o in js:
                n.ports[c] = tuple(j for j in js if j != o)


def thin(d: Diagram, check: bool = True) -> Diagram:
    """Remove stems nobody needs, then collapse each port to one justifier.

    Root, Branch and End nodes are kept.  Uncited stems go first; then stems
    whose every citation has an alternative are removed one at a time, fewest
    citations first and later ordinals first on ties.
    """
    if check:
        rep = verify_diagram(None, d)
        if not rep.accepted:
            raise ValueError(f"cannot thin a rejected diagram: {rep.failures[:5]}")
    nodes = {n.ordinal: replace(n, ports=dict(n.ports)) for n in d.nodes}

    def sweep():
        while True:
            cur = Diagram(d.name, d.root_label, list(nodes.values()), d.root_class)
            st = thin_status(cur)
            red = [o for o, s in st.items() if s == REDUNDANT]
            if red:
                for o in red:
                    _drop(nodes, o)
                continue
            und = [o for o, s in st.items() if s == UNDEFINED]
            if not und:
                return
            n_cites = {o: 0 for o in und}
            for n in nodes.values():
                for js in n.ports.values():
                    for j in js:
                        if j in n_cites:
                            n_cites[j] += 1
            _drop(nodes, min(und, key=lambda o: (n_cites[o], -o)))

    sweep()
    for n in nodes.values():
        n.ports = {c: (min(js),) for c, js in n.ports.items() if js}
    sweep()
    out = renumber(d, [nodes[o] for o in sorted(nodes)])
    if check:
        rep = verify_diagram(None, out)
        if not rep.accepted:
            raise AssertionError(f"thinning broke the diagram: {rep.failures[:5]}")
    return out


# ---------------------------------------------------------- quick refutation

# allowed colours and their count for each 5-bit "blocked" mask (bit c = colour c taken)
_ALLOWED = tuple(tuple(c for c in COLORS if not m >> c & 1) for m in range(32))
_ALL_BLOCKED = 0b11110


def quick_refute(root: RootColoringClass, base, cap: int = 8, name: str | None = None):
    """Smallest-found tree with at most ``cap`` non-root nodes, or None.

    Exhaustive over which frontier vertex to colour next (frontier = uncoloured
    vertices next to a coloured one), with memoised failures and a
    best-so-far bound; not a greedy choice.
    """
    rc = root_ids(base, root)
    if not is_proper(base, rc):
        raise ValueError(f"root colouring {root.label} is not proper")
    n = len(base) + 1
    nbrs = [()] + [tuple(base.neighbors(v)) for v in base.ids]
    deg = [len(x) for x in nbrs]
    color = [0] * n
    blocked = [0] * n
    for v, c in rc.items():
        color[v] = c
    for v, c in rc.items():
        for w in nbrs[v]:
            blocked[w] |= 1 << c

    assigned: list[tuple[int, int]] = []
    memo: dict[frozenset, int] = {}

    def search(budget: int, frontier: list[int]):
        # returns (cost, tree) or None when nothing fits in budget
        key = frozenset(assigned)
        if memo.get(key, -1) >= budget:
            return None
        single = {}
        for v in frontier:
            a = _ALLOWED[blocked[v]]
            if len(a) == 1:
                single[v] = a[0]
        for s, c in single.items():
            for w in nbrs[s]:
                if single.get(w) == c:
                    return 2, ("node", s, ((c, ("end", w)),))
        if budget < 3:
            memo[key] = max(memo.get(key, -1), budget)
            return None
        cands = sorted((len(_ALLOWED[blocked[v]]) + 1, -deg[v], v) for v in frontier)
        best = None
        for k, _, v in cands:
            lim = (best[0] - 1 if best else budget) - 1
            if k - 1 > lim:
                break
            cols = _ALLOWED[blocked[v]]
            total, subs = 0, []
            for j, c in enumerate(cols):
                rem = lim - total - (len(cols) - 1 - j)
                color[v] = c
                assigned.append((v, c))
                saved = [(w, blocked[w]) for w in nbrs[v]]
                end = None
                bit = 1 << c
                for w in nbrs[v]:
                    blocked[w] |= bit
                    if end is None and not color[w] and blocked[w] == _ALL_BLOCKED:
                        end = w
                if end is not None:
                    r = (1, ("end", end))
                elif rem < 2:
                    r = None
                else:
                    seen = set(frontier)
                    nf = [x for x in frontier if x != v]
                    nf += [w for w in nbrs[v] if not color[w] and w not in seen]
                    r = search(rem, nf)
                for w, b in saved:
                    blocked[w] = b
                color[v] = 0
                assigned.pop()
                if r is None:
                    break
                total += r[0]
                subs.append((c, r[1]))
            else:
                best = (1 + total, ("node", v, tuple(subs)))
        if best is None:
            memo[key] = max(memo.get(key, -1), budget)
        return best

    frontier = [v for v in base.ids if not color[v] and blocked[v]]
    for v in frontier:
        if blocked[v] == _ALL_BLOCKED:
            found = (1, ("end", v))
            break
    else:
        found = search(cap, frontier) if cap >= 1 else None
    if found is None or found[0] > cap:
        return None
    return tree_to_diagram(base, root, found[1], name or f"quick-{root.label}")


def tree_to_diagram(g, root: RootColoringClass, tree, name: str) -> Diagram:
    """Turn a nested ("node", v, ((colour, subtree), ...)) / ("end", v) tree into a
    diagram whose ports cite every coloured neighbour."""
    nodes = _root_nodes(root)
    color = {g.id_of(n.vertex): n.out_color for n in nodes}
    node_at = {g.id_of(n.vertex): n.ordinal for n in nodes}

    def rec(t, parent, via):
        v = t[1]
        ports: dict[int, list[int]] = {}
        for w in g.neighbors(v):
            if color.get(w):
                ports.setdefault(color[w], []).append(node_at[w])
        ports = {c: tuple(sorted(js)) for c, js in sorted(ports.items())}
        o = len(nodes) + 1
        if t[0] == "end":
            nodes.append(DiagramNode(o, g.vertex(v), END, parent, ports, None, via))
            return
        subs = t[2]
        kind = STEM if len(subs) == 1 else BRANCH
        nodes.append(DiagramNode(o, g.vertex(v), kind, parent, ports,
                                 subs[0][0] if kind == STEM else None, via))
        node_at[v] = o
        for c, sub in subs:
            color[v] = c
            rec(sub, o, c if kind == BRANCH else None)
        del color[v], node_at[v]

    rec(tree, len(nodes), None)
    return Diagram(name, root.label, nodes, root)


# -------------------------------------------------------------- minimisation

@dataclass(frozen=True)
class MinimizeBudget:
    restarts: int = 4
    mutations_per_round: int = 4
    working_subgraph_sizes: tuple[int, ...] = (200, 300, 481)
    seed: int = 0
    max_rounds: int = 3
    node_cap: int = 5000


@dataclass(frozen=True)
class Candidate:
    orbits: tuple[int, ...]  # orbit indices forming the working graph
    order: tuple[int, ...]  # base ids, working-graph vertices only
    tie_break: str


@dataclass
class MinimizeLog:
    restart_nodes: list = field(default_factory=list)  # node count or None per restart
    best_by_round: list = field(default_factory=list)

    def summary(self) -> str:
        rs = " ".join("-" if x is None else str(x) for x in self.restart_nodes)
        return f"restarts [{rs}] best by round {self.best_by_round}"


def orbit_index(base) -> dict[int, int]:
    reps = sorted({base.orbit_of[v] for v in base.ids})
    pos = {r: k for k, r in enumerate(reps)}
    return {v: pos[base.orbit_of[v]] for v in base.ids}


def _orbit_members(base) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for v, k in orbit_index(base).items():
        out.setdefault(k, []).append(v)
    return out


def _sample_candidate(base, root, size: int, rng: random.Random) -> Candidate:
    oi = orbit_index(base)
    members = _orbit_members(base)
    need = sorted({oi[v] for v in root_ids(base, root)})
    chosen = list(need)
    total = sum(len(members[k]) for k in chosen)
    rest = [k for k in sorted(members) if k not in need]
    rng.shuffle(rest)
    for k in rest:
        if total + len(members[k]) <= size:
            chosen.append(k)
            total += len(members[k])
    ids = [v for k in chosen for v in members[k]]
    rng.shuffle(ids)
    return Candidate(tuple(sorted(chosen)), tuple(ids), rng.choice(("max-degree", "first-index")))


def _default_candidate(base) -> Candidate:
    oi = orbit_index(base)
    return Candidate(tuple(sorted(set(oi.values()))), tuple(base.ids), "max-degree")


def _mutate_candidate(base, root, cand: Candidate, rng: random.Random) -> Candidate:
    members = _orbit_members(base)
    oi = orbit_index(base)
    order = list(cand.order)
    move = rng.randrange(3)
    if move == 0:
        for _ in range(rng.randint(1, 8)):
            i, j = rng.randrange(len(order)), rng.randrange(len(order))
            order[i], order[j] = order[j], order[i]
        return replace(cand, order=tuple(order))
    if move == 1:
        return replace(cand, tie_break="first-index" if cand.tie_break == "max-degree" else "max-degree")
    need = {oi[v] for v in root_ids(base, root)}
    inside = [k for k in cand.orbits if k not in need]
    outside = [k for k in sorted(members) if k not in cand.orbits]
    if outside and (not inside or rng.random() < 0.5):
        k = rng.choice(outside)
        add = list(members[k])
        rng.shuffle(add)
        for v in add:
            order.insert(rng.randrange(len(order) + 1), v)
        return Candidate(tuple(sorted(cand.orbits + (k,))), tuple(order), cand.tie_break)
    if inside:
        k = rng.choice(inside)
        return Candidate(tuple(x for x in cand.orbits if x != k),
                         tuple(v for v in order if oi[v] != k), cand.tie_break)
    return cand


def evaluate_candidate(base, root: RootColoringClass, cand: Candidate, node_cap: int | None):
    """grow + thin on the candidate's working graph; None if it does not refute."""
    sub = base.subgraph(sorted(cand.order), name=f"{base.name}-work")
    order = tuple(sub.id_of(base.vertex(v)) for v in cand.order)
    try:
        d = grow(sub, root, GrowthPolicy(order, cand.tie_break, 0, node_cap))
    except (GrowthExhausted, NodeCapHit):
        return None
    return thin(d)


def _eval_job(args):
    base, root, cand, cap = args
    d = evaluate_candidate(base, root, cand, cap)
    return None if d is None else (len(d.nodes), d)


def minimize(root: RootColoringClass, base, budget: MinimizeBudget = MinimizeBudget(),
             jobs: int = 1, name: str | None = None):
    """Best (fewest nodes) thinned diagram over restarts and mutation rounds.

    Restart 0 is the plain grow on the whole base graph; later restarts and
    every mutation draw their own generator from (seed, index), so the result
    does not depend on ``jobs``.
    """
    cands = []
    for i in range(budget.restarts):
        if i == 0:
            cands.append(_default_candidate(base))
        else:
            rng = random.Random(f"{budget.seed}:restart:{i}")
            size = budget.working_subgraph_sizes[i % len(budget.working_subgraph_sizes)]
            cands.append(_sample_candidate(base, root, size, rng))

    def run(batch):
        args = [(base, root, c, budget.node_cap) for c in batch]
        if jobs > 1 and len(batch) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                return list(ex.map(_eval_job, args))
        return [_eval_job(a) for a in args]

    log = MinimizeLog()
    results = run(cands)
    log.restart_nodes = [None if r is None else r[0] for r in results]
    best = None
    for c, r in zip(cands, results):
        if r is not None and (best is None or r[0] < best[0]):
            best = (r[0], r[1], c)
    if best is None:
        raise BaseGraphInsufficient(f"base graph insufficient for this root class ({root.label})")
    log.best_by_round.append(best[0])
    for rnd in range(budget.max_rounds if budget.mutations_per_round else 0):
        muts = [_mutate_candidate(base, root, best[2], random.Random(f"{budget.seed}:round:{rnd}:cand:{m}"))
                for m in range(budget.mutations_per_round)]
        improved = False
        for c, r in zip(muts, run(muts)):
            if r is not None and r[0] < best[0]:
                best = (r[0], r[1], c)
                improved = True
        log.best_by_round.append(best[0])
        if not improved:
            break
    d = best[1]
    d.name = name or f"min-{root.label}"
    return d, log

