"""
Stable graphs of type (g, n): connected multigraphs with loops, a genus at
every vertex and n legs, such that 2 g_v - 2 + n_v > 0 everywhere and
g = h_1 + sum g_v.

A graph is stored by vertex: ``genera[v]``, the sorted leg labels ``legs[v]``
(label 0 marks an unlabeled leg) and a sorted tuple of edges ``(u, v)`` with
``u <= v``.  Edge ``i`` owns the half-edges ``2i`` and ``2i + 1``; legs are
numbered after all edge halves.
"""
from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement, permutations, product
from math import factorial
from typing import Iterator, NamedTuple, Optional

import networkx as nx
from networkx.algorithms.isomorphism import MultiGraphMatcher

from .errors import DomainError

log = logging.getLogger(__name__)


class GraphEdge(NamedTuple):
    index: int
    endpoints: tuple[int, int]
    half_edges: tuple[int, int]

    @property
    def is_loop(self) -> bool:
        return self.endpoints[0] == self.endpoints[1]


@dataclass(frozen=True)
class StableGraph:
    genera: tuple[int, ...]
    legs: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.genera) != len(self.legs):
            raise ValueError("genera and legs must have one entry per vertex")
        for u, v in self.edges:
            if not 0 <= u <= v < len(self.genera):
                raise ValueError(f"bad edge {(u, v)}")

    # Basic counts -------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.genera)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_legs(self) -> int:
        return sum(len(ls) for ls in self.legs)

    @property
    def h1(self) -> int:
        return self.n_edges - self.n_vertices + 1

    @property
    def genus(self) -> int:
        return self.h1 + sum(self.genera)

    @property
    def labeled(self) -> bool:
        return all(label > 0 for ls in self.legs for label in ls)

    def loops_at(self, v: int) -> int:
        return sum(1 for a, b in self.edges if a == b == v)

    def valence(self, v: int) -> int:
        ends = sum((a == v) + (b == v) for a, b in self.edges)
        return ends + len(self.legs[v])

    def is_stable(self) -> bool:
        return all(2 * g + self.valence(v) - 2 > 0 for v, g in enumerate(self.genera))

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    # Half-edge structure ------------------------------------------------------

    @cached_property
    def edge_list(self) -> tuple[GraphEdge, ...]:
        return tuple(GraphEdge(i, e, (2 * i, 2 * i + 1)) for i, e in enumerate(self.edges))

    @cached_property
    def half_edges(self) -> tuple[int, ...]:
        return tuple(range(2 * self.n_edges + self.n_legs))

    @cached_property
    def attachment(self) -> dict[int, int]:
        alpha = {}
        for edge in self.edge_list:
            alpha[edge.half_edges[0]], alpha[edge.half_edges[1]] = edge.endpoints
        h = 2 * self.n_edges
        for v, ls in enumerate(self.legs):
            for _ in ls:
                alpha[h] = v
                h += 1
        return alpha

    @cached_property
    def involution(self) -> dict[int, int]:
        iota = {h: h for h in self.half_edges}
        for edge in self.edge_list:
            a, b = edge.half_edges
            iota[a], iota[b] = b, a
        return iota

    @cached_property
    def leg_labels(self) -> dict[int, int]:
        labels = {}
        h = 2 * self.n_edges
        for ls in self.legs:
            for label in ls:
                labels[h] = label
                h += 1
        return labels

    def vertex_arguments(self, v: int) -> list[Optional[int]]:
        """Edge index for every half-edge at v (twice for a loop), None for each leg."""
        args: list[Optional[int]] = []
        for i, (a, b) in enumerate(self.edges):
            if a == v:
                args.append(i)
            if b == v:
                args.append(i)
        args.extend([None] * len(self.legs[v]))
        return args

    # Derived objects ----------------------------------------------------------

    def to_networkx(self) -> nx.MultiGraph:
        G = nx.MultiGraph()
        for v, (g, ls) in enumerate(zip(self.genera, self.legs)):
            G.add_node(v, genus=g, legs=ls)
        G.add_edges_from(self.edges)
        return G

    def forget_labels(self) -> StableGraph:
        return canonical_form(
            StableGraph(self.genera, tuple((0,) * len(ls) for ls in self.legs), self.edges)
        )[0]

    def weight(self) -> Fraction:
        """1/|Aut| for labeled graphs, n!/|Aut'| for leg-blind ones."""
        if self.labeled:
            return Fraction(1, aut_order(self))
        return Fraction(factorial(self.n_legs), aut_order(self))

    def __str__(self) -> str:
        verts = ", ".join(
            f"g{g}" + (f"[{','.join(map(str, ls))}]" if ls else "") for g, ls in zip(self.genera, self.legs)
        )
        return f"({verts}; {' '.join(f'{u}-{v}' for u, v in self.edges)})"


# ---------------------------------------------------------------------------
# Canonical form and automorphisms
# ---------------------------------------------------------------------------

def _adjacency(graph: StableGraph) -> list[Counter]:
    adj = [Counter() for _ in graph.genera]
    for u, v in graph.edges:
        if u != v:
            adj[u][v] += 1
            adj[v][u] += 1
    return adj


def _ranks(signatures: list) -> list[int]:
    order = {sig: r for r, sig in enumerate(sorted(set(signatures)))}
    return [order[s] for s in signatures]


def _colour_classes(graph: StableGraph) -> list[list[int]]:
    """Vertex classes under iterated colour refinement, in rank order."""
    adj = _adjacency(graph)
    ranks = _ranks([
        (g, ls, graph.loops_at(v), sum(adj[v].values()))
        for v, (g, ls) in enumerate(zip(graph.genera, graph.legs))
    ])
    while True:
        refined = _ranks([
            (ranks[v], tuple(sorted((ranks[w], m) for w, m in adj[v].items())))
            for v in range(graph.n_vertices)
        ])
        if len(set(refined)) == len(set(ranks)):
            break
        ranks = refined
    classes = defaultdict(list)
    for v, r in enumerate(ranks):
        classes[r].append(v)
    return [classes[r] for r in sorted(classes)]


def _relabeled_edges(edges, pos) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in edges))


def canonical_form(graph: StableGraph) -> tuple[StableGraph, int]:
    """
    The canonical representative of the isomorphism class of ``graph`` and
    the number of vertex permutations preserving it.
    """
    classes = _colour_classes(graph)
    best = None
    best_order = None
    count = 0
    for perms in product(*(permutations(c) for c in classes)):
        order = [v for block in perms for v in block]
        pos = {v: i for i, v in enumerate(order)}
        edges = _relabeled_edges(graph.edges, pos)
        if best is None or edges < best:
            best, best_order, count = edges, order, 1
        elif edges == best:
            count += 1
    canon = StableGraph(
        tuple(graph.genera[v] for v in best_order),
        tuple(graph.legs[v] for v in best_order),
        best,
    )
    return canon, count


def _encode(canon: StableGraph) -> bytes:
    genera = ",".join(map(str, canon.genera))
    legs = "|".join(",".join(map(str, ls)) for ls in canon.legs)
    edges = ",".join(f"{u}-{v}" for u, v in canon.edges)
    return f"g:{genera};l:{legs};e:{edges}".encode("ascii")


def canonical_encoding(graph: StableGraph) -> bytes:
    return _encode(canonical_form(graph)[0])


def _edge_symmetry(graph: StableGraph) -> int:
    mult = Counter(graph.edges)
    factor = 1
    for (u, v), m in mult.items():
        factor *= factorial(m) * (2 ** m if u == v else 1)
    for ls in graph.legs:
        for m in Counter(ls).values():
            factor *= factorial(m)
    return factor


@lru_cache(maxsize=None)
def aut_order(graph: StableGraph) -> int:
    """
    Order of the automorphism group acting on vertices and half-edges.
    Labeled legs are fixed; unlabeled legs at a vertex may be permuted.
    """
    _, vertex_auts = canonical_form(graph)
    return vertex_auts * _edge_symmetry(graph)


def is_bridge(graph: StableGraph, edge: GraphEdge | int) -> bool:
    if isinstance(edge, int):
        edge = graph.edge_list[edge]
    u, v = edge.endpoints
    if u == v:
        return False
    if graph.edges.count((u, v)) > 1:
        return False
    simple = nx.Graph()
    simple.add_nodes_from(range(graph.n_vertices))
    simple.add_edges_from(e for e in graph.edges if e[0] != e[1])
    return any({a, b} == {u, v} for a, b in nx.bridges(simple))


def to_dot(graph: StableGraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v, g in enumerate(graph.genera):
        lines.append(f'  v{v} [label="g={g}"];')
    leg_no = 0
    for v, ls in enumerate(graph.legs):
        for label in ls:
            text = str(label) if label else ""
            lines.append(f'  leg{leg_no} [shape=plaintext, label="{text}"];')
            lines.append(f"  v{v} -- leg{leg_no};")
            leg_no += 1
    for u, v in graph.edges:
        lines.append(f"  v{u} -- v{v};")
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _check_type(g: int, n: int) -> None:
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise DomainError(f"(g, n) = ({g}, {n}) is not a stable type")


def _trivial_graph(g: int, n: int, labeled: bool) -> StableGraph:
    legs = tuple(range(1, n + 1)) if labeled else (0,) * n
    return StableGraph((g,), (legs,), ())


def _stable_at(genus: int, valence: int) -> bool:
    return 2 * genus - 2 + valence > 0


def _leg_splits(legs: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    counts = sorted(Counter(legs).items())
    for choice in product(*(range(m + 1) for _, m in counts)):
        left = tuple(x for (x, _), c in zip(counts, choice) for _ in range(c))
        right = tuple(x for (x, m), c in zip(counts, choice) for _ in range(m - c))
        yield left, right


def _degenerations(graph: StableGraph) -> Iterator[StableGraph]:
    """All graphs with one more edge that contract back onto ``graph``."""
    V = graph.n_vertices
    for v, gv in enumerate(graph.genera):
        if gv >= 1:
            genera = graph.genera[:v] + (gv - 1,) + graph.genera[v + 1:]
            yield StableGraph(genera, graph.legs, tuple(sorted(graph.edges + ((v, v),))))

        others = [e for e in graph.edges if v not in e]
        ends = [e for e in graph.edges if v in e and e[0] != e[1]]
        loops = [e for e in graph.edges if e == (v, v)]
        for g1 in range(gv + 1):
            g2 = gv - g1
            for sides in product((0, 1), repeat=len(ends)):
                moved = []
                for (a, b), side in zip(ends, sides):
                    w = b if a == v else a
                    moved.append((min(w, V), max(w, V)) if side else (min(w, v), max(w, v)))
                for loop_sides in product((0, 1, 2), repeat=len(loops)):
                    split = [(v, v), (V, V), (v, V)]
                    new_loops = [split[s] for s in loop_sides]
                    val1 = sum(1 - s for s in sides) + sum(2 if s == 0 else s // 2 for s in loop_sides) + 1
                    val2 = sum(sides) + sum(2 if s == 1 else s // 2 for s in loop_sides) + 1
                    for left, right in _leg_splits(graph.legs[v]):
                        if not (_stable_at(g1, val1 + len(left)) and _stable_at(g2, val2 + len(right))):
                            continue
                        genera = graph.genera[:v] + (g1,) + graph.genera[v + 1:] + (g2,)
                        legs = graph.legs[:v] + (left,) + graph.legs[v + 1:] + (right,)
                        edges = tuple(sorted(others + moved + new_loops + [(v, V)]))
                        yield StableGraph(genera, legs, edges)


@lru_cache(maxsize=None)
def _enumerate(g: int, n: int, labeled: bool) -> tuple[StableGraph, ...]:
    root = _trivial_graph(g, n, labeled)
    level = {canonical_encoding(root): root}
    found = dict(level)
    edges = 0
    while level:
        edges += 1
        nxt: dict[bytes, StableGraph] = {}
        for graph in level.values():
            for child in _degenerations(graph):
                canon = canonical_form(child)[0]
                nxt.setdefault(_encode(canon), canon)
        if nxt:
            log.debug("(g, n) = (%d, %d): %d graphs with %d edges", g, n, len(nxt), edges)
        found.update(nxt)
        level = nxt
    graphs = tuple(found[k] for k in sorted(found, key=lambda k: (found[k].n_edges, k)))
    log.info("enumerated %d %s stable graphs of type (%d, %d)",
             len(graphs), "labeled" if labeled else "leg-blind", g, n)
    return graphs


def enumerate_stable_graphs(g: int, n: int, labeled: bool = True) -> tuple[StableGraph, ...]:
    """
    One representative per isomorphism class, ordered by edge count and then
    by canonical encoding.  With ``labeled=False`` the legs carry no labels
    and every class stands for n!/|Aut'| labeled graphs (see StableGraph.weight).
    """
    _check_type(g, n)
    return _enumerate(g, n, labeled)


def one_edge_graphs(g: int, n: int, labeled: bool = True) -> tuple[StableGraph, ...]:
    return tuple(G for G in enumerate_stable_graphs(g, n, labeled) if G.n_edges == 1)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def _node_match(a: dict, b: dict) -> bool:
    return a["genus"] == b["genus"] and a["legs"] == b["legs"]


def naive_aut_order(graph: StableGraph) -> int:
    G = graph.to_networkx()
    vertex_auts = sum(1 for _ in MultiGraphMatcher(G, G, node_match=_node_match).isomorphisms_iter())
    return vertex_auts * _edge_symmetry(graph)


def enumerate_stable_graphs_naive(g: int, n: int) -> list[StableGraph]:
    """
    Generate every decorated multigraph with labeled legs, keep the connected
    stable ones of type (g, n) and reduce by pairwise isomorphism tests.
    """
    _check_type(g, n)
    reps: list[tuple[StableGraph, nx.MultiGraph]] = []
    for V in range(1, 2 * g - 2 + n + 1):
        pairs = [(u, v) for u in range(V) for v in range(u, V)]
        for genera in combinations_with_replacement(range(g + 1), V):
            E = g - sum(genera) + V - 1
            if E < 0:
                continue
            for edges in combinations_with_replacement(pairs, E):
                for where in product(range(V), repeat=n):
                    legs = tuple(
                        tuple(label for label, w in zip(range(1, n + 1), where) if w == v) for v in range(V)
                    )
                    graph = StableGraph(tuple(genera), legs, tuple(edges))
                    if not graph.is_stable() or not graph.is_connected():
                        continue
                    G = graph.to_networkx()
                    if any(nx.is_isomorphic(G, H, node_match=_node_match) for _, H in reps):
                        continue
                    reps.append((graph, G))
    return [graph for graph, _ in reps]


# ---------------------------------------------------------------------------
# Named graphs and parsing
# ---------------------------------------------------------------------------

def one_loop_graph(g: int) -> StableGraph:
    """A single vertex of genus g - 1 with one loop (no legs)."""
    if g < 2:
        raise DomainError(f"the one-loop graph without legs needs g >= 2, got {g}")
    return StableGraph((g - 1,), ((),), ((0, 0),))


def separating_graph(g1: int, g2: int) -> StableGraph:
    """Vertices of genus g1 and g2 joined by a single edge (no legs)."""
    if g1 < 1 or g2 < 1:
        raise DomainError(f"both sides of a separating curve need positive genus, got ({g1}, {g2})")
    return canonical_form(StableGraph((g1, g2), ((), ()), ((0, 1),)))[0]


def graph_from_encoding(encoding: bytes | str) -> StableGraph:
    """Inverse of canonical_encoding.  Unstable or disconnected graphs are rejected."""
    text = encoding.decode("ascii", errors="replace") if isinstance(encoding, bytes) else encoding
    try:
        fields = dict(part.split(":", 1) for part in text.split(";"))
        genera = tuple(int(x) for x in fields["g"].split(","))
        legs = tuple(tuple(int(x) for x in block.split(",")) if block else () for block in fields["l"].split("|"))
        edges = tuple(
            tuple(int(x) for x in pair.split("-")) for pair in fields["e"].split(",") if pair
        )
        graph = StableGraph(genera, legs, edges)
    except (KeyError, ValueError) as exc:
        raise DomainError(f"malformed graph encoding {text!r}") from exc
    if any(g < 0 for g in genera):
        raise DomainError(f"negative vertex genus in {text!r}")
    if not graph.is_stable():
        raise DomainError(f"graph {text!r} is not stable")
    if not graph.is_connected():
        raise DomainError(f"graph {text!r} is not connected")
    return graph
