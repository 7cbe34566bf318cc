"""Trees labeled by oriented separations, and families of stars.

An *S-tree* is a finite tree together with a labeling of its oriented edges
by members of a separation system, commuting with the involution: the label
of ``(u, v)`` reversed is the label of ``(v, u)``.  The oriented edges of a
tree are partially ordered: ``(x, y) < (u, v)`` iff the edges differ and the
path from ``x`` to ``v`` traverses first ``x→y`` and last ``u→v``.

The *star at a node* ``t`` is the label set of its incoming edges.  A tree is
*over* a family when every node's star belongs to it.  Surgery operations
(pruning to irredundancy, contracting to tightness, deleting leaves) return
new trees and never mutate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

from .core import OrientedSep, SeparationSystem, Universe, is_star
from .errors import (
    AlphaImageOutsideS,
    AlphaNotInvolutive,
    FNotStars,
    InternalInvariant,
    MalformedInput,
    RootLabelTrivial,
)


def _star_ids(sigma) -> frozenset[int]:
    return frozenset(
        s.id if isinstance(s, OrientedSep) else int(s) for s in sigma
    )


def star_sort_key(sigma: frozenset[int]) -> tuple:
    return (len(sigma), tuple(sorted(sigma)))


class StarFamily:
    """A canonicalized set of stars, each a set of element ids of one universe."""

    def __init__(self, universe: Universe, stars: Iterable, *, validate: bool = True):
        self.universe = universe
        self.stars: frozenset[frozenset[int]] = frozenset(
            _star_ids(sigma) for sigma in stars
        )
        if validate:
            for sigma in self.sorted_stars:
                if not is_star(universe.sep(i) for i in sigma):
                    raise FNotStars(sigma)

    @cached_property
    def sorted_stars(self) -> tuple[frozenset[int], ...]:
        return tuple(sorted(self.stars, key=star_sort_key))

    def __iter__(self):
        return iter(self.sorted_stars)

    def __len__(self) -> int:
        return len(self.stars)

    def __contains__(self, sigma) -> bool:
        return _star_ids(sigma) in self.stars

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StarFamily)
            and other.universe is self.universe
            and other.stars == self.stars
        )

    def __hash__(self) -> int:
        return hash((id(self.universe), self.stars))

    def with_star(self, sigma) -> "StarFamily":
        ids = _star_ids(sigma)
        if not is_star(self.universe.sep(i) for i in ids):
            raise FNotStars(ids)
        out = StarFamily(self.universe, (), validate=False)
        out.stars = self.stars | {ids}
        return out

    def restricted_to(self, system: SeparationSystem) -> "StarFamily":
        """The sub-family of stars lying entirely inside the system."""
        out = StarFamily(self.universe, (), validate=False)
        out.stars = frozenset(
            sigma for sigma in self.stars if sigma <= system.member_ids
        )
        return out

    def forces(self, sep: OrientedSep) -> bool:
        """True iff the family contains the singleton star of ``sep``'s inverse."""
        return frozenset((sep.universe.inv_id(sep.id),)) in self.stars

    def forced_ids(self, system: SeparationSystem) -> frozenset[int]:
        """All member orientations whose inverse forms a singleton star here."""
        u = self.universe
        return frozenset(
            u.inv_id(next(iter(sigma)))
            for sigma in self.stars
            if len(sigma) == 1 and u.inv_id(next(iter(sigma))) in system.member_ids
        )

    def missing_standard(self, system: SeparationSystem) -> tuple[int, ...]:
        """Trivial orientations of the system that the family fails to force."""
        u = self.universe
        return tuple(
            r
            for r in sorted(system.trivial_ids)
            if frozenset((u.inv_id(r),)) not in self.stars
        )

    def is_standard_for(self, system: SeparationSystem) -> bool:
        return not self.missing_standard(system)

    def to_json_dict(self) -> dict:
        return {"stars": [sorted(sigma) for sigma in self.sorted_stars]}

    @classmethod
    def from_json_dict(cls, universe: Universe, d: dict) -> "StarFamily":
        if "stars" not in d or not isinstance(d["stars"], list):
            raise MalformedInput("family JSON needs a 'stars' list")
        stars = []
        for sigma in d["stars"]:
            ids = [int(i) for i in sigma]
            for i in ids:
                if not 0 <= i < len(universe):
                    raise MalformedInput(f"star element {i} outside the universe")
            stars.append(ids)
        return cls(universe, stars)

    def __repr__(self) -> str:
        return f"<family of {len(self)} stars>"


class STree:
    """An immutable tree with separation-labeled oriented edges."""

    def __init__(
        self,
        system: SeparationSystem,
        edges: Iterable[tuple[int, int]],
        alpha: dict,
        *,
        nodes: Optional[Iterable[int]] = None,
        root_leaf: Optional[int] = None,
    ):
        edge_set = {(int(u), int(v)) for u, v in edges}
        for u, v in list(edge_set):
            if u == v:
                raise MalformedInput(f"self-loop at node {u}")
            edge_set.discard((max(u, v), min(u, v)))
            edge_set.add((min(u, v), max(u, v)))
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(edge_set))

        node_set = {int(n) for n in nodes} if nodes is not None else set()
        for u, v in self.edges:
            node_set.update((u, v))
        if not node_set:
            raise MalformedInput("a tree needs at least one node")
        self.nodes: tuple[int, ...] = tuple(sorted(node_set))

        adj: dict[int, list[int]] = {n: [] for n in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adj: dict[int, tuple[int, ...]] = {
            n: tuple(sorted(ws)) for n, ws in adj.items()
        }
        self._check_is_tree()

        self.system = system
        self.alpha: dict[tuple[int, int], int] = self._normalize_alpha(alpha)

        self.root_leaf = int(root_leaf) if root_leaf is not None else None
        if self.root_leaf is not None:
            if self.root_leaf not in self.adj:
                raise MalformedInput(f"root leaf {self.root_leaf} is not a node")
            if len(self.adj[self.root_leaf]) > 1:
                raise MalformedInput(f"root {self.root_leaf} is not a leaf")

    def _check_is_tree(self) -> None:
        if len(self.edges) != len(self.nodes) - 1:
            raise MalformedInput(
                f"{len(self.nodes)} nodes need {len(self.nodes) - 1} edges to"
                f" form a tree, got {len(self.edges)}"
            )
        seen = {self.nodes[0]}
        frontier = [self.nodes[0]]
        while frontier:
            nxt = []
            for n in frontier:
                for w in self.adj[n]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        if len(seen) != len(self.nodes):
            raise MalformedInput("edge set is not connected")

    def _normalize_alpha(self, alpha: dict) -> dict[tuple[int, int], int]:
        u_inv = self.system.universe.inv_id
        out: dict[tuple[int, int], int] = {}
        for key, val in alpha.items():
            u, v = (int(x) for x in key)
            out[(u, v)] = val.id if isinstance(val, OrientedSep) else int(val)
        for u, v in self.edges:
            fwd, bwd = out.get((u, v)), out.get((v, u))
            if fwd is None and bwd is None:
                raise MalformedInput(f"edge ({u}, {v}) has no label")
            if fwd is None:
                out[(u, v)] = u_inv(bwd)
            elif bwd is None:
                out[(v, u)] = u_inv(fwd)
            elif u_inv(fwd) != bwd:
                raise AlphaNotInvolutive((u, v), fwd, bwd)
        edge_set = set(self.edges)
        for (u, v), label in sorted(out.items()):
            if (min(u, v), max(u, v)) not in edge_set:
                raise MalformedInput(f"label on ({u}, {v}), which is not an edge")
            if label not in self.system.member_ids:
                raise AlphaImageOutsideS((u, v), label)
        return out

    # -- basic queries ---------------------------------------------------

    def label(self, u: int, v: int) -> OrientedSep:
        """The separation labeling the oriented edge (u, v)."""
        return self.system.universe.sep(self.alpha[(u, v)])

    def node_star(self, t: int) -> frozenset[int]:
        """Label set of the edges pointing at ``t``."""
        return frozenset(self.alpha[(w, t)] for w in self.adj[t])

    def leaves(self) -> tuple[int, ...]:
        return tuple(n for n in self.nodes if len(self.adj[n]) == 1)

    def oriented_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.alpha))

    def path(self, a: int, b: int) -> tuple[int, ...]:
        """The unique a–b path, as a node sequence."""
        parent = {a: None}
        frontier = [a]
        while frontier and b not in parent:
            nxt = []
            for n in frontier:
                for w in self.adj[n]:
                    if w not in parent:
                        parent[w] = n
                        nxt.append(w)
            frontier = nxt
        out = [b]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return tuple(reversed(out))

    def edge_leq(self, e: tuple[int, int], f: tuple[int, int]) -> bool:
        """Natural partial order on oriented edges."""
        if {e[0], e[1]} == {f[0], f[1]}:
            return e == f
        p = self.path(e[0], f[1])
        return len(p) >= 2 and p[1] == e[1] and p[-2] == f[0]

    def component_nodes(self, start: int, cut: Iterable[tuple[int, int]]) -> frozenset[int]:
        """Nodes reachable from ``start`` without crossing the cut edges."""
        banned = set()
        for u, v in cut:
            banned.add((u, v))
            banned.add((v, u))
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for n in frontier:
                for w in self.adj[n]:
                    if (n, w) not in banned and w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return frozenset(seen)

    # -- derived trees -----------------------------------------------------

    def without_nodes(self, drop: Iterable[int], *, root_leaf=None) -> "STree":
        dropped = set(drop)
        kept = [n for n in self.nodes if n not in dropped]
        edges = [(u, v) for u, v in self.edges if u not in dropped and v not in dropped]
        alpha = {
            (u, v): lab
            for (u, v), lab in self.alpha.items()
            if u not in dropped and v not in dropped
        }
        keep_root = root_leaf if root_leaf is not None else self.root_leaf
        if keep_root in dropped:
            keep_root = None
        return STree(self.system, edges, alpha, nodes=kept, root_leaf=keep_root)

    def _key(self) -> tuple:
        return (
            id(self.system),
            self.nodes,
            self.edges,
            tuple(sorted(self.alpha.items())),
            self.root_leaf,
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, STree) and other._key() == self._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"<stree on {len(self.nodes)} nodes>"

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        d = {
            "nodes": list(self.nodes),
            "edges": [[u, v] for u, v in self.edges],
            "alpha": {f"{u}->{v}": lab for (u, v), lab in sorted(self.alpha.items())},
        }
        if self.root_leaf is not None:
            d["root_leaf"] = self.root_leaf
        return d

    @classmethod
    def from_json_dict(cls, system: SeparationSystem, d: dict) -> "STree":
        try:
            nodes = [int(n) for n in d["nodes"]]
            edges = [(int(u), int(v)) for u, v in d.get("edges", [])]
            alpha = {}
            for key, val in d.get("alpha", {}).items():
                u, _, v = key.partition("->")
                alpha[(int(u), int(v))] = int(val)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad tree JSON: {exc}") from exc
        return cls(
            system, edges, alpha, nodes=nodes, root_leaf=d.get("root_leaf")
        )

    def to_dot(self) -> str:
        lines = ["graph stree {"]
        for n in self.nodes:
            shape = "doublecircle" if n == self.root_leaf else "circle"
            lines.append(f'  {n} [shape={shape}];')
        for u, v in self.edges:
            lines.append(
                f'  {u} -- {v} [label="{self.alpha[(u, v)]}/{self.alpha[(v, u)]}"];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


# --- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class STreeReport:
    is_stree: bool
    is_over_stars: bool
    is_irredundant: bool
    is_tight: bool
    is_order_respecting: bool
    is_essential: bool
    over_family: Optional[bool]
    problems: tuple[str, ...]


def _redundant_triple(tree: STree) -> Optional[tuple[int, int, int]]:
    """Least (node, n1, n2) with two incoming edges sharing a label."""
    for t in tree.nodes:
        ws = tree.adj[t]
        for i, n1 in enumerate(ws):
            for n2 in ws[i + 1:]:
                if tree.alpha[(n1, t)] == tree.alpha[(n2, t)]:
                    return t, n1, n2
    return None


def _inverse_pair_triple(tree: STree) -> Optional[tuple[int, int, int]]:
    """Least (node, n1, n2) whose incoming labels are nondegenerate inverses."""
    inv = tree.system.universe.inv_id
    for t in tree.nodes:
        ws = tree.adj[t]
        for i, n1 in enumerate(ws):
            a = tree.alpha[(n1, t)]
            if inv(a) == a:
                continue
            for n2 in ws[i + 1:]:
                if tree.alpha[(n2, t)] == inv(a):
                    return t, n1, n2
    return None


def is_order_respecting(tree: STree) -> bool:
    u = tree.system.universe
    oriented = tree.oriented_edges()
    for e in oriented:
        for f in oriented:
            if e != f and tree.edge_leq(e, f):
                if not u.leq_ids(tree.alpha[e], tree.alpha[f]):
                    return False
    return True


def validate_stree(tree: STree, family: Optional[StarFamily] = None) -> STreeReport:
    """Structural report for a labeled tree.

    Construction already guarantees treeness and an involutive labeling into
    the system, so ``is_stree`` holds for every :class:`STree` instance; the
    remaining flags classify it further.  ``over_family`` is ``None`` when no
    family is supplied.
    """
    problems = []
    system = tree.system
    u = system.universe

    over_stars = True
    for t in tree.nodes:
        if not is_star(u.sep(i) for i in tree.node_star(t)):
            over_stars = False
            problems.append(f"star at node {t} is not a star")
            break

    irredundant = _redundant_triple(tree) is None
    if not irredundant:
        problems.append(f"redundant at {_redundant_triple(tree)}")

    tight = _inverse_pair_triple(tree) is None
    if not tight:
        problems.append(f"non-antisymmetric star at {_inverse_pair_triple(tree)}")

    order_ok = is_order_respecting(tree)
    if not order_ok:
        problems.append("labeling does not respect the edge order")

    no_trivial = all(lab not in system.trivial_ids for lab in tree.alpha.values())
    essential = irredundant and tight and no_trivial

    over_family: Optional[bool] = None
    if family is not None:
        over_family = all(tree.node_star(t) in family for t in tree.nodes)
        if not over_family:
            bad = next(
                t for t in tree.nodes if tree.node_star(t) not in family
            )
            problems.append(f"star at node {bad} is outside the family")

    return STreeReport(
        is_stree=True,
        is_over_stars=over_stars,
        is_irredundant=irredundant,
        is_tight=tight,
        is_order_respecting=order_ok,
        is_essential=essential,
        over_family=over_family,
        problems=tuple(problems),
    )


def is_over(tree: STree, family: StarFamily) -> bool:
    return all(tree.node_star(t) in family for t in tree.nodes)


# --- surgery -------------------------------------------------------------------


def prune_to_irredundant(tree: STree, root: Optional[int] = None) -> STree:
    """Drop duplicate branches until every node's incoming labels are distinct.

    When two edges into a node carry the same label, the branch hanging off
    one of them is deleted; node stars are unchanged as sets, so the result
    is over every family the input was over.  A ``root`` leaf (default: the
    tree's own root leaf) is never deleted, nor is its edge.
    """
    if root is None:
        root = tree.root_leaf
    t = tree
    while True:
        hit = _redundant_triple(t)
        if hit is None:
            return t
        node, n1, n2 = hit
        branch2 = t.component_nodes(n2, cut=[(node, n2)])
        if root is not None and root in branch2:
            drop = t.component_nodes(n1, cut=[(node, n1)])
        else:
            drop = branch2
        if root is not None and root in drop:
            raise InternalInvariant("pruning would delete the protected root")
        t = t.without_nodes(drop)


def contract_to_tight(tree: STree) -> STree:
    """Contract away nodes whose star holds a nondegenerate inverse pair.

    If edges (n1, t) and (n2, t) carry a separation and its inverse, the part
    of the tree between n1 and n2 (containing t) is deleted and n1, n2 are
    joined by an edge inheriting those labels.  Stars at surviving nodes are
    unchanged.  Nodes are resolved in increasing id order.
    """
    t = tree
    while True:
        hit = _inverse_pair_triple(t)
        if hit is None:
            return t
        node, n1, n2 = hit
        mid = t.component_nodes(node, cut=[(n1, node), (node, n2)])
        fwd = t.alpha[(n1, node)]
        edges = [
            (u, v) for u, v in t.edges if u not in mid and v not in mid
        ] + [(n1, n2)]
        alpha = {
            k: v
            for k, v in t.alpha.items()
            if k[0] not in mid and k[1] not in mid
        }
        alpha[(n1, n2)] = fwd
        alpha[(n2, n1)] = t.system.universe.inv_id(fwd)
        keep_root = t.root_leaf if t.root_leaf not in mid else None
        kept = [n for n in t.nodes if n not in mid]
        t = STree(t.system, edges, alpha, nodes=kept, root_leaf=keep_root)


def tighten_rooted(tree: STree, root: int) -> STree:
    """Prune and contract a rooted tree, keeping the root and its edge.

    Requires the label pointing away from the root to be nontrivial and
    nondegenerate; the result is irredundant, tight, and carries that label
    on exactly one oriented edge (the root's own).
    """
    if root not in tree.adj or len(tree.adj[root]) != 1:
        raise MalformedInput(f"node {root} is not a leaf")
    nb = tree.adj[root][0]
    r_id = tree.alpha[(root, nb)]
    system = tree.system
    if r_id in system.trivial_ids or system.universe.is_degenerate_id(r_id):
        raise RootLabelTrivial(root, r_id)

    t = prune_to_irredundant(tree, root)
    t = contract_to_tight(t)
    if root not in t.adj or t.alpha.get((root, t.adj[root][0])) != r_id:
        raise InternalInvariant("tightening lost the root or its label")
    count = sum(1 for lab in t.alpha.values() if lab == r_id)
    if count != 1:
        raise InternalInvariant(
            f"root label appears on {count} oriented edges after tightening"
        )
    return STree(
        t.system, t.edges, t.alpha, nodes=t.nodes, root_leaf=root
    )


def find_guided_sink(tree: STree, picks) -> int:
    """Follow edges whose labels the orientation picks, to a node all of
    whose incoming labels are picked.

    Each edge (x, y) is directed towards ``y`` iff the label of (x, y) is
    picked; for a full orientation a directed walk in a tree must end in a
    sink, whose star is then a subset of the picks.
    """
    ids = {p.id if isinstance(p, OrientedSep) else int(p) for p in picks}
    t = tree.nodes[0]
    for _ in range(len(tree.nodes) + 1):
        step = None
        for w in tree.adj[t]:
            if tree.alpha[(w, t)] not in ids:
                step = w
                break
        if step is None:
            return t
        t = step
    raise InternalInvariant("guided walk did not reach a sink")
