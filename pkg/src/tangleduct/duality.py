"""Duality engines: find a family-avoiding orientation or a tree witness.

Given a finite separation system inside a universe and a family of stars,
exactly one of two things exists: an orientation of the system avoiding the
family (for the strong engine, additionally consistent — a *tangle*), or a
tree over the family whose node stars certify that no such orientation can
exist.  Both engines construct their answer recursively and re-verify it
before returning.

The strong engine needs the family to be *standard* (it forces every trivial
member) and relies on *separability*: for suitable pairs ``r ≤ r'`` some
member ``s0`` must sit between them whose orientations keep joins inside the
system and map qualifying stars back into the family.  Separability is not
checked globally up front (that would be exponential); it is witnessed on
demand, and a failure surfaces as :class:`NotFSeparable` with the offending
pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    OrientedSep,
    SeparationSystem,
    find_inconsistency,
    is_consistent,
    is_orientation,
)
from .errors import (
    FNotStandard,
    InternalInvariant,
    MalformedInput,
    NotFSeparable,
    RootLabelTrivial,
    ShiftLeftS,
    TargetNotAboveR,
)
from .stree import (
    STree,
    StarFamily,
    _inverse_pair_triple,
    _redundant_triple,
    is_over,
    prune_to_irredundant,
    tighten_rooted,
    validate_stree,
)


def _as_id(x) -> int:
    return x.id if isinstance(x, OrientedSep) else int(x)


def _pick_ids(picks) -> frozenset[int]:
    return frozenset(_as_id(p) for p in picks)


def _check_same_universe(family: StarFamily, system: SeparationSystem) -> None:
    if family.universe is not system.universe:
        raise MalformedInput("family and system live in different universes")


# --- orientations vs. families --------------------------------------------------


def violating_star(picks, family: StarFamily) -> Optional[frozenset[int]]:
    """The canonically least family star inside the picks, if any."""
    ids = _pick_ids(picks)
    for sigma in family.sorted_stars:
        if sigma <= ids:
            return sigma
    return None


def avoids(picks, family: StarFamily) -> bool:
    """True iff no star of the family is a subset of the picks."""
    return violating_star(picks, family) is None


def standardize(family: StarFamily, system: SeparationSystem) -> StarFamily:
    """Add the singleton star of the inverse of every trivial member."""
    _check_same_universe(family, system)
    inv = system.universe.inv_id
    extra = {frozenset((inv(r),)) for r in system.trivial_ids}
    out = StarFamily(family.universe, (), validate=False)
    out.stars = family.stars | extra
    return out


@dataclass(frozen=True)
class DualityState:
    """Snapshot of the quantities steering the recursion.

    ``forced`` holds the orientations whose inverse forms a singleton star in
    the family; ``degenerate`` the self-inverse member orientations; and
    ``undecided`` one representative id per member separation of which
    neither orientation is forced or degenerate.
    """

    forced: frozenset[int]
    degenerate: frozenset[int]
    undecided: frozenset[int]


def duality_state(system: SeparationSystem, family: StarFamily) -> DualityState:
    _check_same_universe(family, system)
    forced = family.forced_ids(system)
    deg = system.degenerate_ids
    inv = system.universe.inv_id
    undecided = frozenset(
        m
        for m in system.nondegenerate_reps
        if m not in forced and inv(m) not in forced
    )
    return DualityState(forced=forced, degenerate=deg, undecided=undecided)


# --- certificates ------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of a duality engine: one side of the alternative, verified.

    ``kind`` is ``"tangle"`` (consistent family-avoiding orientation),
    ``"orientation"`` (family-avoiding but not necessarily consistent — the
    weak engine's orientation side), or ``"stree"`` (a tree over the family).
    """

    kind: str
    picks: Optional[tuple[int, ...]] = None
    tree: Optional[STree] = None
    verified: bool = False
    transcript: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        d: dict = {"kind": self.kind, "verified": self.verified}
        if self.picks is not None:
            d["picks"] = list(self.picks)
        if self.tree is not None:
            d.update(self.tree.to_json_dict())
        d["transcript"] = list(self.transcript)
        return d

    @classmethod
    def from_json_dict(cls, system: SeparationSystem, d: dict) -> "Certificate":
        kind = d.get("kind")
        if kind not in ("tangle", "orientation", "stree"):
            raise MalformedInput(f"unknown certificate kind: {kind!r}")
        picks = tuple(int(i) for i in d["picks"]) if "picks" in d else None
        tree = STree.from_json_dict(system, d) if kind == "stree" else None
        return cls(
            kind=kind,
            picks=picks,
            tree=tree,
            verified=bool(d.get("verified", False)),
            transcript=tuple(d.get("transcript", ())),
        )


def verify_certificate(
    cert: Certificate, system: SeparationSystem, family: StarFamily
) -> tuple[bool, tuple[str, ...]]:
    """Re-check a certificate from scratch; returns (ok, problems)."""
    problems: list[str] = []
    if cert.kind in ("tangle", "orientation"):
        if cert.picks is None:
            return False, ("certificate has no picks",)
        if not is_orientation(cert.picks, system):
            problems.append("picks are not a full orientation of the system")
        if cert.kind == "tangle" and not is_consistent(cert.picks, system):
            problems.append("picks are not consistent")
        sigma = violating_star(cert.picks, family)
        if sigma is not None:
            problems.append(f"picks contain the family star {sorted(sigma)}")
    elif cert.kind == "stree":
        if cert.tree is None:
            return False, ("certificate has no tree",)
        if cert.tree.system is not system:
            problems.append("tree belongs to a different system")
        else:
            report = validate_stree(cert.tree, family)
            if not report.over_family:
                problems.extend(report.problems)
    else:
        problems.append(f"unknown certificate kind {cert.kind!r}")
    return (not problems), tuple(problems)


# --- shifting ---------------------------------------------------------------


def _is_trivial_id(system: SeparationSystem, i: int) -> bool:
    if i in system.member_ids:
        return i in system.trivial_ids
    return system.triviality_witness(system.universe.sep(i)) is not None


def _require_usable_base(r: int, system: SeparationSystem, what: str) -> None:
    if system.universe.is_degenerate_id(r):
        raise MalformedInput(f"{what} is degenerate")
    if _is_trivial_id(system, r):
        raise MalformedInput(f"{what} is trivial in the system")


def _shift_target_id(system: SeparationSystem, r: int, s0: int, target: int) -> int:
    u = system.universe
    if target == r:
        return s0
    if target == u.inv_id(r):
        return u.inv_id(s0)
    t_inv = u.inv_id(target)
    above = u.leq_ids(r, target)
    above_inv = u.leq_ids(r, t_inv)
    if above and above_inv:
        raise InternalInvariant(
            "both orientations of a shift target lie above the base"
        )
    if above:
        return u.join_id(target, s0)
    if above_inv:
        return u.inv_id(u.join_id(t_inv, s0))
    raise TargetNotAboveR(target, r)


def shift_map(r, s0, target, system: SeparationSystem) -> OrientedSep:
    """Shift one separation across ``s0``.

    ``r`` (nontrivial, nondegenerate) is the base; ``s0 ≥ r`` a member.  The
    base maps to ``s0`` and its inverse to the inverse of ``s0``; any other
    target is joined with ``s0`` on whichever of its orientations lies above
    ``r`` (unique, since ``r`` is nontrivial), inverses going to inverses.
    """
    u = system.universe
    r_id, s0_id, t_id = _as_id(r), _as_id(s0), _as_id(target)
    _require_usable_base(r_id, system, "shift base")
    if s0_id not in system.member_ids:
        raise MalformedInput("s0 is not a member of the system")
    if not u.leq_ids(r_id, s0_id):
        raise MalformedInput("s0 does not lie above the shift base")
    if t_id not in system.member_ids and t_id not in (r_id, u.inv_id(r_id)):
        raise MalformedInput("shift target is not a member of the system")
    return u.sep(_shift_target_id(system, r_id, s0_id, t_id))


def emulates(s0, r, system: SeparationSystem) -> bool:
    """Does ``s0 ≥ r`` keep every join with a member above ``r`` inside?

    Checks ``s ∨ s0`` for membership, over all members ``s ≥ r`` other than
    the inverse of ``r``.
    """
    u = system.universe
    s0_id, r_id = _as_id(s0), _as_id(r)
    if s0_id not in system.member_ids:
        raise MalformedInput("s0 is not a member of the system")
    if u.is_degenerate_id(r_id):
        raise MalformedInput("emulation base is degenerate")
    if not u.leq_ids(r_id, s0_id):
        return False
    inv_r = u.inv_id(r_id)
    for m in system.members:
        if m == inv_r or not u.leq_ids(r_id, m):
            continue
        if u.join_id(m, s0_id) not in system.member_ids:
            return False
    return True


def emulates_for_family(s0, r, system: SeparationSystem, family: StarFamily) -> bool:
    """Emulation plus: qualifying family stars shift back into the family.

    A star qualifies when all its elements belong to separations with an
    orientation above ``r``, none of them is the inverse of ``r``, and at
    least one lies above ``r`` itself.
    """
    _check_same_universe(family, system)
    u = system.universe
    s0_id, r_id = _as_id(s0), _as_id(r)
    _require_usable_base(r_id, system, "emulation base")
    if not emulates(s0_id, r_id, system):
        return False
    inv_r = u.inv_id(r_id)
    domain = frozenset(
        m
        for m in system.members
        if u.leq_ids(r_id, m) or u.leq_ids(r_id, u.inv_id(m))
    )
    for sigma in family.sorted_stars:
        if inv_r in sigma or not sigma <= domain:
            continue
        if not any(u.leq_ids(r_id, t) for t in sigma):
            continue
        image = frozenset(_shift_target_id(system, r_id, s0_id, t) for t in sigma)
        if image not in family.stars:
            return False
    return True


def find_separator(
    r, r_prime, system: SeparationSystem, family: StarFamily
) -> Optional[OrientedSep]:
    """Least member between ``r`` and ``r_prime`` emulating both ends.

    Searches for ``s0`` whose forward orientation emulates ``r`` for the
    family while its inverse emulates the inverse of ``r_prime``.  Both ``r``
    and the inverse of ``r_prime`` must be nontrivial, nondegenerate members
    not forced by the family.  ``None`` means separability fails at this
    pair.
    """
    _check_same_universe(family, system)
    u = system.universe
    r_id, rp_id = _as_id(r), _as_id(r_prime)
    if r_id not in system.member_ids or rp_id not in system.member_ids:
        raise MalformedInput("separator endpoints must be members of the system")
    if not u.leq_ids(r_id, rp_id):
        raise MalformedInput("separator endpoints are not ordered r <= r_prime")
    rp_inv = u.inv_id(rp_id)
    for val, what in ((r_id, "r"), (rp_inv, "inverse of r_prime")):
        _require_usable_base(val, system, what)
        if family.forces(u.sep(val)):
            raise MalformedInput(f"{what} is forced by the family")
    for cand in system.members:
        if emulates_for_family(cand, r_id, system, family) and emulates_for_family(
            u.inv_id(cand), rp_inv, system, family
        ):
            return u.sep(cand)
    return None


@dataclass(frozen=True)
class ShiftRecord:
    """One tree shift performed by the strong engine, for replay checks."""

    before: STree
    after: STree
    root: int
    r_id: int
    s0_id: int
    family: StarFamily


def shift_stree(tree: STree, root: int, s0, family: StarFamily) -> STree:
    """Shift a tight, irredundant rooted tree across ``s0``.

    Every edge pointing away from the root has its label joined with ``s0``
    (inverses follow suit).  On a tree whose root label ``r`` is nontrivial
    and nondegenerate, with ``s0`` emulating ``r`` for the family and all
    non-root stars in the family, the result is order-respecting, carries
    the star of ``s0``'s inverse at the root and at no other leaf, and all
    its other stars stay in the family; these conclusions are asserted.
    """
    system = tree.system
    u = system.universe
    _check_same_universe(family, system)
    s0_id = _as_id(s0)
    if root not in tree.adj or len(tree.adj[root]) != 1:
        raise MalformedInput(f"node {root} is not a leaf")
    r_id = tree.alpha[(root, tree.adj[root][0])]
    if u.is_degenerate_id(r_id) or _is_trivial_id(system, r_id):
        raise RootLabelTrivial(root, r_id)
    if s0_id not in system.member_ids or not u.leq_ids(r_id, s0_id):
        raise MalformedInput("s0 must be a member above the root label")
    if _redundant_triple(tree) is not None or _inverse_pair_triple(tree) is not None:
        raise MalformedInput("tree must be irredundant and tight before shifting")
    for t in tree.nodes:
        if t != root and tree.node_star(t) not in family.stars:
            raise MalformedInput(f"star at node {t} is not in the family")

    parent = {root: None}
    order = [root]
    for n in order:
        for w in tree.adj[n]:
            if w not in parent:
                parent[w] = n
                order.append(w)
    alpha: dict[tuple[int, int], int] = {}
    for u_, v_ in tree.edges:
        away = (u_, v_) if parent[v_] == u_ else (v_, u_)
        shifted = u.join_id(tree.alpha[away], s0_id)
        if shifted not in system.member_ids:
            raise ShiftLeftS(away, shifted)
        alpha[away] = shifted
        alpha[(away[1], away[0])] = u.inv_id(shifted)
    out = STree(system, tree.edges, alpha, nodes=tree.nodes, root_leaf=root)

    inv_s0 = frozenset((u.inv_id(s0_id),))
    if out.node_star(root) != inv_s0:
        raise InternalInvariant("shifted root star is not the inverse of s0")
    for t in out.nodes:
        if t == root:
            continue
        if out.node_star(t) == inv_s0 and len(out.adj[t]) == 1:
            raise InternalInvariant(
                f"shifted star of s0's inverse appears at leaf {t} besides the root"
            )
        if out.node_star(t) not in family.stars:
            raise InternalInvariant(
                f"shifted star at node {t} left the family"
            )
    report = validate_stree(out)
    if not report.is_order_respecting:
        raise InternalInvariant("shifted tree does not respect the edge order")
    return out


# --- tree assembly helpers -----------------------------------------------------


def _k2_tree(system: SeparationSystem, fwd_id: int) -> STree:
    return STree(system, [(0, 1)], {(0, 1): fwd_id})


def _star_tree(system: SeparationSystem, sigma: frozenset[int]) -> STree:
    if not sigma:
        return STree(system, [], {}, nodes=[0])
    alpha = {}
    for i, s in enumerate(sorted(sigma), start=1):
        alpha[(i, 0)] = s
    return STree(system, alpha.keys(), alpha)


def _splice(
    host: STree, host_leaves: list[int], donor: STree, donor_leaf: int
) -> STree:
    """Replace each listed host leaf with a fresh copy of donor minus its leaf.

    The joining edge inherits, on each side, the label the removed leaf used
    to contribute there, so every surviving node keeps its star.
    """
    system = host.system
    u = system.universe
    donor_nb = donor.adj[donor_leaf][0]
    into_donor_side = donor.alpha[(donor_leaf, donor_nb)]
    dropped = set(host_leaves)
    relabel: dict[int, int] = {}
    for n in host.nodes:
        if n not in dropped:
            relabel[n] = len(relabel)
    edges: list[tuple[int, int]] = []
    alpha: dict[tuple[int, int], int] = {}
    for a, b in host.edges:
        if a in dropped or b in dropped:
            continue
        edges.append((relabel[a], relabel[b]))
        alpha[(relabel[a], relabel[b])] = host.alpha[(a, b)]
        alpha[(relabel[b], relabel[a])] = host.alpha[(b, a)]
    nodes = list(relabel.values())
    for leaf in sorted(dropped):
        nb = host.adj[leaf][0]
        into_host_side = host.alpha[(leaf, nb)]
        if into_host_side != u.inv_id(into_donor_side):
            raise InternalInvariant("splice labels do not invert each other")
        base = max(nodes) + 1
        kept = [n for n in donor.nodes if n != donor_leaf]
        copy_map = {n: base + i for i, n in enumerate(kept)}
        nodes.extend(copy_map.values())
        for a, b in donor.edges:
            if a == donor_leaf or b == donor_leaf:
                continue
            edges.append((copy_map[a], copy_map[b]))
            alpha[(copy_map[a], copy_map[b])] = donor.alpha[(a, b)]
            alpha[(copy_map[b], copy_map[a])] = donor.alpha[(b, a)]
        edges.append((copy_map[donor_nb], relabel[nb]))
        alpha[(copy_map[donor_nb], relabel[nb])] = into_host_side
        alpha[(relabel[nb], copy_map[donor_nb])] = into_donor_side
    return STree(system, edges, alpha, nodes=nodes)


def _leaves_with_star(tree: STree, star: frozenset[int]) -> list[int]:
    return [
        n
        for n in tree.nodes
        if len(tree.adj[n]) == 1 and tree.node_star(n) == star
    ]


# --- the weak engine -------------------------------------------------------------


def weak_duality(system: SeparationSystem, family: StarFamily) -> Certificate:
    """Produce a family-avoiding orientation or a tree over the family.

    The orientation returned need not be consistent.  Stars of the family
    not contained in the system are ignored — they can neither be oriented
    towards nor appear as node stars.
    """
    _check_same_universe(family, system)
    fam = family.restricted_to(system)
    transcript = [
        f"restricted family to the system: {len(fam)} of {len(family)} stars kept"
    ]
    kind, payload = _weak(system, fam, transcript, depth=0)
    if kind == "tree":
        payload = prune_to_irredundant(payload)
        cert = Certificate(
            kind="stree", tree=payload, verified=False, transcript=tuple(transcript)
        )
    else:
        cert = Certificate(
            kind="orientation",
            picks=tuple(sorted(payload)),
            verified=False,
            transcript=tuple(transcript),
        )
    ok, problems = verify_certificate(cert, system, family)
    if not ok:
        raise InternalInvariant(f"weak certificate failed re-verification: {problems}")
    transcript.append(f"re-verified {cert.kind} certificate")
    return Certificate(
        kind=cert.kind,
        picks=cert.picks,
        tree=cert.tree,
        verified=True,
        transcript=tuple(transcript),
    )


def _forced_pair_tree(
    system: SeparationSystem, forced: frozenset[int]
) -> Optional[STree]:
    inv = system.universe.inv_id
    for s in sorted(forced):
        if inv(s) in forced:
            return _k2_tree(system, s)
    return None


def _weak(
    system: SeparationSystem, fam: StarFamily, transcript: list[str], depth: int
) -> tuple[str, object]:
    if depth > len(system.members) + 2:
        raise InternalInvariant("weak recursion exceeded its depth bound")
    u = system.universe
    forced = fam.forced_ids(system)
    k2 = _forced_pair_tree(system, forced)
    if k2 is not None:
        transcript.append(f"[{depth}] family forces both orientations: 2-node tree")
        return "tree", k2

    s0 = None
    for m in system.members:
        if u.is_degenerate_id(m):
            continue
        if m not in forced and u.inv_id(m) not in forced:
            s0 = m
            break
    if s0 is None:
        picks = forced | system.degenerate_ids
        sigma = violating_star(picks, fam)
        if sigma is None:
            transcript.append(f"[{depth}] forced picks avoid the family")
            return "orientation", picks
        if len(sigma) == 1:
            raise InternalInvariant("violating star is a singleton of a forced pick")
        transcript.append(
            f"[{depth}] forced picks contain star {sorted(sigma)}: star tree"
        )
        return "tree", _star_tree(system, sigma)

    inv_s0 = u.inv_id(s0)
    transcript.append(f"[{depth}] splitting on undecided separation {s0}")
    kind1, res1 = _weak(system, fam.with_star([s0]), transcript, depth + 1)
    if kind1 == "orientation":
        return kind1, res1
    t1 = prune_to_irredundant(res1)
    if is_over(t1, fam):
        transcript.append(f"[{depth}] first branch tree is already over the family")
        return "tree", t1
    kind2, res2 = _weak(system, fam.with_star([inv_s0]), transcript, depth + 1)
    if kind2 == "orientation":
        return kind2, res2
    t2 = prune_to_irredundant(res2)
    if is_over(t2, fam):
        transcript.append(f"[{depth}] second branch tree is already over the family")
        return "tree", t2

    if inv_s0 in system.trivial_ids:
        host, donor = t1, t2
        host_star = frozenset((s0,))
        donor_leaves = _leaves_with_star(t2, frozenset((inv_s0,)))
    else:
        host, donor = t2, t1
        host_star = frozenset((inv_s0,))
        donor_leaves = _leaves_with_star(t1, frozenset((s0,)))
    host_leaves = _leaves_with_star(host, host_star)
    if not host_leaves or not donor_leaves:
        raise InternalInvariant("branch tree lost its splice leaf")
    if len(donor_leaves) > 1:
        raise InternalInvariant("donor tree has several splice leaves")
    if len(host_leaves) > 1 and s0 not in system.trivial_ids:
        raise InternalInvariant("multiple splice leaves for a nontrivial separation")
    transcript.append(
        f"[{depth}] splicing {len(host_leaves)} branch copy(ies) at separation {s0}"
    )
    return "tree", _splice(host, host_leaves, donor, donor_leaves[0])


# --- the strong engine -----------------------------------------------------------


def strong_duality(
    system: SeparationSystem,
    family: StarFamily,
    *,
    auto_standardize: bool = False,
    trace: Optional[list] = None,
) -> Certificate:
    """Produce a tangle of the system or a tree over the family.

    The family must be standard for the system (force every trivial member);
    pass ``auto_standardize=True`` to add the missing singleton stars
    instead of failing.  A ``trace`` list, if given, receives a
    :class:`ShiftRecord` for every tree shift performed.

    Raises :class:`NotFSeparable` when the separability hypothesis fails at
    some pair, in which case neither alternative is certified.
    """
    _check_same_universe(family, system)
    fam = family.restricted_to(system)
    transcript = [
        f"restricted family to the system: {len(fam)} of {len(family)} stars kept"
    ]
    if not fam.is_standard_for(system):
        missing = fam.missing_standard(system)
        if not auto_standardize:
            raise FNotStandard(missing)
        fam = standardize(fam, system)
        transcript.append(
            f"standardized: forced {len(missing)} trivial orientation(s)"
        )
    memo: dict[frozenset[frozenset[int]], tuple[str, object]] = {}
    kind, payload = _strong(system, fam, transcript, trace, memo, depth=0)
    if kind == "tree":
        cert = Certificate(
            kind="stree",
            tree=prune_to_irredundant(payload),
            transcript=tuple(transcript),
        )
    else:
        cert = Certificate(
            kind="tangle", picks=tuple(sorted(payload)), transcript=tuple(transcript)
        )
    ok, problems = verify_certificate(cert, system, fam)
    if not ok:
        raise InternalInvariant(
            f"strong certificate failed re-verification: {problems}"
        )
    transcript.append(f"re-verified {cert.kind} certificate")
    return Certificate(
        kind=cert.kind,
        picks=cert.picks,
        tree=cert.tree,
        verified=True,
        transcript=tuple(transcript),
    )


def _assert_consistent_forced(
    system: SeparationSystem,
    fam: StarFamily,
    forced: frozenset[int],
    deg: frozenset[int],
) -> None:
    hit = find_inconsistency(forced | deg, system)
    if hit is None:
        return
    a, b = hit
    if a.is_degenerate or b.is_degenerate:
        raise InternalInvariant(
            "forced orientations conflict with a degenerate separation"
        )
    r_fwd = a.inverse
    probe = find_separator(r_fwd, b, system, fam)
    if probe is not None:
        raise InternalInvariant(
            "forced orientations are inconsistent yet a separator exists"
        )
    raise NotFSeparable(
        r_fwd.id,
        b.id,
        detail="the family forces two separations pointing away from each other",
    )


def _least_minimal_below(
    system: SeparationSystem, pool: list[int], bound: int
) -> int:
    u = system.universe
    below = [m for m in pool if u.leq_ids(m, bound)]
    for m in below:
        if not any(m2 != m and u.lt_ids(m2, m) for m2 in below):
            return m
    raise InternalInvariant("no minimal element below an undecided separation")


def _strong(
    system: SeparationSystem,
    fam: StarFamily,
    transcript: list[str],
    trace: Optional[list],
    memo: dict,
    depth: int,
) -> tuple[str, object]:
    if depth > len(system.members) + 2:
        raise InternalInvariant("strong recursion exceeded its depth bound")
    key = fam.stars
    if key in memo:
        return memo[key]
    u = system.universe
    forced = fam.forced_ids(system)
    k2 = _forced_pair_tree(system, forced)
    if k2 is not None:
        transcript.append(f"[{depth}] family forces both orientations: 2-node tree")
        memo[key] = ("tree", k2)
        return memo[key]
    deg = system.degenerate_ids
    _assert_consistent_forced(system, fam, forced, deg)

    undecided = [
        m
        for m in system.nondegenerate_reps
        if m not in forced and u.inv_id(m) not in forced
    ]
    if not undecided:
        picks = forced | deg
        sigma = violating_star(picks, fam)
        if sigma is None:
            transcript.append(f"[{depth}] forced picks form a tangle")
            memo[key] = ("tangle", picks)
            return memo[key]
        if len(sigma) == 1:
            raise InternalInvariant("violating star is a singleton of a forced pick")
        transcript.append(
            f"[{depth}] forced picks contain star {sorted(sigma)}: star tree"
        )
        memo[key] = ("tree", _star_tree(system, sigma))
        return memo[key]

    r0 = min(undecided)
    pool = [m for m in system.members if m not in forced and m not in deg]
    r1 = _least_minimal_below(system, pool, r0)
    r2_back = _least_minimal_below(system, pool, u.inv_id(r0))
    r2_fwd = u.inv_id(r2_back)
    s0 = find_separator(r1, r2_fwd, system, fam)
    if s0 is None:
        raise NotFSeparable(
            r1, r2_fwd, detail="no member emulates this pair for the family"
        )
    s0_id = s0.id
    inv_s0 = u.inv_id(s0_id)
    transcript.append(
        f"[{depth}] undecided {r0}: separating {r1} from {r2_fwd} at {s0_id}"
    )

    result: Optional[tuple[str, object]] = None
    if inv_s0 not in forced:
        branch = _branch_tree(
            system, fam, transcript, trace, memo, depth, r1, s0_id, forward=True
        )
        if branch[0] != "tree-shifted":
            result = branch
        elif frozenset((inv_s0,)) in fam.stars:
            transcript.append(f"[{depth}] shifted first branch is over the family")
            result = ("tree", branch[1])
        else:
            second = _branch_tree(
                system, fam, transcript, trace, memo, depth, r2_back, inv_s0,
                forward=False,
            )
            if second[0] != "tree-shifted":
                result = second
            else:
                t1, t2 = branch[1], second[1]
                spliced = _splice(
                    t1, [t1.root_leaf], t2, t2.root_leaf
                )
                transcript.append(f"[{depth}] spliced both branches at {s0_id}")
                result = ("tree", spliced)
    else:
        second = _branch_tree(
            system, fam, transcript, trace, memo, depth, r2_back, inv_s0,
            forward=False,
        )
        if second[0] != "tree-shifted":
            result = second
        else:
            if frozenset((s0_id,)) not in fam.stars:
                raise InternalInvariant(
                    "forced inverse of the separator lacks its singleton star"
                )
            transcript.append(
                f"[{depth}] shifted second branch is over the family"
            )
            result = ("tree", second[1])
    memo[key] = result
    return result


def _branch_tree(
    system: SeparationSystem,
    fam: StarFamily,
    transcript: list[str],
    trace: Optional[list],
    memo: dict,
    depth: int,
    r_min: int,
    s0_oriented: int,
    *,
    forward: bool,
) -> tuple[str, object]:
    """Recurse with the minimal separation forced, tighten, and shift.

    ``r_min`` is the minimal undecided orientation being split off and
    ``s0_oriented`` the separator orientation lying above it.  Returns
    ("tangle", picks) or ("tree", t) when the recursion already settles the
    original family, else ("tree-shifted", t) with the shifted tree rooted
    at its special leaf.
    """
    u = system.universe
    inv_r = u.inv_id(r_min)
    sub = fam.with_star([inv_r])
    kind, payload = _strong(system, sub, transcript, trace, memo, depth + 1)
    if kind == "tangle":
        return "tangle", payload
    t = prune_to_irredundant(payload)
    if is_over(t, fam):
        transcript.append(
            f"[{depth}] {'first' if forward else 'second'} branch tree is over the family"
        )
        return "tree", t
    leaves = _leaves_with_star(t, frozenset((inv_r,)))
    if not leaves:
        raise InternalInvariant("branch tree lost the leaf of its added star")
    tight = tighten_rooted(t, leaves[0])
    shifted = shift_stree(tight, leaves[0], s0_oriented, fam)
    if trace is not None:
        trace.append(
            ShiftRecord(
                before=tight,
                after=shifted,
                root=leaves[0],
                r_id=r_min,
                s0_id=s0_oriented,
                family=fam,
            )
        )
    return "tree-shifted", shifted
