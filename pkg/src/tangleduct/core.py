"""Finite separation systems.

A *universe* is a finite poset of oriented separations carrying an
order-reversing involution (written ``*`` in math, ``.inverse`` here) and
total join/meet operations that are genuine suprema/infima.  A *separation
system* is any involution-closed subset of a universe's elements.

Elements are integer ids ``0 .. n-1``.  The order lives in a full boolean
matrix, the involution and join/meet in id tables; every law is verified
exhaustively at construction time:

 * partial order (reflexive, antisymmetric, transitive),
 * order reversal:  ``r <= s``  iff  ``s.inverse <= r.inverse``,
 * ``join(r, s)`` is the least upper bound, ``meet(r, s)`` the greatest
   lower bound,
 * De Morgan:  ``join(r, s).inverse == meet(r.inverse, s.inverse)``.

All objects are immutable; operations construct new values.  Ties are broken
by least element id everywhere, so identical inputs give identical outputs.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import (
    InternalInvariant,
    InvolutionNotOrderReversing,
    JoinNotSupremum,
    MalformedInput,
    MeetNotInfimum,
    NotAPartialOrder,
    NotInvolution,
)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Universe:
    """A finite lattice of oriented separations with an order-reversing involution."""

    def __init__(
        self,
        leq: np.ndarray,
        inverse: Sequence[int],
        join: Optional[np.ndarray] = None,
        meet: Optional[np.ndarray] = None,
        *,
        set_labels: Optional[Sequence[tuple[int, int]]] = None,
        ground: Optional[Sequence[str]] = None,
    ):
        leq = np.asarray(leq, dtype=bool)
        if leq.ndim != 2 or leq.shape[0] != leq.shape[1]:
            raise MalformedInput("leq must be a square matrix")
        n = leq.shape[0]
        inv = np.asarray(inverse, dtype=np.int64)
        if inv.shape != (n,) or (n and (inv.min() < 0 or inv.max() >= n)):
            raise MalformedInput("inverse table must map ids to ids")

        self._leq = _readonly(leq)
        self._inv = _readonly(inv)
        self._check_order()
        self._check_involution()

        if join is None:
            join = self._derive_bound_table(upper=True)
        if meet is None:
            meet = self._derive_bound_table(upper=False)
        self._join = _readonly(np.asarray(join, dtype=np.int64))
        self._meet = _readonly(np.asarray(meet, dtype=np.int64))
        if self._join.shape != (n, n) or self._meet.shape != (n, n):
            raise MalformedInput("join/meet tables must be n-by-n")
        self._check_bounds()
        self._check_de_morgan()

        self.set_labels = tuple(set_labels) if set_labels is not None else None
        self.ground = tuple(ground) if ground is not None else None

    # -- law checks, all vectorized ------------------------------------

    def _check_order(self) -> None:
        rel = self._leq
        n = len(rel)
        if n == 0:
            return
        diag = rel[np.diag_indices(n)]
        if not diag.all():
            i = int(np.flatnonzero(~diag)[0])
            raise NotAPartialOrder(f"not reflexive at {i}", witness=i)
        sym = rel & rel.T
        sym[np.diag_indices(n)] = False
        if sym.any():
            a, b = (int(x) for x in np.argwhere(sym)[0])
            raise NotAPartialOrder(f"not antisymmetric at ({a}, {b})", witness=(a, b))
        closure = (rel.astype(np.uint8) @ rel.astype(np.uint8)) > 0
        gap = closure & ~rel
        if gap.any():
            a, c = (int(x) for x in np.argwhere(gap)[0])
            b = int(np.flatnonzero(rel[a] & rel[:, c])[0])
            raise NotAPartialOrder(
                f"not transitive: {a} <= {b} <= {c} but not {a} <= {c}",
                witness=(a, b, c),
            )

    def _check_involution(self) -> None:
        inv = self._inv
        n = len(inv)
        if n == 0:
            return
        round_trip = inv[inv]
        bad = round_trip != np.arange(n)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise NotInvolution(i, int(inv[i]), int(round_trip[i]))
        # r <= s  iff  inverse(s) <= inverse(r)
        rel = self._leq
        reversed_rel = rel[np.ix_(inv, inv)].T
        mismatch = rel != reversed_rel
        if mismatch.any():
            a, b = (int(x) for x in np.argwhere(mismatch)[0])
            raise InvolutionNotOrderReversing(a, b)

    def _derive_bound_table(self, upper: bool) -> np.ndarray:
        """Compute join (upper=True) or meet tables from the order alone."""
        rel = self._leq
        n = len(rel)
        table = np.zeros((n, n), dtype=np.int64)
        for r in range(n):
            for s in range(n):
                common = (rel[r] & rel[s]) if upper else (rel[:, r] & rel[:, s])
                candidates = np.flatnonzero(common)
                hit = -1
                for t in candidates:
                    ok = (
                        np.array_equal(rel[t], common)
                        if upper
                        else np.array_equal(rel[:, t], common)
                    )
                    if ok:
                        hit = int(t)
                        break
                if hit < 0:
                    if upper:
                        raise JoinNotSupremum(r, s, -1)
                    raise MeetNotInfimum(r, s, -1)
                table[r, s] = hit
        return table

    def _check_bounds(self) -> None:
        rel, join, meet = self._leq, self._join, self._meet
        n = len(rel)
        for r in range(n):
            # join(r, s) is the supremum iff its upper cone equals the
            # intersection of the cones of r and s; likewise for meet below.
            expect = rel[r][None, :] & rel
            got = rel[join[r]]
            bad = expect != got
            if bad.any():
                s, t = (int(x) for x in np.argwhere(bad)[0])
                raise JoinNotSupremum(r, s, t)
            expect = rel[:, r][:, None] & rel
            got = rel[:, meet[r]]
            bad = expect != got
            if bad.any():
                t, s = (int(x) for x in np.argwhere(bad)[0])
                raise MeetNotInfimum(r, s, t)

    def _check_de_morgan(self) -> None:
        # implied by the other laws; kept as a cheap safety net
        inv, join, meet = self._inv, self._join, self._meet
        lhs = inv[join]
        rhs = meet[np.ix_(inv, inv)]
        bad = lhs != rhs
        if bad.any():
            r, s = (int(x) for x in np.argwhere(bad)[0])
            raise InternalInvariant(
                f"De Morgan failed at ({r}, {s}): inverse of join is {int(lhs[r, s])},"
                f" meet of inverses is {int(rhs[r, s])}"
            )

    # -- element access -------------------------------------------------

    def __len__(self) -> int:
        return len(self._leq)

    @cached_property
    def seps(self) -> tuple["OrientedSep", ...]:
        return tuple(OrientedSep(self, i) for i in range(len(self)))

    def sep(self, i: int) -> "OrientedSep":
        return self.seps[i]

    def leq_ids(self, a: int, b: int) -> bool:
        return bool(self._leq[a, b])

    def lt_ids(self, a: int, b: int) -> bool:
        return a != b and bool(self._leq[a, b])

    def inv_id(self, a: int) -> int:
        return int(self._inv[a])

    def join_id(self, a: int, b: int) -> int:
        return int(self._join[a, b])

    def meet_id(self, a: int, b: int) -> int:
        return int(self._meet[a, b])

    def is_degenerate_id(self, a: int) -> bool:
        return int(self._inv[a]) == a

    @cached_property
    def degenerate_ids(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self._inv == np.arange(len(self))))

    def leq_matrix(self) -> np.ndarray:
        return self._leq

    def join_table(self) -> np.ndarray:
        return self._join

    def meet_table(self) -> np.ndarray:
        return self._meet

    def element_repr(self, i: int) -> str:
        if self.set_labels is None:
            return str(i)
        a_mask, b_mask = self.set_labels[i]
        names = self.ground or tuple(str(v) for v in range((a_mask | b_mask).bit_length()))

        def side(mask: int) -> str:
            return "{" + ",".join(names[v] for v in range(len(names)) if mask >> v & 1) + "}"

        return f"({side(a_mask)}|{side(b_mask)})"

    def __repr__(self) -> str:
        kind = "set-universe" if self.set_labels is not None else "universe"
        return f"<{kind} of {len(self)} oriented separations>"

    # -- serialization ----------------------------------------------------

    def to_json_dict(self, members: Optional[Iterable[int]] = None) -> dict:
        n = len(self)
        pairs = [[int(a), int(b)] for a, b in np.argwhere(self._leq)]
        d = {
            "elements": list(range(n)),
            "inverse": {str(i): int(self._inv[i]) for i in range(n)},
            "leq": pairs,
        }
        if self.set_labels is not None and self.ground is not None:
            # join/meet are recomputed from the labels on read; the explicit
            # n-by-n tables would dominate the file for large closures
            d["ground"] = list(self.ground)
            d["labels"] = [
                [
                    [self.ground[v] for v in range(len(self.ground)) if a >> v & 1],
                    [self.ground[v] for v in range(len(self.ground)) if b >> v & 1],
                ]
                for a, b in self.set_labels
            ]
        else:
            d["join"] = [
                [r, s, int(self._join[r, s])] for r in range(n) for s in range(n)
            ]
            d["meet"] = [
                [r, s, int(self._meet[r, s])] for r in range(n) for s in range(n)
            ]
        if members is not None:
            d["members"] = sorted(int(m) for m in members)
        return d


class OrientedSep:
    """Handle to one oriented separation: an id plus its universe.

    Comparison operators follow the universe's partial order; ``~s`` and
    ``s.inverse`` both give the reverse orientation.
    """

    __slots__ = ("universe", "id")

    def __init__(self, universe: Universe, id: int):
        self.universe = universe
        self.id = int(id)

    @property
    def inverse(self) -> "OrientedSep":
        return self.universe.sep(self.universe.inv_id(self.id))

    def __invert__(self) -> "OrientedSep":
        return self.inverse

    @property
    def is_degenerate(self) -> bool:
        return self.universe.is_degenerate_id(self.id)

    @property
    def is_small(self) -> bool:
        return self.universe.leq_ids(self.id, self.universe.inv_id(self.id))

    def join(self, other: "OrientedSep") -> "OrientedSep":
        assert self.universe is other.universe
        return self.universe.sep(self.universe.join_id(self.id, other.id))

    def meet(self, other: "OrientedSep") -> "OrientedSep":
        assert self.universe is other.universe
        return self.universe.sep(self.universe.meet_id(self.id, other.id))

    def _cmp_ok(self, other) -> bool:
        return isinstance(other, OrientedSep) and other.universe is self.universe

    def __le__(self, other: "OrientedSep") -> bool:
        assert self._cmp_ok(other), "cannot compare separations from different universes"
        return self.universe.leq_ids(self.id, other.id)

    def __lt__(self, other: "OrientedSep") -> bool:
        return self.id != other.id and self.__le__(other)

    def __ge__(self, other: "OrientedSep") -> bool:
        assert self._cmp_ok(other), "cannot compare separations from different universes"
        return self.universe.leq_ids(other.id, self.id)

    def __gt__(self, other: "OrientedSep") -> bool:
        return self.id != other.id and self.__ge__(other)

    def __eq__(self, other) -> bool:
        return self._cmp_ok(other) and other.id == self.id

    def __hash__(self) -> int:
        return hash((id(self.universe), self.id))

    def __repr__(self) -> str:
        return f"sep[{self.universe.element_repr(self.id)}]"


class SeparationSystem:
    """An involution-closed subset of a universe's elements."""

    def __init__(self, universe: Universe, member_ids: Iterable[int]):
        ids = frozenset(int(i) for i in member_ids)
        for i in ids:
            if not 0 <= i < len(universe):
                raise MalformedInput(f"member id {i} outside the universe")
            if universe.inv_id(i) not in ids:
                raise MalformedInput(
                    f"members not closed under the involution: {i} lacks its inverse"
                )
        self.universe = universe
        self.member_ids = ids

    @cached_property
    def members(self) -> tuple[int, ...]:
        return tuple(sorted(self.member_ids))

    @cached_property
    def seps(self) -> tuple[OrientedSep, ...]:
        return tuple(self.universe.sep(i) for i in self.members)

    def __len__(self) -> int:
        return len(self.member_ids)

    def __contains__(self, sep) -> bool:
        i = sep.id if isinstance(sep, OrientedSep) else int(sep)
        return i in self.member_ids

    def sep(self, i: int) -> OrientedSep:
        return self.universe.sep(i)

    @cached_property
    def degenerate_ids(self) -> frozenset[int]:
        return frozenset(i for i in self.member_ids if self.universe.is_degenerate_id(i))

    @cached_property
    def underlying_reps(self) -> tuple[int, ...]:
        """One canonical (least) orientation id per underlying separation."""
        return tuple(
            sorted(i for i in self.member_ids if i <= self.universe.inv_id(i))
        )

    @cached_property
    def nondegenerate_reps(self) -> tuple[int, ...]:
        return tuple(i for i in self.underlying_reps if not self.universe.is_degenerate_id(i))

    def triviality_witness(self, r: OrientedSep) -> Optional[OrientedSep]:
        """Least-id member strictly above both orientations of which ``r`` sits.

        Returns an orientation of the witnessing underlying separation, or
        ``None`` when ``r`` is nontrivial in this system.
        """
        u = self.universe
        for i in self.members:
            j = u.inv_id(i)
            if u.lt_ids(r.id, i) and u.lt_ids(r.id, j):
                return u.sep(i)
        return None

    @cached_property
    def trivial_ids(self) -> frozenset[int]:
        """Ids of all orientations that are trivial in this system."""
        u = self.universe
        out = set()
        for r in self.members:
            for i in self.underlying_reps:
                j = u.inv_id(i)
                if u.lt_ids(r, i) and u.lt_ids(r, j):
                    out.add(r)
                    break
        return frozenset(out)

    def is_trivial(self, r: OrientedSep) -> bool:
        return r.id in self.trivial_ids

    def __repr__(self) -> str:
        return f"<system of {len(self)} orientations in {self.universe!r}>"


# --- predicates ------------------------------------------------------------


def is_small(s: OrientedSep) -> bool:
    """True iff the separation is below its own inverse."""
    return s.is_small


def _pick_ids(picks) -> list[int]:
    return sorted(p.id if isinstance(p, OrientedSep) else int(p) for p in picks)


def find_inconsistency(
    picks, system: SeparationSystem
) -> Optional[tuple[OrientedSep, OrientedSep]]:
    """Least witness pair for inconsistency of a partial orientation.

    A set is inconsistent when it contains ``r.inverse`` and ``s`` for two
    distinct underlying separations with ``r < s``.  Returns the picked pair
    ``(r.inverse, s)``, or ``None`` if consistent.
    """
    u = system.universe
    ids = _pick_ids(picks)
    for a in ids:
        ra = u.inv_id(a)  # the opposite orientation of the first pick
        for b in ids:
            if {b, u.inv_id(b)} == {a, ra}:
                continue  # same underlying separation
            if u.lt_ids(ra, b):
                return u.sep(a), u.sep(b)
    return None


def is_consistent(picks, system: SeparationSystem) -> bool:
    """True iff no two picked orientations point away from each other."""
    return find_inconsistency(picks, system) is None


def is_antisymmetric(picks, system: SeparationSystem) -> bool:
    """True iff the set holds no nondegenerate element together with its inverse."""
    u = system.universe
    ids = set(_pick_ids(picks))
    return not any(
        u.inv_id(i) in ids and not u.is_degenerate_id(i) for i in ids
    )


def is_orientation(picks, system: SeparationSystem) -> bool:
    """True iff exactly one orientation of every member separation is picked."""
    ids = set(_pick_ids(picks))
    if not ids <= system.member_ids:
        return False
    u = system.universe
    for i in system.underlying_reps:
        j = u.inv_id(i)
        if i == j:
            if i not in ids:
                return False
        elif (i in ids) == (j in ids):
            return False
    return True


def is_star(sigma: Iterable[OrientedSep]) -> bool:
    """True iff the set of orientations all point towards each other.

    Every element must be nondegenerate and satisfy ``s <= t.inverse`` for
    each other element ``t``.  The empty set is a star.
    """
    elems = list({s.id: s for s in sigma}.values())
    if any(s.is_degenerate for s in elems):
        return False
    for i, s in enumerate(elems):
        for j, t in enumerate(elems):
            if i != j and not s <= t.inverse:
                return False
    return True


def is_multistar(family: Sequence[OrientedSep]) -> bool:
    """Star check for a multiset: repeats are compared as distinct positions."""
    if any(s.is_degenerate for s in family):
        return False
    for i, s in enumerate(family):
        for j, t in enumerate(family):
            if i != j and not s <= t.inverse:
                return False
    return True


def is_nested(r: OrientedSep, s: OrientedSep) -> bool:
    """True iff some orientations of the two separations are comparable."""
    for a in (r, r.inverse):
        for b in (s, s.inverse):
            if a <= b or b <= a:
                return True
    return False


# --- JSON ------------------------------------------------------------------


def tables_from_masks(
    masks: Sequence[tuple[int, int]]
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Order, involution, join and meet tables for a pool of side-pair bitmasks.

    The pool must be sorted by ``(A, B)`` and closed under flips, joins
    ``(A|C, B&D)`` and meets ``(A&C, B|D)``; ids are positions in the pool.
    """
    a = np.array([m[0] for m in masks], dtype=np.int64)
    b = np.array([m[1] for m in masks], dtype=np.int64)
    packed = (a << 32) | b
    if len(packed) > 1 and not (np.diff(packed) > 0).all():
        raise MalformedInput("mask pool must be sorted by (A, B) without repeats")

    def lookup(pa: np.ndarray, pb: np.ndarray, what: str) -> np.ndarray:
        keys = (pa << 32) | pb
        idx = np.searchsorted(packed, keys)
        idx_clipped = np.clip(idx, 0, len(packed) - 1)
        if not (packed[idx_clipped] == keys).all():
            raise MalformedInput(f"mask pool is not closed under {what}")
        return idx_clipped

    leq = ((a[:, None] & ~a[None, :]) == 0) & ((b[None, :] & ~b[:, None]) == 0)
    inverse = lookup(b, a, "flips")
    join = lookup(a[:, None] | a[None, :], b[:, None] & b[None, :], "joins")
    meet = lookup(a[:, None] & a[None, :], b[:, None] | b[None, :], "meets")
    return leq, inverse, join, meet


def _table_from_triples(n: int, triples, what: str) -> np.ndarray:
    table = np.full((n, n), -1, dtype=np.int64)
    for item in triples:
        if len(item) != 3:
            raise MalformedInput(f"{what} entries must be [a, b, value] triples")
        a, b, v = (int(x) for x in item)
        table[a, b] = v
    if (table < 0).any():
        a, b = (int(x) for x in np.argwhere(table < 0)[0])
        raise MalformedInput(f"{what} table is missing the pair ({a}, {b})")
    return table


def system_from_json_dict(d: dict) -> SeparationSystem:
    """Build a validated universe plus system from the JSON schema.

    Expected keys: ``elements`` (list of ids 0..n-1), ``inverse`` (id map),
    ``leq`` (list of ``[a, b]`` pairs), optional ``join``/``meet`` tables as
    ``[a, b, value]`` triples (derived from the order when omitted), optional
    ``members`` (defaults to all elements), optional ``ground``/``labels``
    annotations for set universes.
    """
    try:
        elements = [int(e) for e in d["elements"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad or missing 'elements': {exc}") from exc
    n = len(elements)
    if sorted(elements) != list(range(n)):
        raise MalformedInput("'elements' must be the ids 0..n-1")

    inv_map = d.get("inverse")
    if not isinstance(inv_map, dict):
        raise MalformedInput("'inverse' must be an object mapping id -> id")
    try:
        inverse = [int(inv_map[str(i)]) for i in range(n)]
    except (KeyError, ValueError) as exc:
        raise MalformedInput(f"bad 'inverse' table: {exc}") from exc

    leq = np.zeros((n, n), dtype=bool)
    for item in d.get("leq", ()):
        if len(item) != 2:
            raise MalformedInput("'leq' entries must be [a, b] pairs")
        a, b = (int(x) for x in item)
        if not (0 <= a < n and 0 <= b < n):
            raise MalformedInput(f"'leq' pair ({a}, {b}) outside element range")
        leq[a, b] = True

    join = _table_from_triples(n, d["join"], "join") if "join" in d else None
    meet = _table_from_triples(n, d["meet"], "meet") if "meet" in d else None

    set_labels = None
    ground = None
    if "labels" in d and "ground" in d:
        ground = [str(g) for g in d["ground"]]
        index = {g: i for i, g in enumerate(ground)}
        set_labels = []
        for a_list, b_list in d["labels"]:
            a = sum(1 << index[str(v)] for v in a_list)
            b = sum(1 << index[str(v)] for v in b_list)
            set_labels.append((a, b))
        if len(set_labels) != n:
            raise MalformedInput("'labels' must list one (A, B) pair per element")
        if join is None and meet is None:
            label_leq, label_inv, join, meet = tables_from_masks(set_labels)
            if not np.array_equal(label_leq, leq):
                raise MalformedInput("'leq' disagrees with the set labels")
            if not np.array_equal(label_inv, np.asarray(inverse)):
                raise MalformedInput("'inverse' disagrees with the set labels")

    universe = Universe(leq, inverse, join, meet, set_labels=set_labels, ground=ground)
    members = d.get("members")
    if members is None:
        members = range(n)
    return SeparationSystem(universe, (int(m) for m in members))


def system_to_json_dict(system: SeparationSystem) -> dict:
    return system.universe.to_json_dict(members=system.member_ids)


def validate_universe(d: dict) -> SeparationSystem:
    """Validate raw universe tables; alias of :func:`system_from_json_dict`."""
    return system_from_json_dict(d)
