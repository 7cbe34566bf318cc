"""Brute-force orientation census, independent of the duality engines.

Enumerates every full orientation of a system (one bit per nondegenerate
underlying separation, degenerate orientations always included), classifies
each as consistent and/or family-avoiding by the core predicates alone, and
cross-checks the strong engine's answer against the census: a tree is
returned exactly when no tangle exists, and on tree instances every
consistent orientation is walked to a sink node whose star it contains.

Deliberately free of pruning or reuse of engine logic — its value is
independence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import SeparationSystem
from .duality import Certificate, strong_duality
from .errors import InternalInvariant, MalformedInput, NotFSeparable, TooLarge
from .stree import StarFamily, find_guided_sink

DEFAULT_CENSUS_CAP = 20


def orientation_picks(system: SeparationSystem, code: int) -> tuple[int, ...]:
    """Picked ids of the census orientation numbered ``code``, sorted.

    Bit ``i`` of ``code`` orients the ``i``-th nondegenerate underlying
    separation (sorted by least orientation id): 0 keeps that least
    orientation, 1 takes its inverse.  Degenerate members are always
    included.  This is the enumeration rule every census listing follows.
    """
    u = system.universe
    reps = system.nondegenerate_reps
    if not 0 <= code < (1 << len(reps)):
        raise MalformedInput(
            f"orientation code {code} out of range for {len(reps)} underlying separations"
        )
    picks = list(system.degenerate_ids)
    for i, r in enumerate(reps):
        picks.append(u.inv_id(r) if (code >> i) & 1 else r)
    return tuple(sorted(picks))


@dataclass(frozen=True)
class OrientationCensus:
    """Complete classification of the orientation space of a system.

    ``total`` counts all full orientations; the three listings hold the
    picked id tuples (sorted ascending) of the consistent, family-avoiding,
    and tangle (consistent and avoiding) orientations, in enumeration
    order.  ``mode`` records which question the census was asked for.
    """

    total: int
    consistent: tuple[tuple[int, ...], ...]
    f_avoiding: tuple[tuple[int, ...], ...]
    f_tangles: tuple[tuple[int, ...], ...]
    mode: str


def enumerate_orientations(
    system: SeparationSystem,
    family: StarFamily,
    mode: str = "tangle",
    *,
    cap: int = DEFAULT_CENSUS_CAP,
) -> OrientationCensus:
    """Census every orientation: a binary counter over underlying separations.

    Bit ``i`` of the counter orients the ``i``-th nondegenerate underlying
    separation (sorted by id): 0 picks its least orientation, 1 the
    inverse.  Raises :class:`TooLarge` when the system has more than
    ``cap`` such separations.
    """
    if mode not in ("avoiding", "tangle"):
        raise MalformedInput(f"unknown census mode {mode!r}")
    if family.universe is not system.universe:
        raise MalformedInput("family and system live in different universes")
    u = system.universe
    reps = system.nondegenerate_reps
    n = len(reps)
    if n > cap:
        raise TooLarge(n, cap)
    deg = tuple(sorted(system.degenerate_ids))
    total = 1 << n
    codes = np.arange(total, dtype=np.int64)
    bits = [((codes >> i) & 1).astype(np.int8) for i in range(n)]
    choice = [(r, u.inv_id(r)) for r in reps]

    consistent = np.ones(total, dtype=bool)
    for d1 in deg:
        for d2 in deg:
            if d1 != d2 and u.lt_ids(u.inv_id(d1), d2):
                consistent &= False
    for i in range(n):
        for b in (0, 1):
            a = choice[i][b]
            if any(
                u.lt_ids(d, a) or u.lt_ids(u.inv_id(a), d) for d in deg
            ):
                consistent &= ~(bits[i] == b)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for bi in (0, 1):
                a = choice[i][bi]
                ia = u.inv_id(a)
                for bj in (0, 1):
                    if u.lt_ids(ia, choice[j][bj]):
                        consistent &= ~((bits[i] == bi) & (bits[j] == bj))

    where = {}
    for i, (fwd, bwd) in enumerate(choice):
        where[fwd] = (i, 0)
        where[bwd] = (i, 1)
    avoiding = np.ones(total, dtype=bool)
    for sigma in family.sorted_stars:
        mask = np.ones(total, dtype=bool)
        feasible = True
        for e in sigma:
            if e in where:
                i, b = where[e]
                mask &= bits[i] == b
            else:
                feasible = False  # never picked: outside S or degenerate-free
                break
        if feasible:
            avoiding &= ~mask

    tangles = consistent & avoiding

    def collect(flags: np.ndarray) -> tuple[tuple[int, ...], ...]:
        return tuple(
            orientation_picks(system, int(code)) for code in np.flatnonzero(flags)
        )

    return OrientationCensus(
        total=total,
        consistent=collect(consistent),
        f_avoiding=collect(avoiding),
        f_tangles=collect(tangles),
        mode=mode,
    )


@dataclass(frozen=True)
class CrossCheckReport:
    """Outcome of playing the strong engine against the census.

    On a hypothesis failure (no separator at some pair) nothing is
    asserted and ``agree`` is ``None``.  Otherwise ``agree`` is True — a
    disagreement raises :class:`InternalInvariant` instead of returning —
    and for tree answers ``exhibits`` lists, per consistent orientation,
    the sink node the orientation walks to and the star it contains there.
    """

    kind: Optional[str]
    hypothesis_failed: bool
    tangle_count: int
    agree: Optional[bool]
    exhibits: tuple[tuple[tuple[int, ...], int, tuple[int, ...]], ...] = ()
    certificate: Optional[Certificate] = None


def cross_check(
    system: SeparationSystem,
    family: StarFamily,
    *,
    cap: int = DEFAULT_CENSUS_CAP,
) -> CrossCheckReport:
    """Run the strong engine and the census; assert they tell the same story."""
    census = enumerate_orientations(system, family, "tangle", cap=cap)
    try:
        cert = strong_duality(system, family)
    except NotFSeparable:
        return CrossCheckReport(
            kind=None,
            hypothesis_failed=True,
            tangle_count=len(census.f_tangles),
            agree=None,
        )
    if cert.kind == "tangle":
        if not census.f_tangles:
            raise InternalInvariant(
                "engine returned a tangle but the census found none"
            )
        if tuple(sorted(cert.picks)) not in census.f_tangles:
            raise InternalInvariant(
                "engine's tangle is missing from the census listing"
            )
        return CrossCheckReport(
            kind="tangle",
            hypothesis_failed=False,
            tangle_count=len(census.f_tangles),
            agree=True,
            certificate=cert,
        )
    if census.f_tangles:
        raise InternalInvariant(
            "engine returned a tree but the census found a tangle"
        )
    fam = family.restricted_to(system)
    exhibits = []
    for picks in census.consistent:
        sink = find_guided_sink(cert.tree, picks)
        star = cert.tree.node_star(sink)
        if not star <= frozenset(picks):
            raise InternalInvariant(
                "sink star is not contained in the consistent orientation"
            )
        if star not in fam.stars:
            raise InternalInvariant("sink star is not a family star")
        exhibits.append((picks, sink, tuple(sorted(star))))
    return CrossCheckReport(
        kind="stree",
        hypothesis_failed=False,
        tangle_count=0,
        agree=True,
        exhibits=tuple(exhibits),
        certificate=cert,
    )
