"""Structural invariants: center, central series, Frattini subgroup, conjugacy
data, exponents, abelian invariants, and Hom-group computations.

Everything here is a pure function over immutable groups; results are
deterministic and exhaustively computed (no randomization, no sampling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .engine import (
    FiniteGroup,
    Subgroup,
    _subgroup_from_set,
    bfs_tree,
    element_order,
    extend_on_generators,
    subgroup_closure,
    trivial_subgroup,
    whole_group,
)
from .errors import (
    ConsistencyError,
    NotAbelianError,
    NotNilpotentError,
    NotPrimePowerError,
    TooLargeError,
)

GroupLike = Union[FiniteGroup, Subgroup]


def prime_power(n: int) -> Optional[tuple[int, int]]:
    """(p, k) with n = p^k and k >= 1, or None."""
    if n < 2:
        return None
    p = None
    m = n
    for q in range(2, int(math.isqrt(n)) + 1):
        if m % q == 0:
            p = q
            break
    if p is None:
        p = m
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return (p, k) if m == 1 else None


def _as_members(x: GroupLike) -> tuple[FiniteGroup, Sequence[int]]:
    if isinstance(x, Subgroup):
        return x.parent, x.members
    return x, range(x.order)


def is_abelian(x: GroupLike) -> bool:
    group, members = _as_members(x)
    if isinstance(x, FiniteGroup):
        return bool(np.array_equal(group.table, group.table.T))
    sub = group.table[np.ix_(members, members)]
    return bool(np.array_equal(sub, sub.T))


# ---------------------------------------------------------------------------
# center, derived subgroup, series
# ---------------------------------------------------------------------------


def center(group: FiniteGroup) -> Subgroup:
    central = np.nonzero((group.table == group.table.T).all(axis=1))[0]
    return _subgroup_from_set(group, central)


def commutator_set(group: FiniteGroup, x: int) -> tuple[int, ...]:
    """All commutators [x, g] for g in the group, as a sorted tuple."""
    n = group.order
    g = np.arange(n)
    xg = group.table[x, :]
    conj = group.table[group.table[group.inverse[g], x], g]  # g^-1 x g
    comm = group.table[group.inverse[x], conj]  # x^-1 (g^-1 x g)
    del xg
    return tuple(sorted(int(c) for c in set(comm.tolist())))


def conjugacy_classes(group: FiniteGroup) -> tuple[tuple[int, ...], ...]:
    """Partition of the elements, classes sorted by least member."""
    n = group.order
    g = np.arange(n)
    seen = [False] * n
    classes = []
    for x in range(n):
        if seen[x]:
            continue
        orbit = group.table[group.table[group.inverse[g], x], g]
        members = sorted(set(int(v) for v in orbit.tolist()))
        for m in members:
            seen[m] = True
        classes.append(tuple(members))
    return tuple(classes)


def class_ids(group: FiniteGroup) -> np.ndarray:
    ids = np.empty(group.order, dtype=np.int64)
    for i, cls in enumerate(conjugacy_classes(group)):
        for m in cls:
            ids[m] = i
    return ids


def commutator_subgroup_of(group: FiniteGroup, left: Subgroup, right: Subgroup) -> Subgroup:
    seeds = set()
    for a in left.members:
        for b in right.members:
            seeds.add(group.commutator(a, b))
    return subgroup_closure(group, seeds)


def derived_subgroup(group: FiniteGroup) -> Subgroup:
    return commutator_subgroup_of(group, whole_group(group), whole_group(group))


@dataclass(frozen=True)
class CentralSeriesData:
    """Lower and upper central series plus the common nilpotency class.

    ``lower`` runs G = g_1 >= g_2 >= ... down to the trivial subgroup
    (inclusive); ``upper`` runs Z_1 <= Z_2 <= ... up to G (inclusive).  For
    the trivial group both lists collapse and the class is 0.
    """

    lower: tuple[Subgroup, ...]
    upper: tuple[Subgroup, ...]
    nilpotency_class: int


def central_series(group: FiniteGroup) -> CentralSeriesData:
    whole = whole_group(group)
    if group.order == 1:
        return CentralSeriesData((whole,), (), 0)

    lower = [whole]
    while lower[-1].order > 1:
        nxt = commutator_subgroup_of(group, lower[-1], whole)
        if nxt.order == lower[-1].order:
            raise NotNilpotentError("lower central series stabilized above the identity")
        lower.append(nxt)
    cls = len(lower) - 1

    upper = [center(group)]
    while upper[-1].order < group.order:
        prev = upper[-1]
        nxt_members = [
            x
            for x in range(group.order)
            if all(group.commutator(x, y) in prev for y in range(group.order))
        ]
        nxt = _subgroup_from_set(group, nxt_members)
        if nxt.order == prev.order:
            raise NotNilpotentError("upper central series stabilized below the group")
        upper.append(nxt)

    if len(upper) != cls:
        raise ConsistencyError("upper and lower central series disagree on the class")
    return CentralSeriesData(tuple(lower), tuple(upper), cls)


def nilpotency_class(group: FiniteGroup) -> int:
    return central_series(group).nilpotency_class


def frattini_subgroup(group: FiniteGroup) -> Subgroup:
    """G^p * [G,G]; for p-groups this is the intersection of the maximal subgroups."""
    pk = prime_power(group.order)
    if group.order == 1:
        return trivial_subgroup(group)
    if pk is None:
        raise NotPrimePowerError(f"order {group.order} is not a prime power")
    p = pk[0]
    seeds = set(derived_subgroup(group).members)
    for x in range(group.order):
        seeds.add(group.power(x, p))
    return subgroup_closure(group, seeds)


def minimal_generating_rank(group: FiniteGroup) -> int:
    """d(G) = log_p |G / Frattini(G)| for groups of prime-power order."""
    if group.order == 1:
        return 0
    pk = prime_power(group.order)
    if pk is None:
        raise NotPrimePowerError(f"order {group.order} is not a prime power")
    p = pk[0]
    quotient_size = group.order // frattini_subgroup(group).order
    d = 0
    while quotient_size > 1:
        if quotient_size % p:
            raise ConsistencyError("Frattini index is not a power of p")
        quotient_size //= p
        d += 1
    return d


def exponent(x: GroupLike) -> int:
    group, members = _as_members(x)
    out = 1
    for m in members:
        out = math.lcm(out, element_order(group, m))
    return out


# ---------------------------------------------------------------------------
# abelian invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianInvariants:
    """Multiset of prime-power cyclic orders, stored ascending.

    The decomposition of a finite abelian group into cyclic groups of
    prime-power order is unique, so this value determines the group up to
    isomorphism.
    """

    entries: tuple[int, ...] = ()

    def __post_init__(self):
        for e in self.entries:
            if e < 2 or prime_power(e) is None:
                raise NotAbelianError(f"invariant {e} is not a prime power > 1")
        if tuple(sorted(self.entries)) != self.entries:
            object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    @property
    def order(self) -> int:
        return math.prod(self.entries)

    def max_multiplicity(self) -> int:
        """How many factors of the maximal order occur (0 for the trivial group)."""
        if not self.entries:
            return 0
        top = max(self.entries)
        return sum(1 for e in self.entries if e == top)

    def __iter__(self):
        return iter(self.entries)

    def __str__(self):
        if not self.entries:
            return "1"
        return " x ".join(f"C{e}" for e in self.entries)


def abelian_invariants(x: GroupLike) -> AbelianInvariants:
    """Prime-power invariants by torsion counting.

    For each prime p, the sizes of the p^k-torsion subgroups determine the
    partition of exponents: log_p |{a : a^(p^k) = 1}| increments by the number
    of cyclic factors of order >= p^k.
    """
    group, members = _as_members(x)
    if not is_abelian(x):
        raise NotAbelianError("abelian invariants need an abelian group")
    members = list(members)
    total = len(members)
    if total == 1:
        return AbelianInvariants(())
    orders = {m: element_order(group, m) for m in members}
    out: list[int] = []
    remaining = total
    p = 2
    while remaining > 1:
        if remaining % p == 0:
            counts = []  # counts[k] = #factors with exponent >= k
            k = 1
            prev_log = 0
            while True:
                pk = p**k
                tors = sum(1 for m in members if pk % orders[m] == 0)
                log = 0
                t = tors
                while t > 1:
                    t //= p
                    log += 1
                step = log - prev_log
                if step == 0:
                    break
                counts.append(step)
                prev_log = log
                k += 1
            for kk, cnt in enumerate(counts, start=1):
                nxt = counts[kk] if kk < len(counts) else 0
                for _ in range(cnt - nxt):
                    out.append(p**kk)
            while remaining % p == 0:
                remaining //= p
        p += 1
    return AbelianInvariants(tuple(sorted(out)))


def hom_structure(a: AbelianInvariants, b: AbelianInvariants) -> AbelianInvariants:
    """Invariants of Hom(A, B): one factor gcd(a_i, b_j) per pair, 1s dropped."""
    entries = [
        math.gcd(ai, bj)
        for ai in a.entries
        for bj in b.entries
        if math.gcd(ai, bj) > 1
    ]
    return AbelianInvariants(tuple(sorted(entries)))


def hom_count(a: AbelianInvariants, b: AbelianInvariants) -> int:
    return hom_structure(a, b).order


# ---------------------------------------------------------------------------
# explicit homomorphism enumeration (brute-force oracle)
# ---------------------------------------------------------------------------

DEFAULT_HOM_CANDIDATE_LIMIT = 2_000_000


def homs_into_subset(
    domain: FiniteGroup,
    codomain: FiniteGroup,
    members: Optional[Iterable[int]] = None,
    candidate_limit: int = DEFAULT_HOM_CANDIDATE_LIMIT,
) -> list[np.ndarray]:
    """All homomorphisms from ``domain`` into a subgroup of ``codomain``.

    Values are ``codomain`` element indices.  Candidates assign each designated
    domain generator an image whose order divides the generator's order, are
    extended along the BFS tree, and kept only if the extension is
    multiplicative on every pair.
    """
    members = list(range(codomain.order)) if members is None else [int(m) for m in members]
    tree = bfs_tree(domain, domain.generators)
    gen_orders = [element_order(domain, g) for g in domain.generators]
    choices = [
        [m for m in members if codomain.power(m, o) == codomain.identity]
        for o in gen_orders
    ]
    count = math.prod(len(c) for c in choices) if choices else 1
    if count > candidate_limit:
        raise TooLargeError(f"{count} candidate assignments exceed the limit {candidate_limit}")

    dom_table = domain.table
    out: list[np.ndarray] = []
    images = [0] * len(choices)

    def rec(pos: int):
        if pos == len(choices):
            f = extend_on_generators(tree, images, codomain.table, codomain.identity)
            if np.array_equal(codomain.table[f[:, None], f[None, :]], f[dom_table]):
                f.flags.writeable = False
                out.append(f)
            return
        for img in choices[pos]:
            images[pos] = img
            rec(pos + 1)

    rec(0)
    return out


def enumerate_homs(a: FiniteGroup, b: FiniteGroup) -> list[np.ndarray]:
    """All homomorphisms between two abelian groups, each verified pointwise."""
    if a.order > 256 or b.order > 256:
        raise TooLargeError("hom enumeration is limited to orders <= 256")
    if not is_abelian(a) or not is_abelian(b):
        raise NotAbelianError("hom enumeration needs abelian groups")
    return homs_into_subset(a, b)


# ---------------------------------------------------------------------------
# normal subgroups (bounded; used by the direct-factor search)
# ---------------------------------------------------------------------------


def normal_subgroups(group: FiniteGroup, max_order: int = 128) -> list[Subgroup]:
    """All normal subgroups, as joins of conjugacy-class closures."""
    if group.order > max_order:
        raise TooLargeError(
            f"normal-subgroup enumeration is limited to order {max_order}"
        )
    atoms = []
    seen_masks = set()
    for cls in conjugacy_classes(group):
        sub = subgroup_closure(group, cls)
        if sub.mask not in seen_masks:
            seen_masks.add(sub.mask)
            atoms.append(sub)
    found = {trivial_subgroup(group).mask: trivial_subgroup(group)}
    work = list(atoms)
    for sub in atoms:
        found.setdefault(sub.mask, sub)
    while work:
        cur = work.pop()
        for atom in atoms:
            if atom.mask & ~cur.mask == 0:
                continue
            join = subgroup_closure(group, set(cur.members) | set(atom.members))
            if join.mask not in found:
                found[join.mask] = join
                work.append(join)
    subs = sorted(found.values(), key=lambda s: (s.order, s.members))
    return subs
