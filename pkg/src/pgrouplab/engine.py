"""Concrete finite groups from presentations, plus core group arithmetic.

Groups are realized as dense Cayley tables over element indices 0..n-1 with
identity 0.  The construction is coset enumeration over the trivial subgroup
(relator-based HLT with lookahead; see Holt, Eick, O'Brien, "Handbook of
Computational Group Theory", ch. 5), which yields the regular representation
with deterministic numbering: elements appear in first-definition order of
the enumeration.

FiniteGroup and Subgroup are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    ConsistencyError,
    EnumerationLimitError,
    NotNormalError,
    OrderMismatchError,
    WordSyntaxError,
)
from .presentation import (
    Commutator,
    Gen,
    Grouped,
    Power,
    Presentation,
    Word,
)

DEFAULT_MAX_COSETS = 200_000


# ---------------------------------------------------------------------------
# groups and subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group as a dense multiplication table.

    order:      number of elements n
    table:      n x n array, table[a, b] = a*b
    inverse:    n array of inverses
    generators: element indices of the designated generators (ordered)
    gen_names:  one symbol per designated generator
    words:      canonical word per element, as a tuple of generator positions;
                computed by BFS from the identity over right multiplication,
                ties broken by generator list order
    """

    order: int
    table: np.ndarray
    inverse: np.ndarray
    generators: tuple[int, ...]
    gen_names: tuple[str, ...]
    words: tuple[tuple[int, ...], ...]
    name: str = ""
    identity: int = 0

    def __post_init__(self):
        self.table.flags.writeable = False
        self.inverse.flags.writeable = False

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv(x), -k
        acc, base = self.identity, x
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def conjugate(self, x: int, g: int) -> int:
        """g^-1 x g"""
        return self.mul(self.mul(self.inv(g), x), g)

    def commutator(self, x: int, y: int) -> int:
        """x^-1 y^-1 x y"""
        return self.mul(self.inv(self.mul(y, x)), self.mul(x, y))

    def elements(self) -> range:
        return range(self.order)

    def canonical_word(self, x: int) -> Word:
        return Word(tuple(Gen(self.gen_names[j]) for j in self.words[x]))

    def generator_assignment(self) -> dict[str, int]:
        return dict(zip(self.gen_names, self.generators))

    def __repr__(self):
        label = self.name or "group"
        return f"<FiniteGroup {label} of order {self.order}>"


def element_order(group: FiniteGroup, x: int) -> int:
    """Least k >= 1 with x^k = 1."""
    acc, k = x, 1
    while acc != group.identity:
        acc = group.mul(acc, x)
        k += 1
        if k > group.order:
            raise ConsistencyError("power sequence never reached the identity")
    return k


@dataclass(frozen=True)
class Subgroup:
    """Closed subset of a parent group: sorted members plus an int bitmask."""

    parent: FiniteGroup
    members: tuple[int, ...]
    mask: int

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return bool((self.mask >> x) & 1)

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and other.mask == self.mask
        )

    def __hash__(self):
        return hash((id(self.parent), self.mask))

    def __repr__(self):
        return f"<Subgroup of order {self.order} in {self.parent!r}>"


def _subgroup_from_set(group: FiniteGroup, members: Iterable[int]) -> Subgroup:
    ms = tuple(sorted(int(m) for m in set(members)))
    mask = 0
    for m in ms:
        mask |= 1 << m
    return Subgroup(group, ms, mask)


def subgroup_closure(group: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    """Least subgroup containing ``seeds``; empty seeds give the trivial one."""
    seeds = [int(s) for s in seeds]
    seen = {group.identity}
    frontier = deque([group.identity])
    gens = [s for s in seeds if s != group.identity]
    while frontier:
        a = frontier.popleft()
        for s in gens:
            b = group.mul(a, s)
            if b not in seen:
                seen.add(b)
                frontier.append(b)
    return _subgroup_from_set(group, seen)


def trivial_subgroup(group: FiniteGroup) -> Subgroup:
    return _subgroup_from_set(group, [group.identity])


def whole_group(group: FiniteGroup) -> Subgroup:
    return _subgroup_from_set(group, range(group.order))


def centralizer(group: FiniteGroup, x: int) -> Subgroup:
    col = group.table[:, x]
    row = group.table[x, :]
    return _subgroup_from_set(group, np.nonzero(col == row)[0])


def is_normal(group: FiniteGroup, sub: Subgroup) -> bool:
    """Conjugation by the designated generators suffices for subgroups."""
    for g in set(group.generators):
        for h in sub.members:
            if group.conjugate(h, g) not in sub:
                return False
    return True


def quotient(group: FiniteGroup, normal: Subgroup) -> tuple[FiniteGroup, np.ndarray]:
    """Quotient group on coset indices plus the projection array.

    Cosets are numbered by their least member, ascending, so the identity
    coset is 0 and the numbering is deterministic.
    """
    if not is_normal(group, normal):
        raise NotNormalError("subgroup is not normal")
    n = group.order
    members = np.fromiter(normal.members, dtype=np.int64)
    rep = group.table[members, :].min(axis=0)  # least member of each coset Ng
    reps = np.unique(rep)
    coset_index = np.full(n, -1, dtype=np.int64)
    coset_index[reps] = np.arange(len(reps))
    proj = coset_index[rep]

    q = len(reps)
    qtable = proj[group.table[np.ix_(reps, reps)]].astype(np.int64)
    qgens = tuple(int(proj[g]) for g in group.generators)
    words = _bfs_words(qtable, qgens)
    qinv = np.argmin(qtable, axis=1)
    quot = FiniteGroup(
        order=q,
        table=qtable,
        inverse=qinv,
        generators=qgens,
        gen_names=group.gen_names,
        words=words,
        name=f"{group.name}/N" if group.name else "",
    )
    return quot, proj


def bfs_tree(group: FiniteGroup, gens: Sequence[int]) -> list[tuple[int, int, int]]:
    """Spanning tree of the right-multiplication graph rooted at the identity.

    Returns (element, parent, generator position) triples in BFS order; the
    root triple is (0, -1, -1).  Raises if ``gens`` do not generate.
    """
    n = group.order
    seen = [False] * n
    seen[group.identity] = True
    out = [(group.identity, -1, -1)]
    queue = deque([group.identity])
    while queue:
        a = queue.popleft()
        for j, g in enumerate(gens):
            b = group.mul(a, int(g))
            if not seen[b]:
                seen[b] = True
                out.append((b, a, j))
                queue.append(b)
    if len(out) != n:
        raise ConsistencyError("given elements do not generate the group")
    return out


def extend_on_generators(
    tree: list[tuple[int, int, int]],
    images: Sequence[int],
    codomain_table: np.ndarray,
    codomain_identity: int = 0,
) -> np.ndarray:
    """Extend generator images along a BFS tree to a total map.

    The result is the unique multiplicative extension if one exists; callers
    must verify multiplicativity afterwards.
    """
    n = len(tree)
    out = np.empty(n, dtype=np.int64)
    for elem, parent, j in tree:
        if parent < 0:
            out[elem] = codomain_identity
        else:
            out[elem] = codomain_table[out[parent], images[j]]
    return out


def _bfs_words(table: np.ndarray, gens: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    n = table.shape[0]
    words: list[Optional[tuple[int, ...]]] = [None] * n
    words[0] = ()
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for j, g in enumerate(gens):
            b = int(table[a, g])
            if words[b] is None:
                words[b] = words[a] + (j,)
                queue.append(b)
    if any(w is None for w in words):
        raise ConsistencyError("generators do not generate the group")
    return tuple(words)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# coset enumeration
# ---------------------------------------------------------------------------


def _flatten(word: Word, gen_index: dict[str, int]) -> list[int]:
    """Word -> sequence of table columns (2j = generator j, 2j+1 = inverse)."""

    def inv(seq: list[int]) -> list[int]:
        return [c ^ 1 for c in reversed(seq)]

    def atom_cols(atom) -> list[int]:
        if isinstance(atom, Gen):
            return [2 * gen_index[atom.name]]
        if isinstance(atom, Power):
            base = atom_cols(atom.base)
            k = atom.exponent
            if k < 0:
                base, k = inv(base), -k
            return base * k
        if isinstance(atom, Grouped):
            return word_cols(atom.body)
        if isinstance(atom, Commutator):
            u = word_cols(atom.left)
            v = word_cols(atom.right)
            return inv(u) + inv(v) + u + v
        raise TypeError(f"not an atom: {atom!r}")

    def word_cols(w: Word) -> list[int]:
        out: list[int] = []
        for a in w.atoms:
            out.extend(atom_cols(a))
        return out

    return word_cols(word)


class _CosetTable:
    """HLT coset table over the trivial subgroup, with coincidence handling."""

    def __init__(self, ngens: int, max_cosets: int):
        self.ncols = 2 * ngens
        self.table: list[list[Optional[int]]] = [[None] * self.ncols]
        self.p = [0]  # union-find, p[i] <= i; coset live iff p[i] == i
        self.n_live = 1
        self.max_cosets = max_cosets
        self.alloc_cap = 4 * max_cosets + 1000

    def rep(self, k: int) -> int:
        r = k
        while self.p[r] != r:
            r = self.p[r]
        while self.p[k] != k:
            self.p[k], k = r, self.p[k]
        return r

    def define(self, alpha: int, x: int, relators) -> None:
        if self.n_live >= self.max_cosets or len(self.table) >= self.alloc_cap:
            self._lookahead(relators)
            if self.n_live >= self.max_cosets or len(self.table) >= self.alloc_cap:
                raise EnumerationLimitError(
                    f"coset limit {self.max_cosets} exceeded; the presented group "
                    "may be infinite or the limit too small"
                )
            if self.p[alpha] != alpha or self.table[alpha][x] is not None:
                return
        beta = len(self.table)
        self.table.append([None] * self.ncols)
        self.p.append(beta)
        self.n_live += 1
        self.table[alpha][x] = beta
        self.table[beta][x ^ 1] = alpha

    def _lookahead(self, relators) -> None:
        # Scan every relator everywhere without defining new cosets; the
        # resulting coincidences can free enough room to continue.
        for alpha in range(len(self.table)):
            if self.p[alpha] != alpha:
                continue
            for rel in relators:
                self.scan(alpha, rel, fill=False, relators=relators)
                if self.p[alpha] != alpha:
                    break

    def scan(self, alpha: int, word: list[int], fill: bool, relators) -> None:
        f, i = alpha, 0
        b, j = alpha, len(word) - 1
        while True:
            while i <= j and self.table[f][word[i]] is not None:
                f = self.table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and self.table[b][word[j] ^ 1] is not None:
                b = self.table[b][word[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                # Deduction: the single gap is forced.
                self.table[f][word[i]] = b
                self.table[b][word[i] ^ 1] = f
                return
            if not fill:
                return
            self.define(f, word[i], relators)
            if self.p[f] != f or self.p[alpha] != alpha:
                return

    def _merge(self, a: int, b: int, queue: deque) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        lo, hi = (a, b) if a < b else (b, a)
        self.p[hi] = lo
        self.n_live -= 1
        queue.append(hi)

    def coincidence(self, alpha: int, beta: int) -> None:
        queue: deque = deque()
        self._merge(alpha, beta, queue)
        while queue:
            gamma = queue.popleft()
            row = self.table[gamma]
            for x in range(self.ncols):
                delta = row[x]
                if delta is None:
                    continue
                self.table[delta][x ^ 1] = None
                mu, nu = self.rep(gamma), self.rep(delta)
                if self.table[mu][x] is not None:
                    self._merge(nu, self.table[mu][x], queue)
                elif self.table[nu][x ^ 1] is not None:
                    self._merge(mu, self.table[nu][x ^ 1], queue)
                else:
                    self.table[mu][x] = nu
                    self.table[nu][x ^ 1] = mu


def todd_coxeter(
    pres: Presentation,
    max_cosets: int = DEFAULT_MAX_COSETS,
    name: str = "",
) -> FiniteGroup:
    """Enumerate the presented group and return its regular representation.

    Deterministic: identical presentations give identical tables.  If the
    presentation declares an order, the computed order must match.
    """
    if not pres.generators:
        raise WordSyntaxError("presentation needs at least one generator")
    if max_cosets < 1:
        raise EnumerationLimitError("max_cosets must be >= 1")
    gen_index = {g: i for i, g in enumerate(pres.generators)}
    relators = [r for r in (_flatten(w, gen_index) for w in pres.relators) if r]

    ct = _CosetTable(len(pres.generators), max_cosets)
    alpha = 0
    while alpha < len(ct.table):
        if ct.p[alpha] == alpha:
            for rel in relators:
                ct.scan(alpha, rel, fill=True, relators=relators)
                if ct.p[alpha] != alpha:
                    break
            if ct.p[alpha] == alpha:
                for x in range(ct.ncols):
                    if ct.table[alpha][x] is None:
                        ct.define(alpha, x, relators)
        alpha += 1

    live = [i for i in range(len(ct.table)) if ct.p[i] == i]
    index = {old: new for new, old in enumerate(live)}
    n = len(live)
    ngens = len(pres.generators)
    action = np.empty((n, 2 * ngens), dtype=np.int64)
    for new, old in enumerate(live):
        for x in range(2 * ngens):
            entry = ct.table[old][x]
            if entry is None:
                raise ConsistencyError("incomplete coset table after enumeration")
            action[new, x] = index[ct.rep(entry)]

    # Safety net: re-scan every relator at every coset on the finished table.
    pos = np.arange(n)
    for rel in relators:
        cur = pos
        for x in rel:
            cur = action[cur, x]
        if not np.array_equal(cur, pos):
            raise ConsistencyError("finished coset table violates a relator")

    if pres.order is not None and pres.order != n:
        raise OrderMismatchError(
            f"declared order {pres.order} but enumeration found {n}"
        )

    gen_elems = tuple(int(action[0, 2 * j]) for j in range(ngens))
    words = _bfs_words_from_action(action, ngens, n)

    table = np.empty((n, n), dtype=np.int64)
    table[:, 0] = np.arange(n)
    order_of_def = sorted(range(n), key=lambda e: (len(words[e]), words[e]))
    for b in order_of_def:
        w = words[b]
        if not w:
            continue
        parent = 0
        for j in w[:-1]:
            parent = int(action[parent, 2 * j])
        table[:, b] = action[table[:, parent], 2 * w[-1]]
    inverse = np.argmin(table, axis=1)  # position of 0 in each row

    return FiniteGroup(
        order=n,
        table=table,
        inverse=inverse,
        generators=gen_elems,
        gen_names=pres.generators,
        words=words,
        name=name,
    )


def _bfs_words_from_action(action: np.ndarray, ngens: int, n: int):
    words: list[Optional[tuple[int, ...]]] = [None] * n
    words[0] = ()
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for j in range(ngens):
            b = int(action[a, 2 * j])
            if words[b] is None:
                words[b] = words[a] + (j,)
                queue.append(b)
    if any(w is None for w in words):
        raise ConsistencyError("generators do not reach every coset")
    return tuple(words)


# ---------------------------------------------------------------------------
# direct constructions (used by tests, oracles, and hom enumeration)
# ---------------------------------------------------------------------------


def cyclic_group(n: int, gen_name: str = "x") -> FiniteGroup:
    if n < 1:
        raise ValueError("order must be positive")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    inverse = (-idx) % n
    gens = (1 % n,)
    words = tuple(() if i == 0 else (0,) * i for i in range(n))
    return FiniteGroup(n, table, inverse, gens, (gen_name,), words, name=f"C{n}")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Direct product on pair indices (i, j) -> i*|b| + j."""
    na, nb = a.order, b.order
    n = na * nb
    ia, ib = np.divmod(np.arange(n), nb)
    table = a.table[ia[:, None], ia[None, :]] * nb + b.table[ib[:, None], ib[None, :]]
    inverse = a.inverse[ia] * nb + b.inverse[ib]
    gens = tuple(int(g) * nb for g in a.generators) + tuple(int(g) for g in b.generators)
    gen_names = tuple(f"a_{nm}" for nm in a.gen_names) + tuple(f"b_{nm}" for nm in b.gen_names)
    ka = len(a.generators)
    words = tuple(
        tuple(j for j in a.words[int(i)]) + tuple(ka + j for j in b.words[int(jj)])
        for i, jj in zip(ia, ib)
    )
    return FiniteGroup(n, table, inverse, gens, gen_names, words, name=f"{a.name}x{b.name}")


def abelian_group(invariants: Sequence[int]) -> FiniteGroup:
    """Direct product of cyclic groups of the given orders."""
    invs = [int(k) for k in invariants]
    if any(k < 2 for k in invs):
        raise ValueError("cyclic orders must be >= 2")
    group = cyclic_group(1) if not invs else cyclic_group(invs[0], "g0")
    for pos, k in enumerate(invs[1:], start=1):
        group = direct_product(group, cyclic_group(k, f"g{pos}"))
    if invs:
        # Re-label generators flatly: g0, g1, ...
        names = tuple(f"g{i}" for i in range(len(invs)))
        group = FiniteGroup(
            group.order,
            group.table,
            group.inverse,
            group.generators,
            names,
            group.words,
            name="x".join(f"C{k}" for k in invs),
        )
    return group


def diagnostic_dump(group: FiniteGroup) -> str:
    """Stable text snapshot: order, generator orders, table hash."""
    digest = hashlib.sha256(np.ascontiguousarray(group.table, dtype=np.int64).tobytes())
    lines = [f"order {group.order}"]
    for nm, g in zip(group.gen_names, group.generators):
        lines.append(f"generator {nm} = element {g}, order {element_order(group, g)}")
    lines.append(f"table sha256 {digest.hexdigest()}")
    return "\n".join(lines) + "\n"
