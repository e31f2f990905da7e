"""Words, group presentations, and the catalog text format.

A word is a product of atoms: generator symbols, parenthesized subwords,
commutators ``[u,v] = u^-1 v^-1 u v``, any of them raised to an integer power.
Multi-argument commutators are stored left-normed, i.e. ``[a,b,c]`` means
``[[a,b],c]``.  Juxtaposition denotes the product; ``*`` is an optional
separator; the literal ``1`` is the empty word.

Grammar::

    word    := factor+
    factor  := atom ['^' int]
    atom    := generator | '1' | '(' word ')' | '[' word (',' word)+ ']'

Generator symbols are ASCII identifiers (letter, then letters/digits/underscore).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Union

from .errors import DuplicateNameError, UnknownGeneratorError, WordSyntaxError

if TYPE_CHECKING:
    from .engine import FiniteGroup


# ---------------------------------------------------------------------------
# word algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gen:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Grouped:
    """Parenthesized subword, kept so printing round-trips."""

    body: "Word"

    def __str__(self):
        return f"({self.body})"


@dataclass(frozen=True)
class Commutator:
    left: "Word"
    right: "Word"

    def __str__(self):
        return f"[{_comm_args(self)}]"


@dataclass(frozen=True)
class Power:
    base: Union[Gen, Grouped, Commutator]
    exponent: int

    def __str__(self):
        return f"{self.base}^{self.exponent}"


Atom = Union[Gen, Grouped, Commutator, Power]


def _comm_args(c: Commutator) -> str:
    # Flatten a left-normed chain back to the compact [a,b,c,...] form.
    left = c.left
    if len(left.atoms) == 1 and isinstance(left.atoms[0], Commutator):
        return f"{_comm_args(left.atoms[0])},{c.right}"
    return f"{left},{c.right}"


@dataclass(frozen=True)
class Word:
    """Immutable product of atoms; the empty tuple is the identity."""

    atoms: tuple[Atom, ...] = ()

    def __str__(self):
        if not self.atoms:
            return "1"
        pieces = [str(a) for a in self.atoms]
        out = [pieces[0]]
        for prev, cur in zip(pieces, pieces[1:]):
            # A separating space is only required when two identifier
            # characters would otherwise merge into one token.
            if _ident_char(prev[-1]) and _ident_char(cur[0]):
                out.append(" ")
            out.append(cur)
        return "".join(out)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.atoms + other.atoms)

    def generators(self) -> set[str]:
        names: set[str] = set()
        _collect_names(self, names)
        return names


def _ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _collect_names(w: Word, out: set[str]):
    for a in w.atoms:
        if isinstance(a, Power):
            a = a.base
        if isinstance(a, Gen):
            out.add(a.name)
        elif isinstance(a, Grouped):
            _collect_names(a.body, out)
        elif isinstance(a, Commutator):
            _collect_names(a.left, out)
            _collect_names(a.right, out)


def commutator_word(*parts: Word) -> Word:
    """Left-normed commutator of two or more words."""
    if len(parts) < 2:
        raise ValueError("commutator needs at least two arguments")
    acc = Commutator(parts[0], parts[1])
    for nxt in parts[2:]:
        acc = Commutator(Word((acc,)), nxt)
    return Word((acc,))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_ASCII_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_^-*,()[] \t")


class _Scanner:
    def __init__(self, text: str, generators: Iterable[str]):
        self.text = text
        self.pos = 0
        self.gens = set(generators)

    def error(self, message: str) -> WordSyntaxError:
        return WordSyntaxError(message, offset=self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def ident(self) -> str:
        start = self.pos
        if not self.peek().isalpha():
            raise self.error("expected a generator name")
        while self.pos < len(self.text) and _ident_char(self.text[self.pos]):
            self.pos += 1
        return self.text[start : self.pos]

    def generator(self) -> str:
        """Longest declared generator starting here; lets ``xy`` mean x*y."""
        best = ""
        for g in self.gens:
            if len(g) > len(best) and self.text.startswith(g, self.pos):
                best = g
        if not best:
            at = self.pos
            name = self.ident()
            raise UnknownGeneratorError(f"offset {at}: undeclared generator {name!r}")
        self.pos += len(best)
        return best

    def integer(self) -> int:
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        if not self.peek().isdigit():
            self.pos = start
            raise self.error("expected an integer exponent")
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start : self.pos])


def parse_word(text: str, generators: Iterable[str]) -> Word:
    """Parse ``text`` over the declared ``generators``.

    Raises WordSyntaxError (with byte offset) on malformed input and
    UnknownGeneratorError for undeclared symbols.
    """
    for i, ch in enumerate(text):
        if ch not in _ASCII_OK:
            raise WordSyntaxError(f"character {ch!r} not allowed", offset=i)
    sc = _Scanner(text, generators)
    w = _parse_word(sc, toplevel=True)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise sc.error("trailing input")
    return w


def _parse_word(sc: _Scanner, toplevel=False) -> Word:
    atoms: list[Atom] = []
    first = True
    while True:
        sc.skip_ws()
        if not first and sc.peek() == "*":
            sc.pos += 1
            sc.skip_ws()
        ch = sc.peek()
        if ch == "" or ch in ("]", ")", ","):
            break
        atoms.extend(_parse_factor(sc))
        first = False
    if first:
        raise sc.error("empty word")
    return Word(tuple(atoms))


def _parse_factor(sc: _Scanner) -> tuple[Atom, ...]:
    atom = _parse_atom(sc)
    sc.skip_ws()
    exp = 1
    if sc.peek() == "^":
        sc.pos += 1
        sc.skip_ws()
        exp = sc.integer()
    if atom is None or exp == 0:
        return ()
    if exp == 1:
        return (atom,)
    return (Power(atom, exp),)


def _parse_atom(sc: _Scanner) -> Optional[Atom]:
    ch = sc.peek()
    if ch == "1":
        sc.pos += 1
        return None
    if ch == "(":
        sc.pos += 1
        body = _parse_word(sc)
        sc.skip_ws()
        sc.expect(")")
        return Grouped(body)
    if ch == "[":
        sc.pos += 1
        parts = [_parse_word(sc)]
        sc.skip_ws()
        while sc.peek() == ",":
            sc.pos += 1
            parts.append(_parse_word(sc))
            sc.skip_ws()
        sc.expect("]")
        if len(parts) < 2:
            raise sc.error("commutator needs at least two arguments")
        return commutator_word(*parts).atoms[0]
    if ch.isalpha():
        return Gen(sc.generator())
    raise sc.error("expected a generator, '(', '[' or '1'")


# ---------------------------------------------------------------------------
# presentations and catalog entries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """Finite presentation: ordered generator symbols and relator words (each = 1)."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...]
    order: Optional[int] = None

    def __post_init__(self):
        seen = set()
        for g in self.generators:
            if not g or not g[0].isalpha() or not all(_ident_char(c) and c.isascii() for c in g):
                raise WordSyntaxError(f"bad generator name {g!r}")
            if g in seen:
                raise DuplicateNameError(f"duplicate generator {g!r}")
            seen.add(g)
        for w in self.relators:
            undeclared = w.generators() - seen
            if undeclared:
                raise UnknownGeneratorError(
                    f"relator uses undeclared generator(s) {sorted(undeclared)}"
                )
        if self.order is not None and self.order < 1:
            raise WordSyntaxError("declared order must be positive")

    @classmethod
    def parse(cls, generators: Iterable[str], relator_texts: Iterable[str], order=None):
        gens = tuple(generators)
        rels = tuple(parse_word(t, gens) for t in relator_texts)
        return cls(gens, rels, order)


@dataclass(frozen=True)
class CatalogEntry:
    """One named presentation in a catalog file.

    ``presentation`` is None for placeholder entries (tag ``missing-source``)
    that record a group the source names but never presents.
    """

    name: str
    presentation: Optional[Presentation]
    tags: tuple[str, ...] = ()
    source: str = ""

    @property
    def missing_source(self) -> bool:
        return self.presentation is None


def _split_commas(text: str, line: int) -> list[str]:
    """Split on commas that are not nested inside brackets or parentheses."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise WordSyntaxError("unbalanced bracket", line=line)
        elif ch == "," and depth == 0:
            parts.append(text[start:i].strip())
            start = i + 1
    if depth != 0:
        raise WordSyntaxError("unbalanced bracket", line=line)
    tail = text[start:].strip()
    if tail or parts:
        parts.append(tail)
    return [p for p in parts if p]


_ENTRY_KEYS = {"name", "order", "generators", "relators", "tags", "source"}


def parse_catalog(text: str) -> list[CatalogEntry]:
    """Parse the line-oriented catalog format.

    Blocks begin with ``[group]``; fields are ``key = value`` lines; ``#``
    starts a comment.  ``order``, ``tags`` and ``source`` are optional, and a
    block tagged ``missing-source`` may omit generators and relators.
    """
    entries: list[CatalogEntry] = []
    block: Optional[dict] = None
    names: set[str] = set()

    def finish(block, line):
        if block is None:
            return
        name = block.get("name")
        if not name:
            raise WordSyntaxError("group block has no name", line=block["_line"])
        if name in names:
            raise DuplicateNameError(f"duplicate group name {name!r}")
        names.add(name)
        tags = tuple(t.strip() for t in block.get("tags", "").split(",") if t.strip())
        source = block.get("source", "")
        gens_text = block.get("generators")
        rels_text = block.get("relators")
        if gens_text is None:
            if rels_text is not None:
                raise WordSyntaxError("relators given without generators", line=block["_line"])
            if "missing-source" not in tags:
                raise WordSyntaxError(
                    f"group {name!r} has no generators and is not tagged missing-source",
                    line=block["_line"],
                )
            entries.append(CatalogEntry(name, None, tags, source))
            return
        gens = tuple(g.strip() for g in gens_text.split(",") if g.strip())
        rel_parts = _split_commas(rels_text or "", block["_line"])
        order = None
        if "order" in block:
            try:
                order = int(block["order"])
            except ValueError:
                raise WordSyntaxError(f"bad order {block['order']!r}", line=block["_line"])
        try:
            pres = Presentation.parse(gens, rel_parts, order)
        except WordSyntaxError as exc:
            raise WordSyntaxError(f"in group {name!r}: {exc}", line=block["_line"])
        entries.append(CatalogEntry(name, pres, tags, source))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[group]":
            finish(block, lineno)
            block = {"_line": lineno}
            continue
        if line.startswith("[") and line.endswith("]"):
            raise WordSyntaxError(f"unknown section {line!r}", line=lineno)
        if "=" not in line:
            raise WordSyntaxError("expected 'key = value'", line=lineno)
        if block is None:
            raise WordSyntaxError("field outside a [group] block", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ENTRY_KEYS:
            raise WordSyntaxError(f"unknown key {key!r}", line=lineno)
        if key in block:
            raise WordSyntaxError(f"repeated key {key!r}", line=lineno)
        block[key] = value
    finish(block, None)
    return entries


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate_word(w: Word, assignment: Mapping[str, int], group: "FiniteGroup") -> int:
    """Evaluate ``w`` in ``group`` under a generator-symbol assignment.

    Commutators and powers are expanded here, so the stored words stay in
    their human-readable source form.
    """
    acc = group.identity
    for atom in w.atoms:
        acc = group.mul(acc, _eval_atom(atom, assignment, group))
    return acc


def _eval_atom(atom: Atom, assignment: Mapping[str, int], group: "FiniteGroup") -> int:
    if isinstance(atom, Gen):
        try:
            return assignment[atom.name]
        except KeyError:
            raise UnknownGeneratorError(f"no assignment for generator {atom.name!r}")
    if isinstance(atom, Power):
        return group.power(_eval_atom(atom.base, assignment, group), atom.exponent)
    if isinstance(atom, Grouped):
        return evaluate_word(atom.body, assignment, group)
    if isinstance(atom, Commutator):
        u = evaluate_word(atom.left, assignment, group)
        v = evaluate_word(atom.right, assignment, group)
        return group.mul(group.mul(group.inv(u), group.inv(v)), group.mul(u, v))
    raise TypeError(f"not an atom: {atom!r}")
