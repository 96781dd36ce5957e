"""Group presentations, the word-problem oracles and small cancellation.

Two oracles are supported: plain free reduction (sound for presentations
with no relators) and Dehn's algorithm, which is a complete word-problem
solver once the presentation is certified C'(1/6).  The certificate is
computed by ``verify_small_cancellation`` and checked at parse time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

from .words import (
    GeneratorAlphabet,
    PresentationError,
    Word,
    cyclically_reduce,
    free_reduce,
    inverse_word,
)

log = logging.getLogger(__name__)

ORACLE_FREE = "free"
ORACLE_DEHN = "dehn"


@dataclass(frozen=True)
class Presentation:
    """Alphabet plus cyclically reduced relators and the oracle choice."""

    alphabet: GeneratorAlphabet
    relators: tuple[Word, ...]
    oracle_kind: str
    name: str | None = None

    def __post_init__(self):
        if self.oracle_kind not in (ORACLE_FREE, ORACLE_DEHN):
            raise PresentationError(f"unknown oracle kind {self.oracle_kind!r}")
        for r in self.relators:
            if not r:
                raise PresentationError("empty relator")
            if cyclically_reduce(r, self.alphabet) != r:
                raise PresentationError("relator not cyclically reduced")

    def oracle(self) -> "WordOracle":
        return _make_oracle(self)

    def text(self) -> str:
        """Round-trippable presentation-file form (used for cache keys)."""
        lines = ["gens: " + " ".join(self.alphabet.symbols)]
        if self.relators:
            lines.append(
                "relators: " + " ".join(self.alphabet.format_word(r) for r in self.relators)
            )
        lines.append(f"oracle: {self.oracle_kind}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Small cancellation
# ---------------------------------------------------------------------------

PieceWitness = tuple[tuple[int, int, int], tuple[int, int, int]]


@dataclass(frozen=True)
class PieceReport:
    """Outcome of the C'(1/6) check.

    ``max_piece_len`` is the longest proper subword occurring in two
    distinct places among the cyclic conjugates of the relators and their
    inverses; occurrences are indexed by (relator, sign, offset).
    """

    max_piece_len: int
    min_relator_len: int
    satisfies_c16: bool
    witness: PieceWitness | None = None

    @property
    def vacuous(self) -> bool:
        return self.min_relator_len == 0


def _rotations(word: Word) -> list[Word]:
    return [word[i:] + word[:i] for i in range(len(word))]


def verify_small_cancellation(pres: Presentation) -> PieceReport:
    """Enumerate pieces over all cyclic conjugates of relators and their
    inverses and compare the longest one against min relator length / 6.

    A piece must be a proper subword, so a relator that is a proper power
    contributes pieces up to one letter short of its full length.
    """
    if not pres.relators:
        return PieceReport(0, 0, True)
    occ: list[tuple[Word, tuple[int, int, int]]] = []
    for ri, r in enumerate(pres.relators):
        for sign, base in ((1, r), (-1, inverse_word(r, pres.alphabet))):
            for off, rot in enumerate(_rotations(base)):
                occ.append((rot, (ri, sign, off)))
    best = 0
    witness: PieceWitness | None = None
    for i in range(len(occ)):
        wi, oi = occ[i]
        for j in range(i + 1, len(occ)):
            wj, oj = occ[j]
            cap = min(len(wi), len(wj)) - 1
            lcp = 0
            while lcp < cap and wi[lcp] == wj[lcp]:
                lcp += 1
            if lcp > best:
                best = lcp
                witness = (oi, oj)
    min_len = min(len(r) for r in pres.relators)
    return PieceReport(best, min_len, best < min_len / 6, witness)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------


class WordOracle:
    """Reduces words to a deterministic representative; the representative
    is empty iff the word represents the identity."""

    kind = ORACLE_FREE

    def __init__(self, alphabet: GeneratorAlphabet):
        self.alphabet = alphabet

    def reduce(self, word: Word) -> Word:
        return free_reduce(word, self.alphabet)

    def is_identity(self, word: Word) -> bool:
        return not self.reduce(word)


class DehnOracle(WordOracle):
    """Classical greedy Dehn's algorithm.

    Any subword that is more than half of a cyclic conjugate of a relator
    (or relator inverse) is replaced by the inverse of the complementary
    part; replacements are applied leftmost-then-longest, so the output is
    deterministic.  Complete for the word problem on certified C'(1/6)
    presentations.
    """

    kind = ORACLE_DEHN

    _REPL = -1  # trie key marking a terminal node's replacement

    def __init__(self, pres: Presentation):
        super().__init__(pres.alphabet)
        table: dict[Word, Word] = {}
        forms = set()
        for r in pres.relators:
            forms.update(_rotations(r))
            forms.update(_rotations(inverse_word(r, pres.alphabet)))
        for t in sorted(forms):
            half = len(t) // 2
            for cut in range(half + 1, len(t) + 1):
                prefix = t[:cut]
                repl = inverse_word(t[cut:], pres.alphabet)
                old = table.get(prefix)
                if old is None or (len(repl), repl) < (len(old), old):
                    table[prefix] = repl
        trie: dict = {}
        for prefix, repl in table.items():
            node = trie
            for x in prefix:
                node = node.setdefault(x, {})
            node[self._REPL] = repl
        self._trie = trie

    def reduce(self, word: Word) -> Word:
        w = free_reduce(word, self.alphabet)
        trie = self._trie
        repl_key = self._REPL
        while True:
            hit = None
            n = len(w)
            for i in range(n):
                node = trie
                j = i
                while j < n:
                    node = node.get(w[j])
                    if node is None:
                        break
                    j += 1
                    repl = node.get(repl_key)
                    if repl is not None:
                        hit = (i, j - i, repl)  # longest match at this i wins
                if hit:
                    break
            if not hit:
                return w
            i, length, repl = hit
            w = free_reduce(w[:i] + repl + w[i + length :], self.alphabet)


@lru_cache(maxsize=64)
def _make_oracle(pres: Presentation) -> WordOracle:
    if pres.oracle_kind == ORACLE_DEHN:
        return DehnOracle(pres)
    return WordOracle(pres.alphabet)


def dehn_reduce(word: Word, pres: Presentation) -> Word:
    """Dehn-reduce ``word``; requires the presentation's oracle to be the
    (certified) Dehn one."""
    if pres.oracle_kind != ORACLE_DEHN:
        raise PresentationError("dehn_reduce requires a Dehn-certified presentation")
    return pres.oracle().reduce(word)


# ---------------------------------------------------------------------------
# Parsing and presets
# ---------------------------------------------------------------------------

PRESET_TEXTS = {
    "f2": "gens: a A b B\n",
    "z": "gens: a A\n",
    "surface2": "gens: a A b B c C d D\nrelators: abABcdCD\noracle: dehn\n",
}


def parse_presentation(text: str, name: str | None = None) -> Presentation:
    """Parse the line-oriented presentation format.

    Line 1: ``gens:`` and an even-length symbol list in declaration order,
    inverse pairs given by letter case.  Line 2 (optional): ``relators:``
    and space-separated words.  Line 3 (optional): ``oracle: free|dehn``.
    Relators are freely and cyclically reduced on ingest (with a warning if
    that changed them).  When relators are present the oracle defaults to
    Dehn and the C'(1/6) certificate is checked here; a failed certificate
    is an error since no sound oracle would remain.
    """
    gens: list[str] | None = None
    relator_words: list[str] = []
    oracle_decl: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip().lower()
        if key == "gens":
            if gens is not None:
                raise PresentationError(f"line {lineno}: duplicate gens line")
            gens = rest.split()
        elif key == "relators":
            relator_words.extend(rest.split())
        elif key == "oracle":
            oracle_decl = rest.strip().lower()
        else:
            raise PresentationError(f"line {lineno}: unrecognized line {raw!r}")
    if gens is None:
        raise PresentationError("missing gens line")
    alphabet = GeneratorAlphabet.from_case_pairs(gens)

    relators: list[Word] = []
    for wtext in relator_words:
        w = alphabet.parse_word(wtext)
        reduced = cyclically_reduce(w, alphabet)
        if reduced != w:
            log.warning("relator %r cyclically reduced to %r", wtext, alphabet.format_word(reduced))
        if reduced:
            relators.append(reduced)

    if oracle_decl is None:
        oracle_kind = ORACLE_DEHN if relators else ORACLE_FREE
    elif oracle_decl in (ORACLE_FREE, ORACLE_DEHN):
        oracle_kind = oracle_decl
    else:
        raise PresentationError(f"unknown oracle {oracle_decl!r}")

    if oracle_kind == ORACLE_FREE and relators:
        raise PresentationError(
            "oracle 'free' is only sound without relators; use oracle 'dehn'"
        )
    pres = Presentation(alphabet, tuple(relators), oracle_kind, name=name)
    if oracle_kind == ORACLE_DEHN and relators:
        report = verify_small_cancellation(pres)
        if not report.satisfies_c16:
            raise PresentationError(
                "presentation is not C'(1/6) "
                f"(max piece {report.max_piece_len}, min relator {report.min_relator_len}); "
                "the Dehn oracle would be unsound"
            )
    return pres


def preset(name: str) -> Presentation:
    """Built-in presentations: ``f2``, ``z``, ``surface2``."""
    try:
        text = PRESET_TEXTS[name]
    except KeyError:
        raise PresentationError(f"unknown preset {name!r}") from None
    return parse_presentation(text, name=name)
