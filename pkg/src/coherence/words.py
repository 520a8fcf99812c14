"""Free-group word algebra on integer-coded letters.

A letter is a nonzero integer: ``+k`` is generator ``k-1`` read forward,
``-k`` is its inverse.  Words are tuples of letters; ``()`` is the empty
word.  Generator names are kept only for parsing and printing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

Word = tuple[int, ...]


def letter_gen(letter: int) -> int:
    """Generator index of a letter."""
    return abs(letter) - 1


def letter_sign(letter: int) -> int:
    return 1 if letter > 0 else -1


def invert(word: Word) -> Word:
    return tuple(-x for x in reversed(word))


def free_reduce(word: Word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(word: Word) -> bool:
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1))


def is_cyclically_reduced(word: Word) -> bool:
    if not is_reduced(word):
        return False
    return len(word) < 2 or word[0] != -word[-1]


def cyclic_reduce(word: Word) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``word = conjugator core conjugator^-1``.

    The core is cyclically reduced.
    """
    core = free_reduce(word)
    prefix: list[int] = []
    while len(core) >= 2 and core[0] == -core[-1]:
        prefix.append(core[0])
        core = core[1:-1]
    return core, tuple(prefix)


def rotate(word: Word, k: int) -> Word:
    """Cyclic rotation: ``rotate(w, k)[j] == w[(j + k) % len(w)]``."""
    if not word:
        return word
    k %= len(word)
    return word[k:] + word[:k]


def rotations(word: Word) -> list[Word]:
    return [rotate(word, k) for k in range(max(1, len(word)))]


def minimal_period(seq: tuple) -> int:
    """Smallest d dividing len(seq) with seq equal to its d-rotation."""
    n = len(seq)
    for d in range(1, n + 1):
        if n % d == 0 and all(seq[i] == seq[i % d] for i in range(n)):
            return d
    raise AssertionError("unreachable for nonempty input")


@dataclass(frozen=True)
class ExponentDecomposition:
    root: Word
    exponent: int


def exponent_decompose(word: Word) -> ExponentDecomposition:
    """Write a nonempty cyclically reduced word as root**exponent, exponent maximal."""
    if not word:
        raise ValueError("empty word has no exponent decomposition")
    if not is_cyclically_reduced(word):
        raise ValueError("word must be cyclically reduced")
    d = minimal_period(word)
    return ExponentDecomposition(word[:d], len(word) // d)


def cyclic_subword(word: Word, start: int, length: int) -> Word:
    """Letters at cyclic positions start .. start+length-1."""
    n = len(word)
    if not 1 <= length <= n:
        raise ValueError(f"subword length {length} out of range 1..{n}")
    start %= n
    return tuple(word[(start + i) % n] for i in range(length))


def complement(word: Word, start: int, length: int) -> Word:
    """Remainder v with u*v a rotation of the cyclic word, u the (start, length) subword.

    The replacement word for u in a rewriting step is invert(v).
    """
    n = len(word)
    if not 1 <= length <= n:
        raise ValueError(f"occurrence length {length} out of range 1..{n}")
    start %= n
    return tuple(word[(start + length + i) % n] for i in range(n - length))


def enumerate_reduced_words(num_gens: int, max_len: int) -> Iterator[Word]:
    """Freely reduced nonempty words, shortest first, lexicographic within a length.

    Letter order within a length: 1, -1, 2, -2, ...
    """
    alphabet = [s * (g + 1) for g in range(num_gens) for s in (1, -1)]
    level: list[Word] = [()]
    for _ in range(max_len):
        nxt: list[Word] = []
        for w in level:
            for x in alphabet:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        yield from nxt
        level = nxt


_NAME_OK = r"[A-Za-z][A-Za-z0-9_]*"


@dataclass(frozen=True)
class Presentation:
    """A finite presentation: generator names plus cyclically reduced relators.

    ``asserted_classes`` records class assertions attached by the user
    (e.g. that Dehn's algorithm is known to solve the word problem);
    ``asserted_lambda`` is the asserted replacement-quality parameter as a
    :class:`fractions.Fraction`, if any.
    """

    generators: tuple[str, ...]
    relators: tuple[Word, ...]
    asserted_classes: tuple[str, ...] = field(default=())
    asserted_lambda: object = None

    def __post_init__(self):
        import re

        seen = set()
        for name in self.generators:
            if not re.fullmatch(_NAME_OK, name):
                raise ValueError(f"bad generator name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate generator name {name!r}")
            seen.add(name)
        k = len(self.generators)
        for r in self.relators:
            if not r:
                raise ValueError("empty relator")
            if not is_cyclically_reduced(r):
                raise ValueError("relators must be cyclically reduced")
            for x in r:
                if not 0 <= letter_gen(x) < k:
                    raise ValueError(f"letter {x} outside generator range")

    @property
    def num_generators(self) -> int:
        return len(self.generators)

    def letter_name(self, letter: int) -> str:
        name = self.generators[letter_gen(letter)]
        return name if letter > 0 else name + "-"

    def word_str(self, word: Word) -> str:
        return " ".join(self.letter_name(x) for x in word) if word else "1"

    def occurring_generators(self, relator_index: int) -> tuple[int, ...]:
        """Indices of generators occurring (either sign) in a relator."""
        return tuple(sorted({letter_gen(x) for x in self.relators[relator_index]}))
