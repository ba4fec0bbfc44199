"""Seeded corpus builders shared by the unit and acceptance tests.

Everything here is deterministic via SplitMix64; the same seed always
yields the same corpus on every platform.
"""

from falab.generators import SplitMix64, gen_hamming, gen_levenshtein

LETTERS = "abcdefgh"


def random_regex(rng: SplitMix64, depth: int, alphabet_size: int) -> str:
    """Random pattern over the first ``alphabet_size`` letters."""
    roll = rng.below(100)
    if depth == 0 or roll < 35:
        leaf = rng.below(100)
        if leaf < 60:
            return LETTERS[rng.below(alphabet_size)]
        if leaf < 80:
            a, b = rng.below(alphabet_size), rng.below(alphabet_size)
            lo, hi = min(a, b), max(a, b)
            return f"[{LETTERS[lo]}]" if lo == hi else f"[{LETTERS[lo]}-{LETTERS[hi]}]"
        if leaf < 90:
            members = sorted({LETTERS[rng.below(alphabet_size)] for _ in range(2)})
            return "[" + "".join(members) + "]"
        return "."
    if roll < 60:
        n = 2 + rng.below(2)
        return "".join(random_regex(rng, depth - 1, alphabet_size) for _ in range(n))
    if roll < 80:
        n = 2 + rng.below(2)
        return ("(" + "|".join(random_regex(rng, depth - 1, alphabet_size)
                               for _ in range(n)) + ")")
    inner = f"({random_regex(rng, depth - 1, alphabet_size)})"
    quant = rng.below(5)
    if quant == 0:
        return inner + "*"
    if quant == 1:
        return inner + "+"
    if quant == 2:
        return inner + "?"
    if quant == 3:
        return inner + f"{{{1 + rng.below(3)}}}"
    lo = rng.below(3)
    return inner + f"{{{lo},{lo + rng.below(3)}}}"


def regex_corpus(count: int, seed: int, depth: int = 4,
                 max_alphabet: int = 8) -> list[str]:
    rng = SplitMix64(seed)
    return [random_regex(rng, depth, 1 + rng.below(max_alphabet))
            for _ in range(count)]


def mesh_corpus(seed: int, lengths=range(2, 9), max_d: int = 2,
                alphabet: int = 4) -> list[tuple[str, object]]:
    """Every mesh generator at every (length, d <= max_d) combination."""
    rng = SplitMix64(seed)
    items = []
    for length in lengths:
        for d in range(0, min(max_d, length) + 1):
            pattern = bytes(ord("a") + rng.below(alphabet)
                            for _ in range(length))
            items.append((f"hamming({pattern!r},{d})", gen_hamming(pattern, d)))
            items.append((f"levenshtein({pattern!r},{d})",
                          gen_levenshtein(pattern, d)))
    return items
