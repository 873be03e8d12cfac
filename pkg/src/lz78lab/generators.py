"""Structured word generators: de Bruijn sequences, prefix concatenations,
the worst-case word, and occurrence counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .words import Word, as_bits


@dataclass(frozen=True)
class DeBruijnWord:
    """A de Bruijn word of order k: length 2^k + k - 1, every k-gram once."""

    word: Word
    order: int


def _eulerian_cycle(k: int, seed: int) -> list[int]:
    """Edge labels of an Eulerian circuit on the (k-1)-bit shift graph.

    Deterministic for fixed (k, seed); seed permutes the per-vertex order in
    which the two outgoing edges are tried, which picks a different circuit.
    """
    nverts = 1 << (k - 1)
    mask = nverts - 1
    if seed:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
        prefs = rng.integers(0, 2, size=nverts, dtype=np.uint8).tolist()
    else:
        prefs = [0] * nverts
    tried = [0] * nverts
    stack = [(0, -1)]
    out = []
    while stack:
        v, inlabel = stack[-1]
        t = tried[v]
        if t < 2:
            tried[v] = t + 1
            a = t ^ prefs[v]
            stack.append((((v << 1) | a) & mask, a))
        else:
            stack.pop()
            if inlabel >= 0:
                out.append(inlabel)
    out.reverse()
    return out


def de_bruijn(k: int, require_prefix=None, seed: int = 0) -> DeBruijnWord:
    """Generate a de Bruijn word of order k (length 2^k + k - 1).

    The underlying cyclic sequence is rotated so that ``require_prefix``
    leads; any prefix of length <= k is always realizable.  Deterministic for
    fixed (k, prefix, seed).
    """
    if k < 1:
        raise ParameterError("order k must be >= 1")
    n = 1 << k
    prefix = as_bits(require_prefix) if require_prefix is not None else b""
    if len(prefix) > n + k - 1:
        raise ParameterError(
            f"prefix of length {len(prefix)} cannot occur in a word of length {n + k - 1}")
    for attempt_seed in _seed_ladder(seed):
        cyc = _eulerian_cycle(k, attempt_seed)
        text = bytes(48 + b for b in cyc)
        if not prefix:
            return DeBruijnWord(Word(text + text[:k - 1]), k)
        doubled = text + text
        at = 0
        probe = prefix[:n]
        while True:
            at = doubled.find(probe, at)
            if at < 0 or at >= n:
                break
            rotated = doubled[at:at + n]
            linear = rotated + rotated[:k - 1]
            if linear.startswith(prefix):
                return DeBruijnWord(Word(linear), k)
            at += 1
    raise ParameterError(
        f"no generated de Bruijn word of order {k} starts with the requested prefix")


def _seed_ladder(seed: int, extra: int = 8):
    yield seed
    # long prefixes may miss one particular circuit; retry nearby tie-breaks
    for i in range(1, extra + 1):
        yield (seed or 1) * 1000003 + i


def _gram_counts(data: bytes, length: int) -> np.ndarray:
    """Occurrence count of every length-``length`` value (linear, overlapping)."""
    bits = np.frombuffer(data, dtype=np.uint8) & 1
    n = len(bits) - length + 1
    if n <= 0:
        return np.zeros(1 << length, dtype=np.int64)
    vals = np.zeros(n, dtype=np.int64)
    for j in range(length):
        vals = (vals << 1) | bits[j:j + n]
    return np.bincount(vals, minlength=1 << length)


def is_de_bruijn(w, k: int) -> bool:
    """True iff |w| = 2^k + k - 1 and every k-gram occurs exactly once."""
    data = as_bits(w)
    if k < 1 or len(data) != (1 << k) + k - 1:
        return False
    return bool((_gram_counts(data, k) == 1).all())


def star_census_ok(db: DeBruijnWord, max_len: int | None = None) -> bool:
    """Exhaustive check that every u with |u| <= k occurs exactly 2^(k-|u|) times.

    Counted on the underlying cyclic sequence (occurrence starts in
    [0, 2^k)): on the linearized word the wrap-around tail re-exposes the
    first few starts, so the exact equality can only hold cyclically.
    """
    k = db.order
    data = db.word.data
    cycle = 1 << k
    top = k if max_len is None else min(k, max_len)
    for length in range(1, top + 1):
        counts = _gram_counts(data[:cycle + length - 1], length)
        if not (counts == 1 << (k - length)).all():
            return False
    return True


def pref(x) -> Word:
    """Concatenation of all prefixes of x in ascending length."""
    return pref_gt(x, 0)


def pref_gt(x, p: int) -> Word:
    """Concatenation of the prefixes of x of length p+1, p+2, ..., |x|."""
    data = as_bits(x)
    if not 0 <= p < len(data):
        raise ParameterError(f"p={p} out of range for a word of length {len(data)}")
    return Word(b"".join(data[:i] for i in range(p + 1, len(data) + 1)))


def worst_case_word(n: int) -> Word:
    """All words of size <= n concatenated in length-lexicographic order."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    parts = []
    for size in range(1, n + 1):
        for v in range(1 << size):
            parts.append(format(v, f"0{size}b").encode("ascii"))
    return Word(b"".join(parts))


def occurrences(w, u) -> int:
    """Number of (possibly overlapping) occurrences of u as a factor of w."""
    haystack = as_bits(w)
    needle = as_bits(u)
    if not needle:
        raise ParameterError("occurrence counting requires |u| >= 1")
    count = 0
    at = haystack.find(needle)
    while at >= 0:
        count += 1
        at = haystack.find(needle, at + 1)
    return count
