"""Chained construction with tunable compression speed.

A sampled family of pseudo-de-Bruijn words (properties P1/P2) is turned into
a word of length exactly n: one chain of ascending prefixes per family word,
gadgets inserted per chain as needed, zero padding at the end.  The plain
word compresses to O(n/l) blocks while the front-lettered copy parses into
far more.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .alignment import PADDING, REGULAR
from .construction import ConstructedWord, Segment, build_chain
from .errors import ConstructionError, ParameterError, SamplingError
from .generators import _gram_counts
from .parsing import Parsing, StreamParser, parse
from .words import Word


@dataclass(frozen=True)
class Params:
    n: int
    l: int
    gamma: float
    p: float                  # log2(n / l^2); 2^ceil(p) chains
    k: float                  # (log2 l) / 2
    m: float                  # max(gamma*p, gamma*log2 l)
    m_int: int
    family_count: int
    window: int               # gadget offsets [0, floor(2*k*sqrt(l))]
    in_theorem_range: bool
    notes: tuple[str, ...] = ()

    def to_json_obj(self) -> dict:
        return {"n": self.n, "l": self.l, "gamma": self.gamma, "p": self.p,
                "k": self.k, "m": self.m, "family_count": self.family_count,
                "window": self.window, "in_theorem_range": self.in_theorem_range,
                "notes": list(self.notes)}


def derive_params(n: int, l: int, gamma: float = 10.0, exact: bool = False) -> Params:
    """Derive the chained-construction parameters from (n, l, gamma).

    Structural impossibilities raise; running below the asymptotic window
    (small n) is allowed but flagged via ``in_theorem_range``.
    """
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    if l < 16:
        raise ParameterError("l must be >= 16")
    if n < l:
        raise ParameterError("n must be at least l")
    p = math.log2(n / (l * l))
    if p < -1e-9:
        raise ParameterError(f"l={l} exceeds sqrt(n): the chain count 2^p would be < 1")
    p = max(p, 0.0)
    if exact:
        n = l * l * (1 << int(p))
        p = float(int(p))
    k = math.log2(l) / 2
    m = max(gamma * p, gamma * math.log2(l))
    m_int = max(1, int(m))
    window = int(2 * k * math.sqrt(l))
    if max(window, m_int) > l - 2:
        raise ParameterError(
            f"l={l} is too small for the gadget shapes "
            f"(need max(window={window}, m={m_int}) <= l-2)")
    family_count = 1 << math.ceil(p - 1e-9)
    notes = []
    if l < (9 * gamma * math.log2(n)) ** 2:
        notes.append(f"l below the asymptotic window floor (9*gamma*log n)^2 = "
                     f"{(9 * gamma * math.log2(n)) ** 2:.3g}")
    if m > math.sqrt(l) / 9:
        notes.append("m exceeds sqrt(l)/9")
    if p > math.sqrt(l):
        notes.append("p exceeds sqrt(l)")
    return Params(n=n, l=l, gamma=gamma, p=p, k=k, m=m, m_int=m_int,
                  family_count=family_count, window=window,
                  in_theorem_range=not notes, notes=tuple(notes))


def check_p1(x, k: float, l: int) -> bool:
    """Exact census: every u with |u| <= k occurs at most k*l/2^|u| times."""
    data = x.data if isinstance(x, Word) else x
    if len(data) != l:
        raise ParameterError(f"word length {len(data)} != l={l}")
    for length in range(1, int(k) + 1):
        if _gram_counts(data, length).max() > k * l / (1 << length):
            return False
    return True


def check_p2(words, m_int: int) -> bool:
    """Every factor of size m occurs at most once across the whole family."""
    seen = set()
    for w in words:
        data = w.data if isinstance(w, Word) else w
        for i in range(len(data) - m_int + 1):
            gram = data[i:i + m_int]
            if gram in seen:
                return False
            seen.add(gram)
    return True


@dataclass
class Family:
    """An accepted sample: 2^p words of length l plus their sync offsets."""

    words: list[Word]
    q: list[int]
    params: Params
    seed: int
    retries: int


def _word_rng(seed: int, attempt: int, index: int) -> np.random.Generator:
    # per-word streams: documented derivation so published seeds reproduce
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([seed, attempt, index])))


def _draw_word(seed: int, attempt: int, index: int, l: int) -> Word:
    bits = _word_rng(seed, attempt, index).integers(0, 2, size=l, dtype=np.uint8)
    return Word((bits + ord("0")).tobytes())


RETRY_CAP = 64


def sample_family(params: Params, seed: int) -> Family:
    """Rejection-sample a family satisfying P1, P2, and a leading 1 in the
    first word; the whole family is redrawn on any failure."""
    last_failure = None
    for attempt in range(RETRY_CAP):
        words = [_draw_word(seed, attempt, j, params.l)
                 for j in range(params.family_count)]
        if words[0].data[0] != ord("1"):
            last_failure = "first word does not start with 1"
            continue
        bad = next((j for j, w in enumerate(words)
                    if not check_p1(w, params.k, params.l)), None)
        if bad is not None:
            last_failure = f"P1 failed for word {bad}"
            continue
        if not check_p2(words, params.m_int):
            last_failure = "P2 failed"
            continue
        q = [_q_formula(words, j) for j in range(len(words))]
        if any(qj > params.m for qj in q):
            last_failure = "synchronization offset exceeded m"  # unreachable given P2
            continue
        return Family(words=words, q=q, params=params, seed=seed, retries=attempt)
    raise SamplingError(
        f"family sampling failed {RETRY_CAP} times",
        {"n": params.n, "l": params.l, "gamma": params.gamma, "seed": seed,
         "last_failure": last_failure})


def _q_formula(words, j: int) -> int:
    """Smallest t such that words[j][0..t] is not a prefix of an earlier word."""
    x = words[j].data
    best = 0
    for other in words[:j]:
        y = other.data
        cp = 0
        limit = min(len(x), len(y))
        while cp < limit and x[cp] == y[cp]:
            cp += 1
        best = max(best, cp)
    return best


class GeneralGadgetFactory:
    """Chain gadgets: offset i>0 replays the violated prefix up to
    max(i, m), flips one letter, then pads from x[0..m-1] followed by ones;
    offset 0 starts from a word seen only by the front parsing."""

    def __init__(self, x: bytes, m_int: int, u_resolver):
        self.x = x
        self.m = m_int
        self.u_resolver = u_resolver
        self.resolved_u: bytes | None = None
        self.pad = x[:m_int] + b"1" * len(x)

    def make(self, i: int, c: int) -> bytes:
        if i == 0:
            if self.resolved_u is None:
                self.resolved_u = self.u_resolver()
            return self.resolved_u + self.x[:1] * c
        mp = max(i, self.m)
        if mp >= len(self.x):
            raise ConstructionError("gadget head does not fit inside the chain word",
                                    {"i": i, "m": self.m, "l": len(self.x)})
        return self.x[:mp] + bytes([self.x[mp] ^ 1]) + self.pad[:c]


def _make_u_resolver(parser: StreamParser, regulars: list[bytes],
                     green_words: set[bytes], m_int: int, h_red: int,
                     chain_index: int):
    def resolve() -> bytes:
        green = green_words | set(regulars)
        starts = parser.starts
        best = None
        for b in range(len(starts)):
            end = parser.block_end(b)
            if end > h_red:
                break
            length = end - starts[b]
            if length > m_int:
                continue
            wb = bytes(parser.buf[starts[b]:end])
            if wb in green:
                continue
            key = (length, wb)
            if best is None or key < best:
                best = key
        if best is None:
            raise ConstructionError(
                "no resynchronization word of size <= m exists in the front "
                "parsing but outside the plain parsing",
                {"chain": chain_index, "m": m_int, "half_point": h_red})
        return best[1]

    return resolve


def construct_general(params: Params, family: Family,
                      reparse: str = "checkpoint") -> ConstructedWord:
    """Build the length-n word: per-word chains, per-chain gadget loops,
    zero padding to exactly n letters."""
    if reparse not in ("checkpoint", "scratch"):
        raise ParameterError(f"unknown reparse mode {reparse!r}")
    scratch = reparse == "scratch"
    l = params.l
    parser = StreamParser()
    parser.feed(b"0")
    segments: list[Segment] = []
    green_words: set[bytes] = set()
    chains = []
    for j, xw in enumerate(family.words):
        xb = xw.data
        q_eff = 0
        while q_eff < l and xb[:q_eff + 1] in green_words:
            q_eff += 1
        if q_eff >= l:
            raise ConstructionError("chain word has no fresh prefix",
                                    {"chain": j})
        regulars = [xb[:t + 1] for t in range(q_eff, l)]
        half_t = l // 2
        if half_t < q_eff:
            raise ConstructionError("synchronization offset beyond the half point",
                                    {"chain": j, "q": q_eff})
        chain_green_start = parser.position - 1
        h_red = 1 + chain_green_start + sum(
            t + 1 for t in range(q_eff, half_t + 1))
        resolver = _make_u_resolver(parser, regulars, green_words,
                                    params.m_int, h_red, j)
        factory = GeneralGadgetFactory(xb, params.m_int, resolver)
        seg_lo = len(segments)
        record = build_chain(parser, segments, j, xw, q_eff, regulars,
                             window=params.window, factory=factory,
                             include_tail=False, scratch=scratch,
                             q_formula=family.q[j])
        record.resync_word = factory.resolved_u
        chains.append(record)
        # the chain's unit words join the plain dictionary used by later chains
        pos = 0
        for seg in segments[:seg_lo]:
            pos += seg.length
        for seg in segments[seg_lo:]:
            green_words.add(bytes(parser.buf[1 + pos:1 + pos + seg.length]))
            pos += seg.length

    w_prime = parser.position - 1
    if w_prime > params.n:
        raise ConstructionError(
            "construction overflowed the target length, which the size bound "
            "rules out", {"w_prime": w_prime, "n": params.n})
    pad = params.n - w_prime
    if pad:
        segments.append(Segment(PADDING, pad, chain=-1))
        parser.feed(b"0" * pad)
    word = Word(bytes(parser.buf[1:]))
    assert len(word) == params.n
    return ConstructedWord(
        word=word, segments=segments, chains=chains, gamma=params.gamma,
        front="0",
        meta={"params": params, "seed": family.seed, "w_prime": w_prime,
              "front_dict_size": parser.completed})


@dataclass(frozen=True)
class GeneralReport:
    n: int
    l: int
    gamma: float
    p: float
    dic_w: int
    dic_aw: int
    w_prime: int
    chain_count: int
    gadget_counts: list[int]
    chosen: list[int | None]
    upper_bound_ok: bool              # dic_w <= (3+sqrt(3))/2 * n/l
    upper_bound: float
    violation_caps_ok: bool           # per-chain cap over the gadget window
    pair_trade_off_ok: bool           # per-chain top-two violation sums <= s_j
    sync_ok: bool                     # green parse boundaries match the segments
    catastrophe_factor: float         # dic_aw / dic_w
    front_speed_scaled: float         # dic_aw * sqrt(l) / n
    per_chain_red_blocks: list[int]
    per_chain_red_target: float       # l^(3/2)/54

    def to_json_obj(self) -> dict:
        return {
            "schema": 1,
            "n": self.n, "l": self.l, "gamma": self.gamma, "p": self.p,
            "dic_w": self.dic_w, "dic_aw": self.dic_aw, "w_prime": self.w_prime,
            "chains": self.chain_count,
            "gadget_counts": self.gadget_counts,
            "chosen_i": self.chosen,
            "upper_bound": self.upper_bound,
            "upper_bound_ok": self.upper_bound_ok,
            "violation_caps_ok": self.violation_caps_ok,
            "pair_trade_off_ok": self.pair_trade_off_ok,
            "sync_ok": self.sync_ok,
            "catastrophe_factor": self.catastrophe_factor,
            "front_speed_scaled": self.front_speed_scaled,
            "per_chain_red_blocks": self.per_chain_red_blocks,
            "per_chain_red_target": self.per_chain_red_target,
        }


def _green_units_ok(cw: ConstructedWord, green: Parsing) -> bool:
    seg_starts = cw.segment_starts()
    units = [s for s, seg in zip(seg_starts, cw.segments) if seg.kind != PADDING]
    if green.starts[:len(units)] != units:
        return False
    # whatever follows the units must lie in the padding
    if len(green.starts) > len(units):
        pad_start = units[-1] + cw.segments[len(units) - 1].length if units else 0
        if green.starts[len(units)] != pad_start:
            return False
    return True


def per_chain_violations(cw: ConstructedWord, red: Parsing):
    """Violation counts {chain: {offset: count}} plus red blocks per chain."""
    seg_starts = cw.segment_starts()
    segments = cw.segments
    chain_hits: dict[int, dict[int, set[int]]] = {c.index: {} for c in cw.chains}
    chain_red: dict[int, int] = {c.index: 0 for c in cw.chains}
    chain_extent = {c.index: (c.start, c.start + c.length) for c in cw.chains}
    for b in range(red.block_count):
        rs, re = red.block_bounds(b)
        if rs == 0:
            continue
        lo, hi = rs - 1, re - 2
        for idx, (cs, ce) in chain_extent.items():
            if cs <= lo < ce:
                chain_red[idx] += 1
                break
        si = bisect_right(seg_starts, lo) - 1
        seg = segments[si]
        if seg.kind != REGULAR or hi > seg_starts[si] + seg.length - 1:
            continue
        hits = chain_hits[seg.chain].setdefault(lo - seg_starts[si], set())
        hits.add(seg.reg_index)
    counts = {c: {i: len(s) for i, s in hits.items()}
              for c, hits in chain_hits.items()}
    return counts, chain_red


def verify_general(cw: ConstructedWord) -> GeneralReport:
    """Fresh parses of w and 0w plus all the per-chain checks."""
    params: Params = cw.meta["params"]
    green = parse(cw.word.data)
    red = parse(b"0" + cw.word.data)
    sync_ok = _green_units_ok(cw, green)

    counts, chain_red = per_chain_violations(cw, red)
    cap = params.l / 2 + 2 * params.m + 1 + 2 * params.k * math.sqrt(params.l)
    caps_ok = True
    pairs_ok = True
    for chain in cw.chains:
        per_i = counts.get(chain.index, {})
        if any(c > cap for i, c in per_i.items() if i <= params.window):
            caps_ok = False
        top = sorted(per_i.values(), reverse=True)[:2]
        if len(top) == 2 and top[0] + top[1] > chain.regular_count:
            pairs_ok = False

    bound = (3 + math.sqrt(3)) / 2 * params.n / params.l
    return GeneralReport(
        n=params.n, l=params.l, gamma=params.gamma, p=params.p,
        dic_w=green.dict_size, dic_aw=red.dict_size,
        w_prime=cw.meta["w_prime"],
        chain_count=len(cw.chains),
        gadget_counts=[c.gadget_count for c in cw.chains],
        chosen=[c.chosen_i for c in cw.chains],
        upper_bound=bound,
        upper_bound_ok=green.dict_size <= bound,
        violation_caps_ok=caps_ok,
        pair_trade_off_ok=pairs_ok,
        sync_ok=sync_ok,
        catastrophe_factor=red.dict_size / green.dict_size,
        front_speed_scaled=red.dict_size * math.sqrt(params.l) / params.n,
        per_chain_red_blocks=[chain_red[c.index] for c in cw.chains],
        per_chain_red_target=params.l ** 1.5 / 54,
    )


def save_family(family: Family, path) -> None:
    p = family.params
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# lz78lab-family schema=1 n={p.n} l={p.l} gamma={p.gamma} "
                 f"p={p.p} k={p.k} m={p.m} seed={family.seed} "
                 f"retries={family.retries}\n")
        for w in family.words:
            fh.write(w.to_text() + "\n")


def load_family(path) -> Family:
    with open(path, encoding="ascii") as fh:
        header = fh.readline()
        if not header.startswith("# lz78lab-family"):
            raise ParameterError("not a family file")
        fields = dict(part.split("=", 1) for part in header.split()
                      if "=" in part)
        words = [Word.from_text(line) for line in fh if line.strip()]
    params = derive_params(int(fields["n"]), int(fields["l"]),
                           float(fields["gamma"]))
    q = [_q_formula(words, j) for j in range(len(words))]
    return Family(words=words, q=q, params=params,
                  seed=int(fields["seed"]), retries=int(fields["retries"]))
