"""Finite-prefix approximation of the level-structured infinite construction.

Levels of doubling word length are generated on demand: each level samples a
family under its own local census property plus cross-level factor uniqueness,
and contributes one chain per word, built exactly like the chained
construction.  Compression-ratio curves of growing prefixes stand in for the
limit values, which are out of reach at desk scale.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .construction import ConstructedWord, Segment, build_chain
from .errors import ParameterError, SamplingError
from .general import GeneralGadgetFactory, _make_u_resolver, check_p1
from .parsing import StreamParser, ratio_from_counts
from .words import Word


@dataclass(frozen=True)
class LevelParams:
    index: int
    l: int
    p: float
    k: float
    m_formula: float      # gamma * p
    m_eff: int            # factor size actually used for the uniqueness census
    count: int            # number of words this level contributes
    window: int


@dataclass(frozen=True)
class Schedule:
    l0: int
    gamma: float
    levels: list[LevelParams]
    in_theorem_range: bool
    notes: tuple[str, ...] = ()


def schedule(l0: int, gamma: float, levels: int) -> Schedule:
    """Per-level parameters l_i = l0*2^i, p_i = sqrt(l_i)/(9*gamma) - 2*log2(l_i).

    Rejects schedules whose first level is empty (p_0 < 1) or whose counts
    fail to increase, naming the failing level.
    """
    if levels < 1:
        raise ParameterError("need at least one level")
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    out = []
    notes = []
    prev_p = None
    prev_cum = 0
    total_letters = 0
    for i in range(levels):
        l = l0 * (1 << i)
        p = math.sqrt(l) / (9 * gamma) - 2 * math.log2(l)
        if i == 0 and p < 1:
            raise ParameterError(
                f"level 0 is infeasible: p_0 = {p:.3f} < 1 for l0={l0}, gamma={gamma}")
        if prev_p is not None and p <= prev_p:
            raise ParameterError(f"level {i} does not grow: p_{i} = {p:.3f} <= "
                                 f"p_{i - 1} = {prev_p:.3f}")
        cum = int(2 ** p)
        count = cum - prev_cum
        if count <= 0:
            raise ParameterError(f"level {i} is empty after rounding")
        k = math.log2(l) / 2
        window = int(2 * k * math.sqrt(l))
        total_letters += count * l
        m_floor = math.ceil(2 * math.log2(max(total_letters, 4))) + 2
        m_eff = max(math.ceil(gamma * p), m_floor)
        if max(window, m_eff) > l - 2:
            raise ParameterError(
                f"level {i} cannot host its gadgets: "
                f"max(window={window}, m={m_eff}) > l-2={l - 2}")
        if m_eff > gamma * p:
            notes.append(f"level {i}: factor-uniqueness size raised to {m_eff} "
                         f"(formula value {gamma * p:.2f} too small at this scale)")
        out.append(LevelParams(index=i, l=l, p=p, k=k, m_formula=gamma * p,
                               m_eff=m_eff, count=count, window=window))
        prev_p, prev_cum = p, cum
    if gamma < 10:
        notes.append("gamma below 10: outside the asymptotic regime")
    return Schedule(l0=l0, gamma=gamma, levels=out,
                    in_theorem_range=not notes, notes=tuple(notes))


RETRY_CAP = 64


def _sample_level_word(seed: int, level: LevelParams, index: int,
                       corpus_blob: bytes, require_leading_one: bool) -> Word:
    for attempt in range(RETRY_CAP):
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([seed, level.index, index, attempt])))
        bits = rng.integers(0, 2, size=level.l, dtype=np.uint8)
        data = (bits + ord("0")).tobytes()
        if require_leading_one and data[0] != ord("1"):
            continue
        if not check_p1(data, level.k, level.l):
            continue
        if not _fresh_factors(data, level.m_eff, corpus_blob):
            continue
        return Word(data)
    raise SamplingError(
        f"level {level.index} word {index} failed {RETRY_CAP} draws",
        {"level": level.index, "index": index, "l": level.l, "m": level.m_eff})


def _fresh_factors(data: bytes, m: int, corpus_blob: bytes) -> bool:
    """All m-grams of ``data`` unique within it and absent from the corpus."""
    seen = set()
    for i in range(len(data) - m + 1):
        gram = data[i:i + m]
        if gram in seen or corpus_blob.find(gram) >= 0:
            return False
        seen.add(gram)
    return True


def build_prefix(sched: Schedule, budget_n: int, seed: int) -> ConstructedWord:
    """Emit the first budget_n letters of the level construction.

    Words are sampled on demand; generation stops once the budget is covered
    and the final chain is truncated.
    """
    l0 = sched.l0
    if budget_n < l0 * (l0 + 1) // 2:
        raise ParameterError(
            f"budget {budget_n} cannot cover one full level-0 chain "
            f"(~{l0 * (l0 + 1) // 2} letters)")
    parser = StreamParser()
    parser.feed(b"0")
    segments: list[Segment] = []
    green_words: set[bytes] = set()
    corpus_blob = b""
    chains = []
    words_per_level: dict[int, int] = {}
    chain_counter = 0
    done = False
    for level in sched.levels:
        if done:
            break
        for widx in range(level.count):
            xw = _sample_level_word(seed, level, widx, corpus_blob,
                                    require_leading_one=(chain_counter == 0))
            xb = xw.data
            q_eff = 0
            while q_eff < level.l and xb[:q_eff + 1] in green_words:
                q_eff += 1
            if q_eff > level.m_eff:
                raise SamplingError("synchronization offset exceeded the level's m",
                                    {"level": level.index, "word": widx, "q": q_eff})
            regulars = [xb[:t + 1] for t in range(q_eff, level.l)]
            half_t = level.l // 2
            chain_green_start = parser.position - 1
            h_red = 1 + chain_green_start + sum(
                t + 1 for t in range(q_eff, half_t + 1))
            resolver = _make_u_resolver(parser, regulars, green_words,
                                        level.m_eff, h_red, chain_counter)
            factory = GeneralGadgetFactory(xb, level.m_eff, resolver)
            seg_lo = len(segments)
            record = build_chain(parser, segments, chain_counter, xw, q_eff,
                                 regulars, window=level.window, factory=factory,
                                 include_tail=False)
            record.resync_word = factory.resolved_u
            chains.append(record)
            words_per_level[level.index] = words_per_level.get(level.index, 0) + 1
            pos = sum(seg.length for seg in segments[:seg_lo])
            for seg in segments[seg_lo:]:
                green_words.add(bytes(parser.buf[1 + pos:1 + pos + seg.length]))
                pos += seg.length
            corpus_blob = corpus_blob + b"\n" + xb if corpus_blob else xb
            chain_counter += 1
            if parser.position - 1 >= budget_n:
                done = True
                break

    full_len = parser.position - 1
    word = Word(bytes(parser.buf[1:1 + budget_n]))
    segments = _truncate_segments(segments, budget_n)
    return ConstructedWord(
        word=word, segments=segments, chains=chains, gamma=sched.gamma,
        front="0",
        meta={"schedule": sched, "seed": seed, "budget": budget_n,
              "generated": full_len, "words_per_level": words_per_level})


def _truncate_segments(segments: list[Segment], budget: int) -> list[Segment]:
    out = []
    acc = 0
    for seg in segments:
        if acc + seg.length <= budget:
            out.append(seg)
            acc += seg.length
            if acc == budget:
                break
        else:
            out.append(Segment(seg.kind, budget - acc, seg.chain,
                               reg_index=seg.reg_index, gadget_i=seg.gadget_i,
                               gadget_c=seg.gadget_c))
            break
    return out


def ratio_curve(w, stride: int) -> list[tuple[int, float]]:
    """compression ratio of each sampled prefix, from one streaming parse.

    The dictionary of a split prefix equals the completed blocks: the partial
    final block always duplicates an earlier one.
    """
    if stride < 1:
        raise ParameterError("stride must be >= 1")
    data = w.data if isinstance(w, Word) else w
    if not data:
        raise ParameterError("the ratio curve needs a non-empty word")
    sp = StreamParser()
    sp.feed(data)
    ends = sp.starts[1:] + [sp.block_start]
    points = []
    n = stride
    total = len(data)
    while n <= total:
        k = bisect_right(ends, n)
        points.append((n, ratio_from_counts(k, n)))
        n += stride
    if not points or points[-1][0] != total:
        k = bisect_right(ends, total)
        points.append((total, ratio_from_counts(k, total)))
    return points


def tail_separation(plain_curve, front_curve, quartile: float = 0.25):
    """Compare the last-quartile ratio ranges of the two curves.

    Returns (holds, max_plain, min_front).
    """
    n_max = plain_curve[-1][0]
    cut = (1 - quartile) * n_max
    plain_tail = [c for n, c in plain_curve if n >= cut]
    front_tail = [c for n, c in front_curve if n >= cut]
    if not plain_tail or not front_tail:
        raise ParameterError("curves have no points in the tail quartile")
    return max(plain_tail) < min(front_tail), max(plain_tail), min(front_tail)
