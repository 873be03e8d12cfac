"""The explicit weak-catastrophe construction over a de Bruijn word.

Starting from the prefix concatenation of a de Bruijn word beginning "01",
gadgets are inserted ahead of over-violated regular blocks until no offset
index in [0, gamma*k] is violated in more than half the regular blocks.  The
resulting word compresses near-optimally while the front-lettered copy parses
into far more blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .alignment import AlignedParsing, classify, violation_table
from .construction import ConstructedWord, Segment, build_chain
from .errors import ParameterError
from .generators import de_bruijn
from .parsing import StreamParser, parse
from .words import Word, as_bits


class ToyGadgetFactory:
    """Gadgets for the explicit construction.

    Offset 0 uses "1" then zeroes; offset i>0 uses the length-i prefix of x,
    the flipped next letter, then ones.  For a fixed offset they form a chain
    of one-letter extensions, and none of them is a prefix of x.
    """

    def __init__(self, x: bytes):
        self.x = x

    def make(self, i: int, c: int) -> bytes:
        if i == 0:
            return b"1" + b"0" * c
        return self.x[:i] + bytes([self.x[i] ^ 1]) + b"1" * c


def construct_toy(k: int, gamma: float = 3.0, seed: int = 0,
                  reparse: str = "checkpoint") -> ConstructedWord:
    """Run the gadget algorithm on the canonical order-k de Bruijn word.

    ``seed`` varies the Eulerian tie-breaking of the underlying de Bruijn
    word; ``reparse`` selects the checkpointed re-parse or the from-scratch
    oracle ("scratch").
    """
    if k < 5:
        raise ParameterError("k must be >= 5 so the gadget window fits")
    if gamma < 3:
        raise ParameterError("gamma must be >= 3")
    if reparse not in ("checkpoint", "scratch"):
        raise ParameterError(f"unknown reparse mode {reparse!r}")
    x = de_bruijn(k, require_prefix="01", seed=seed).word
    return construct_from_base(x, gamma, front="0",
                               scratch=(reparse == "scratch"),
                               meta={"k": k, "seed": seed})


def construct_from_base(x: Word, gamma: float, front: str = "0",
                        scratch: bool = False, meta: dict | None = None) -> ConstructedWord:
    """The gadget algorithm itself, on an arbitrary base word (tests use this
    to force insertions; the public entry point keeps the de Bruijn contract)."""
    xb = x.data
    s = len(xb)
    k = meta.get("k") if meta else None
    window = int(gamma * (k if k is not None else math.log2(s)))
    if window >= s - 1:
        raise ParameterError("gamma*k must stay below the number of regular blocks")
    regulars = [xb[:t + 1] for t in range(s)]
    parser = StreamParser()
    parser.feed(as_bits(front))
    segments: list[Segment] = []
    record = build_chain(parser, segments, 0, x, 0, regulars,
                         window=window, factory=ToyGadgetFactory(xb),
                         include_tail=True, scratch=scratch)
    word = Word(bytes(parser.buf[1:]))
    info = dict(meta or {})
    info.update({
        "window": window,
        "front_dict_size": parser.completed,  # dictionary of front+word, measured
    })
    return ConstructedWord(word=word, segments=segments, chains=[record],
                           gamma=gamma, front=front, meta=info)


@dataclass(frozen=True)
class ToyReport:
    n: int
    s: int
    k: int | None
    gamma: float
    front: str
    dic_w: int
    dic_aw: int
    chosen_i: int | None
    gadget_count: int
    violations: dict[int, int]
    upper_bound_ok: bool          # dic_w <= 3*sqrt(2/5)*sqrt(n)
    violations_ok: bool           # every i <= gamma*k within s/2 + (1+gamma)k + 1
    front_ratio: float            # dic_aw / n^(3/4), reported as measured
    green_units_ok: bool          # green parse boundaries match the segments

    def to_json_obj(self) -> dict:
        return {
            "schema": 1,
            "n": self.n, "s": self.s, "k": self.k, "gamma": self.gamma,
            "front": self.front,
            "dic_w": self.dic_w, "dic_aw": self.dic_aw,
            f"dic_{self.front}w": self.dic_aw,
            "chosen_i": self.chosen_i, "gadget_count": self.gadget_count,
            "violations": {str(i): c for i, c in sorted(self.violations.items())},
            "upper_bound_ok": self.upper_bound_ok,
            "violations_ok": self.violations_ok,
            "front_ratio": self.front_ratio,
            "green_units_ok": self.green_units_ok,
        }


def verify_toy(cw: ConstructedWord) -> ToyReport:
    """Independent verification pass: re-parses both words and re-censuses."""
    return one_front_variant(cw, cw.front)


def one_front_variant(cw: ConstructedWord, a) -> ToyReport:
    """The verification report computed for ``a``+word instead of the
    construction's own front letter."""
    front = as_bits(a)
    if len(front) != 1:
        raise ParameterError("front must be a single letter")
    data = cw.word.data
    green = parse(data)
    red = parse(front + data)
    green_units_ok = green.starts == cw.segment_starts()

    chain = cw.chains[0]
    s = chain.regular_count
    k = cw.meta.get("k")
    kk = k if k is not None else math.log2(s)
    window = cw.meta.get("window", int(cw.gamma * kk))
    bound_b = s / 2 + (1 + cw.gamma) * kk + 1
    if green_units_ok:
        ap = AlignedParsing(green=green, red=red, letter=front[0] & 1,
                            classes=classify(green, red),
                            green_meta=cw.green_meta())
        table = violation_table(ap)
        violations = {i: c for i, c in table.counts.items() if i <= window}
        violations_ok = all(c <= bound_b for c in violations.values())
    else:
        # the per-unit violation census is meaningless if the green parse
        # drifted from the intended segments
        violations = {}
        violations_ok = False

    n = len(data)
    return ToyReport(
        n=n, s=s, k=k, gamma=cw.gamma, front=front.decode(),
        dic_w=green.dict_size, dic_aw=red.dict_size,
        chosen_i=chain.chosen_i, gadget_count=chain.gadget_count,
        violations=violations,
        upper_bound_ok=green.dict_size <= 3 * math.sqrt(2 / 5) * math.sqrt(n),
        violations_ok=violations_ok,
        front_ratio=red.dict_size / n ** 0.75,
        green_units_ok=green_units_ok,
    )
