"""Red/green block alignment: the parsing of aw laid over the parsing of w.

Aligning on the right (the copy of w inside aw matches w), every red block is
either the single first block (the prepended letter), a junction spanning two
or more green blocks, or an offset-i block contained in one green block.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ParameterError
from .parsing import Parsing, parse
from .words import as_bits

REGULAR = "regular"
GADGET = "gadget"
PADDING = "padding"


class RedClass(NamedTuple):
    kind: str                    # "first" | "junction" | "offset"
    offset: int | None = None    # for offset blocks: start position in the green block
    green_index: int | None = None

    def to_json_obj(self):
        if self.kind == "offset":
            return {"kind": "offset", "i": self.offset, "green": self.green_index}
        return {"kind": self.kind}


@dataclass(frozen=True)
class AlignedParsing:
    green: Parsing
    red: Parsing
    letter: int
    classes: list[RedClass]
    green_meta: list[str] | None   # per green block: "regular" or "gadget"

    def is_regular(self, green_index: int) -> bool:
        return self.green_meta is None or self.green_meta[green_index] == REGULAR


def align(w, a, green_meta=None) -> AlignedParsing:
    """Parse w and aw and classify every red block under right alignment."""
    data = as_bits(w)
    if not data:
        raise ParameterError("alignment needs a non-empty word")
    letter_bits = as_bits(a)
    if len(letter_bits) != 1:
        raise ParameterError("the prepended letter must be a single letter")
    green = parse(data)
    red = parse(letter_bits + data)
    classes = classify(green, red)
    if green_meta is not None and len(green_meta) != green.block_count:
        raise ParameterError("green_meta length does not match the green block count")
    return AlignedParsing(green=green, red=red, letter=letter_bits[0] & 1,
                          classes=classes, green_meta=green_meta)


def classify(green: Parsing, red: Parsing) -> list[RedClass]:
    """Per-red-block tags; positions in aw map to w by subtracting one."""
    gstarts = green.starts
    n_w = len(green.data)
    classes = []
    for b in range(red.block_count):
        rs, re = red.block_bounds(b)
        if rs == 0:
            classes.append(RedClass("first"))
            continue
        lo = rs - 1           # inclusive green coordinates
        hi = re - 2
        gi = bisect_right(gstarts, lo) - 1
        gend = gstarts[gi + 1] - 1 if gi + 1 < len(gstarts) else n_w - 1
        if hi <= gend:
            classes.append(RedClass("offset", lo - gstarts[gi], gi))
        else:
            classes.append(RedClass("junction"))
    return classes


@dataclass(frozen=True)
class ViolationTable:
    """counts[i] = number of regular green blocks containing an offset-i red block."""

    counts: dict[int, int]
    regular_count: int

    def top_two(self) -> tuple[int, int]:
        top = sorted(self.counts.values(), reverse=True)[:2]
        while len(top) < 2:
            top.append(0)
        return top[0], top[1]


def violation_table(ap: AlignedParsing) -> ViolationTable:
    violated: dict[int, set[int]] = {}
    for cls in ap.classes:
        if cls.kind != "offset" or not ap.is_regular(cls.green_index):
            continue
        hit = violated.setdefault(cls.offset, set())
        # two offset-i blocks in one green block would start at the same
        # position, impossible in a parsing
        assert cls.green_index not in hit, "duplicate offset block in one green block"
        hit.add(cls.green_index)
    if ap.green_meta is None:
        regular = ap.green.block_count
    else:
        regular = sum(1 for m in ap.green_meta if m == REGULAR)
    return ViolationTable(counts={i: len(s) for i, s in violated.items()},
                          regular_count=regular)


class Coverage(NamedTuple):
    offset: int      # where the red segment enters the green block
    length: int      # length of the overlap
    red_index: int


def coverage_profile(ap: AlignedParsing) -> list[list[Coverage]]:
    """For each green block, the ordered red segments intersecting it."""
    green = ap.green
    red = ap.red
    n_w = len(green.data)
    profile: list[list[Coverage]] = [[] for _ in range(green.block_count)]
    gstarts = green.starts
    for b in range(red.block_count):
        rs, re = red.block_bounds(b)
        if rs == 0:
            continue
        lo, hi = rs - 1, re - 2
        gi = bisect_right(gstarts, lo) - 1
        while gi < green.block_count:
            gs = gstarts[gi]
            ge = gstarts[gi + 1] - 1 if gi + 1 < len(gstarts) else n_w - 1
            if gs > hi:
                break
            seg_lo = max(lo, gs)
            seg_hi = min(hi, ge)
            profile[gi].append(Coverage(seg_lo - gs, seg_hi - seg_lo + 1, b))
            gi += 1
    return profile


def alignment_report(ap: AlignedParsing) -> dict:
    """JSON-ready report: blocks of both parsings, classes, violation counts."""
    table = violation_table(ap)
    return {
        "schema": 1,
        "green": [list(ap.green.block_bounds(i)) for i in range(ap.green.block_count)],
        "red": [list(ap.red.block_bounds(i)) for i in range(ap.red.block_count)],
        "classes": [c.to_json_obj() for c in ap.classes],
        "violations": {str(i): c for i, c in sorted(table.counts.items())},
    }
