"""Shared engine for the adaptive gadget constructions.

Both constructions walk the same loop: lay down a chain of regular blocks,
census the offset-i violations of the front-lettered parsing, and while some
offset index has too many violations, insert gadgets ahead of the violated
blocks.  Every insertion edits the word mid-stream, so the parsing is rolled
back to the last block boundary before the edit and only the suffix is fed
again (a from-scratch mode exists as the correctness oracle).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

from .alignment import GADGET, REGULAR
from .errors import ConstructionError
from .parsing import StreamParser
from .words import Word

_TAIL_SENTINEL = 1 << 62


@dataclass
class Segment:
    kind: str                     # regular | gadget | padding
    length: int
    chain: int
    reg_index: int | None = None  # for regulars: the prefix length minus one
    gadget_i: int | None = None
    gadget_c: int | None = None


@dataclass
class ChainRecord:
    index: int
    source: Word
    q: int                        # first green block of the chain is x[0..q]
    q_formula: int | None
    regular_count: int
    chosen_i: int | None
    gadget_count: int
    final_d: int | None
    start: int                    # position of the chain inside the word
    length: int
    initial_violations: dict[int, int] = field(default_factory=dict)
    resync_word: bytes | None = None


@dataclass
class ConstructedWord:
    word: Word
    segments: list[Segment]
    chains: list[ChainRecord]
    gamma: float
    front: str
    meta: dict = field(default_factory=dict)

    # single-chain conveniences for the explicit construction
    @property
    def chosen_i(self) -> int | None:
        return self.chains[0].chosen_i

    @property
    def counters(self) -> tuple[int, int | None]:
        return self.chains[0].gadget_count, self.chains[0].final_d

    @property
    def source(self) -> Word:
        return self.chains[0].source

    def segment_starts(self) -> list[int]:
        starts, acc = [], 0
        for seg in self.segments:
            starts.append(acc)
            acc += seg.length
        return starts

    def green_meta(self) -> list[str]:
        """Per-segment kind tags; aligned with the green blocks whenever the
        word has no padding and the unit structure holds."""
        return [seg.kind for seg in self.segments]

    def without_gadgets(self) -> bytes:
        """The word with gadget (and padding) segments removed."""
        out = bytearray()
        pos = 0
        data = self.word.data
        for seg in self.segments:
            if seg.kind == REGULAR:
                out += data[pos:pos + seg.length]
            pos += seg.length
        return bytes(out)


def _segment_positions(segments: list[Segment]) -> list[int]:
    starts, acc = [], 0
    for seg in segments:
        starts.append(acc)
        acc += seg.length
    return starts


def build_chain(parser: StreamParser, segments: list[Segment], chain_index: int,
                source: Word, q: int, regulars: list[bytes], *, window: int,
                factory, include_tail: bool, scratch: bool = False,
                q_formula: int | None = None) -> ChainRecord:
    """Append one chain and run its gadget-insertion loop.

    ``parser`` must already hold the front letter plus all previous chains.
    ``regulars`` are the chain's regular blocks in order; violations are
    counted against them only, for offsets in [0, window].
    """
    s = len(regulars)
    chain_start = parser.position - 1
    seg_lo = len(segments)
    for t, reg in enumerate(regulars):
        segments.append(Segment(REGULAR, len(reg), chain_index, reg_index=t))
    first_new = parser.feed(b"".join(regulars))

    counts = _census(parser, segments, chain_index, first_new, window, include_tail)
    record = ChainRecord(index=chain_index, source=source, q=q, q_formula=q_formula,
                         regular_count=s, chosen_i=None, gadget_count=0,
                         final_d=None, start=chain_start,
                         length=parser.position - 1 - chain_start,
                         initial_violations={i: len(v) for i, v in counts.items()})

    hot = [i for i, v in counts.items() if 2 * len(v) > s]
    if not hot:
        return record
    if len(hot) > 1:
        raise ConstructionError(
            "two offset indices exceed half the regular blocks, which the "
            "violation trade-off rules out",
            {"chain": chain_index, "indices": hot})
    i0 = hot[0]

    # cause[t] = red block index witnessing the i0-violation of regular t
    cause = [-1] * s
    count = 0
    count += _rescan(parser, segments, chain_index, 0, i0, cause, include_tail)

    d = s // 2 + 1
    c = 0
    cap = s
    while count >= d:
        if c >= cap:
            raise ConstructionError(
                "gadget insertions exceeded the regular block count",
                {"chain": chain_index, "i": i0, "inserted": c, "d": d,
                 "violations": count})
        target = _nth_violated(cause, d)
        gadget = factory.make(i0, c)
        seg_positions = _segment_positions(segments)
        target_seg = seg_lo + _chain_seg_offset(segments, seg_lo, target)
        insert_at = 1 + seg_positions[target_seg]

        if scratch:
            whole = bytes(parser.buf[:insert_at]) + gadget + bytes(parser.buf[insert_at:])
            parser.reset()
            kept = 0
            parser.feed(whole)
        else:
            removed = parser.rollback(insert_at)
            kept = parser.completed
            cut = insert_at - parser.position
            parser.feed(removed[:cut] + gadget + removed[cut:])

        segments.insert(target_seg,
                        Segment(GADGET, len(gadget), chain_index,
                                gadget_i=i0, gadget_c=c))
        c += 1
        for t in range(s):
            if cause[t] >= kept:
                cause[t] = -1
                count -= 1
        count += _rescan(parser, segments, chain_index, kept, i0, cause, include_tail)
        if cause[target] != -1:
            d += 1

    record.chosen_i = i0
    record.gadget_count = c
    record.final_d = d
    record.length = parser.position - 1 - chain_start
    return record


def _chain_seg_offset(segments: list[Segment], seg_lo: int, reg_index: int) -> int:
    """Offset (within the chain's segments) of the regular block ``reg_index``."""
    for off in range(len(segments) - seg_lo):
        seg = segments[seg_lo + off]
        if seg.kind == REGULAR and seg.reg_index == reg_index:
            return off
    raise AssertionError(f"regular block {reg_index} not found")


def _iter_red_blocks(parser: StreamParser, from_block: int, include_tail: bool):
    starts = parser.starts
    n = len(starts)
    for b in range(from_block, n):
        end = starts[b + 1] if b + 1 < n else parser.block_start
        yield b, starts[b], end
    if include_tail and parser.in_progress():
        yield _TAIL_SENTINEL, parser.block_start, parser.position


def _locate(seg_positions, segments, lo, hi, chain_index):
    """Regular green block of ``chain_index`` fully containing [lo, hi], if any."""
    si = bisect_right(seg_positions, lo) - 1
    seg = segments[si]
    if seg.kind != REGULAR or seg.chain != chain_index:
        return None
    seg_start = seg_positions[si]
    if hi > seg_start + seg.length - 1:
        return None
    return seg.reg_index, lo - seg_start


def _census(parser, segments, chain_index, from_block, window, include_tail):
    seg_positions = _segment_positions(segments)
    hits: dict[int, set[int]] = {}
    for b, rs, re in _iter_red_blocks(parser, from_block, include_tail):
        if rs == 0:
            continue
        found = _locate(seg_positions, segments, rs - 1, re - 2, chain_index)
        if found is not None:
            t, off = found
            if off <= window:
                hits.setdefault(off, set()).add(t)
    return hits


def _rescan(parser, segments, chain_index, from_block, i0, cause, include_tail) -> int:
    seg_positions = _segment_positions(segments)
    added = 0
    for b, rs, re in _iter_red_blocks(parser, from_block, include_tail):
        if rs == 0:
            continue
        found = _locate(seg_positions, segments, rs - 1, re - 2, chain_index)
        if found is not None:
            t, off = found
            if off == i0 and cause[t] == -1:
                cause[t] = b
                added += 1
    return added


def _nth_violated(cause, d) -> int:
    seen = 0
    for t, v in enumerate(cause):
        if v != -1:
            seen += 1
            if seen == d:
                return t
    raise AssertionError("fewer violated blocks than the loop counter requires")
