import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from lz78lab import (LzCode, MalformedCodeError, ParameterError, Word,
                     comp_ratio, decode, encode, factor_census, parse, pref,
                     tree_stats)
from lz78lab.parsing import ratio_from_counts

from oracles import naive_factor_census, naive_parse

words = st.text(alphabet="01", max_size=400)


def blocks_of(text):
    return [b.decode() for b in parse(text).blocks()]


def test_parse_reference_example():
    assert blocks_of("00010110100001") == ["0", "00", "1", "01", "10", "100", "001"]
    p = parse("00010110100001")
    assert p.dict_size == 7
    assert not p.last_is_duplicate


def test_parse_empty():
    p = parse("")
    assert p.block_count == 0
    assert p.dict_size == 0


def test_parse_hand_simulated_example():
    # confirmed against the naive set-based parser
    expected = ["0", "00", "1", "01", "010", "001", "1"]
    assert naive_parse("0001010100011") == expected
    assert blocks_of("0001010100011") == expected
    p = parse("0001010100011")
    assert p.last_is_duplicate
    assert p.dict_size == 6


@settings(deadline=None)
@given(words)
def test_parse_matches_naive_oracle(text):
    assert blocks_of(text) == naive_parse(text)


@settings(deadline=None)
@given(words)
def test_partition_and_prefix_closure(text):
    p = parse(text)
    assert b"".join(p.blocks()) == text.encode()
    dictionary = p.dictionary()
    assert len(dictionary) == p.dict_size
    for b in dictionary:
        assert b[:-1] in dictionary or b[:-1] == b""
    # all blocks but the last are pairwise distinct
    blocks = p.blocks()
    assert len(set(blocks[:-1])) == max(0, len(blocks) - 1)


@settings(deadline=None)
@given(words)
def test_parse_deterministic(text):
    assert parse(text).starts == parse(text).starts


def test_block_count_length_bound_exhaustive():
    # sum of block lengths is at most k(k+1)/2 since block i has length <= i
    for n in range(1, 13):
        for v in range(1 << n):
            text = format(v, f"0{n}b")
            p = parse(text)
            k = p.block_count
            assert k * (k + 1) // 2 >= n
            assert p.dict_size >= math.isqrt(n)


def test_encode_reference_example():
    code = encode(parse("00010110100001"))
    assert code.entries == [(-1, 0), (0, 0), (-1, 1), (0, 1), (2, 0), (4, 0), (1, 1)]


def test_encode_single_letter():
    assert encode(parse("0")).entries == [(-1, 0)]


def test_encode_trailing_duplicate():
    # final duplicate block "1" encodes like any block: empty predecessor, letter 1
    code = encode(parse("0001010100011"))
    assert code.entries == [(-1, 0), (0, 0), (-1, 1), (0, 1), (3, 0), (1, 1), (-1, 1)]


def test_decode_reference_example():
    code = LzCode([(-1, 0), (0, 0), (-1, 1), (0, 1), (2, 0), (4, 0), (1, 1)])
    assert decode(code).to_text() == "00010110100001"


def test_decode_empty():
    assert decode(LzCode([])).to_text() == ""


def test_decode_rejects_forward_reference():
    with pytest.raises(MalformedCodeError):
        decode(LzCode([(-1, 0), (5, 1)]))
    with pytest.raises(MalformedCodeError):
        decode(LzCode([(0, 0)]))


def test_code_json_round_trip():
    code = encode(parse("0001010100011"))
    assert LzCode.from_json_obj(code.to_json_obj()) == code
    assert code.to_json_obj()[0] == {"pred": -1, "letter": 0}


@settings(deadline=None)
@given(words)
def test_round_trip_identity(text):
    assert decode(encode(parse(text))).to_text() == text


def test_round_trip_seeded_fuzz():
    rng = random.Random(20240)
    for _ in range(300):
        text = "".join(rng.choice("01") for _ in range(rng.randrange(1, 2000)))
        assert decode(encode(parse(text))).to_text() == text


def test_comp_ratio_values():
    assert comp_ratio("00010110100001") == pytest.approx(7 * math.log2(7) / 14)
    assert comp_ratio("00010110100001") == pytest.approx(1.4037, abs=1e-4)
    assert comp_ratio("0") == 0.0
    with pytest.raises(ParameterError):
        comp_ratio("")


def test_comp_ratio_of_prefix_word():
    # pref(x) for |x| = s parses into s blocks of total length s(s+1)/2
    s = 4107
    value = ratio_from_counts(s, s * (s + 1) // 2)
    assert value == pytest.approx(0.00585, abs=5e-5)
    small = pref("0110100110010110").data  # s = 16
    assert comp_ratio(small) == ratio_from_counts(16, 16 * 17 // 2)


def test_factor_census_examples():
    p = parse("00010110100001")
    # blocks 0,00,1,01,10,100,001 contain the 2-factors {00,01,10} only
    assert factor_census(p, 2) == 3
    assert factor_census(p, 99) == 0
    assert factor_census(parse(pref("0101")), 1) == 2


def test_factor_census_oracle_fuzz():
    rng = random.Random(7)
    for _ in range(40):
        text = "".join(rng.choice("01") for _ in range(rng.randrange(1, 300)))
        p = parse(text)
        blocks = [b.decode() for b in p.blocks()]
        for i in (1, 2, 3, 5):
            assert factor_census(p, i) == naive_factor_census(blocks, i)


def test_factor_census_tree_inequality():
    # distinct factors of size i correspond to subpaths: at most |T| - i
    rng = random.Random(99)
    for _ in range(60):
        text = "".join(rng.choice("01") for _ in range(rng.randrange(1, 600)))
        p = parse(text)
        vertices = tree_stats(p).vertex_count
        max_len = max(p.block_length(i) for i in range(p.block_count))
        for i in range(1, max_len + 1):
            assert factor_census(p, i) <= vertices - i


def test_tree_stats_reference():
    stats = tree_stats(parse("00010110100001"))
    assert stats.vertex_count == 8
    assert stats.max_depth == 3
    assert stats.depth_histogram == {0: 1, 1: 2, 2: 3, 3: 2}


def test_tree_stats_empty_and_path():
    assert tree_stats(parse("")).vertex_count == 1
    x = "01101001100101101001011001101001"  # any word: pref gives a single path
    stats = tree_stats(parse(pref(x)))
    assert stats.vertex_count == len(x) + 1
    assert stats.max_depth == len(x)
    assert all(c == 1 for c in stats.depth_histogram.values())


def test_stream_parser_rollback_matches_fresh_parse():
    # rollback to arbitrary positions, splice in new content, and compare the
    # final state against a parser fed the edited word in one shot
    from lz78lab import StreamParser
    rng = random.Random(1234)
    for _ in range(60):
        sp = StreamParser()
        content = bytearray()
        for _ in range(rng.randrange(1, 6)):
            piece = bytes(rng.choice(b"01") for _ in range(rng.randrange(1, 400)))
            if content and rng.random() < 0.7:
                pos = rng.randrange(len(content) + 1)
                removed = sp.rollback(pos)
                assert bytes(content[len(content) - len(removed):]) == removed
                insert_cut = pos - sp.position
                sp.feed(removed[:insert_cut] + piece + removed[insert_cut:])
                content[pos:pos] = piece
            else:
                sp.feed(piece)
                content += piece
        fresh = StreamParser()
        fresh.feed(bytes(content))
        assert sp.buf == fresh.buf == content
        assert sp.starts == fresh.starts
        assert sp.trie == fresh.trie
        assert sp.node == fresh.node
        assert sp.block_start == fresh.block_start


def test_word_type():
    w = Word.from_text("0101\n")
    assert w.to_text() == "0101"
    assert len(w) == 4
    assert w[1] == 1 and w[0] == 0
    assert w[1:3] == Word("10")
    with pytest.raises(IndexError):
        w[10]
    with pytest.raises(ParameterError) as exc:
        Word("01012")
    assert "offset 4" in str(exc.value)
    with pytest.raises(AttributeError):
        w.data = b"1"


def test_packed_round_trip():
    from lz78lab import pack_word, unpack_word
    rng = random.Random(5)
    for length in (0, 1, 7, 8, 9, 63, 64, 65, 1000):
        text = "".join(rng.choice("01") for _ in range(length))
        blob = pack_word(text)
        assert blob[:4] == b"LZCW"
        assert unpack_word(blob).to_text() == text
