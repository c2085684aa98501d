import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tristream.graph import (
    EdgeStream,
    ParseError,
    StreamError,
    TemporalEdge,
    compute_m_delta,
    parse_stream,
    preprocess,
    read_stream,
    require_clean,
    validate_sorted,
    write_stream,
)

import oracles


def test_parse_basic():
    s = parse_stream("1 2 10\n2 3 12\n")
    assert list(s) == [TemporalEdge(1, 2, 10, 0), TemporalEdge(2, 3, 12, 1)]


def test_parse_empty():
    assert parse_stream("").m == 0


def test_parse_comments_and_blank_lines():
    s = parse_stream("# header\n\n4 5 1\n  # another\n5 6 2\n")
    assert s.triples() == [(4, 5, 1), (5, 6, 2)]
    assert s.idx.tolist() == [0, 1]


def test_parse_bad_token_reports_line():
    with pytest.raises(ParseError) as err:
        parse_stream("1 2 ten")
    assert err.value.lineno == 1


def test_parse_negative_timestamp():
    with pytest.raises(ParseError, match="line 2"):
        parse_stream("1 2 3\n1 2 -4\n")


def test_parse_wrong_field_count():
    with pytest.raises(ParseError):
        parse_stream("1 2\n")


def test_roundtrip_file(tmp_path):
    s, _ = preprocess(parse_stream("3 1 5\n1 2 4\n2 3 9\n"))
    path = tmp_path / "g.txt"
    write_stream(s, path)
    assert read_stream(path).equals(s)


def test_write_empty():
    buf = io.StringIO()
    write_stream(EdgeStream.empty(), buf)
    assert buf.getvalue() == ""


def test_preprocess_rules():
    s = EdgeStream.from_edges([(5, 5, 1), (7, 9, 3), (7, 9, 3)])
    out, rep = preprocess(s)
    assert out.triples() == [(0, 1, 3)]
    assert rep.removed_self_loops == 1
    assert rep.removed_duplicates == 1
    assert rep.final_m == 1


def test_preprocess_sorts():
    out, _ = preprocess(EdgeStream.from_edges([(2, 3, 9), (1, 4, 5)]))
    assert out.t.tolist() == [5, 9]
    # relabelled by first appearance in time order
    assert out.triples() == [(0, 1, 5), (2, 3, 9)]
    assert out.idx.tolist() == [0, 1]


def test_preprocess_ties_keep_file_order():
    out, _ = preprocess(EdgeStream.from_edges([(0, 1, 5), (2, 3, 1), (4, 5, 5)]))
    assert out.triples() == [(0, 1, 1), (2, 3, 5), (4, 5, 5)]


def test_preprocess_clean_is_identity():
    s = EdgeStream.from_edges([(0, 1, 1), (1, 2, 2), (2, 0, 2)])
    out, rep = preprocess(s)
    assert out.equals(s)
    assert rep.is_clean() and rep.final_m == 3


def test_preprocess_keeps_parallel_edges_at_distinct_times():
    out, rep = preprocess(EdgeStream.from_edges([(0, 1, 1), (0, 1, 2), (1, 0, 2)]))
    assert out.m == 3 and rep.removed_duplicates == 0


def test_preprocess_empty():
    out, rep = preprocess(EdgeStream.empty())
    assert out.m == 0 and rep.final_m == 0


edge_lists = st.lists(
    st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 30)), max_size=40
)


@given(edge_lists)
def test_preprocess_properties(rows):
    s = EdgeStream.from_edges(rows)
    out, rep = preprocess(s)
    assert rep.final_m == rep.input_m - rep.removed_self_loops - rep.removed_duplicates
    assert validate_sorted(out)
    assert not np.any(out.src == out.dst)
    if out.m:
        assert out.node_bound == out.n
    again, rep2 = preprocess(out)
    assert rep2.is_clean()
    assert again.equals(out)


def test_validate_sorted():
    assert validate_sorted(EdgeStream.from_edges([(0, 1, 5), (1, 2, 5), (2, 3, 6)]))
    assert not validate_sorted(EdgeStream.from_edges([(0, 1, 7), (1, 2, 6)]))
    assert validate_sorted(EdgeStream.empty())


def test_require_clean_rejects_unsorted_and_loops():
    with pytest.raises(StreamError):
        require_clean(EdgeStream.from_edges([(0, 1, 7), (1, 2, 6)]))
    with pytest.raises(StreamError):
        require_clean(EdgeStream.from_edges([(0, 0, 1)]))


def test_m_delta_examples():
    s = EdgeStream.from_edges([(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 4, 100)])
    assert compute_m_delta(s, 2) == 3
    assert compute_m_delta(EdgeStream.empty(), 5) == 0
    ties = EdgeStream.from_edges([(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    assert compute_m_delta(ties, 0) == 3


def test_m_delta_rejects_negative():
    with pytest.raises(ValueError):
        compute_m_delta(EdgeStream.from_edges([(0, 1, 1)]), -1)


@settings(max_examples=200)
@given(st.lists(st.integers(0, 50), max_size=20), st.integers(0, 30))
def test_m_delta_matches_brute_force(ts, delta):
    ts = sorted(ts)
    s = EdgeStream(np.zeros(len(ts)), np.ones(len(ts)), ts)
    got = compute_m_delta(s, delta)
    assert got == oracles.m_delta(ts, delta)
    assert got <= s.m
    assert compute_m_delta(s, delta + 3) >= got
