#!/usr/bin/env python3
"""Session parsing, rendering and workspace construction"""
import os
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from algebra import PresentedAlgebra
from certify import AffinenessCertificate, HeightWitness
from monoid import ToricPresentation
from session import (
    DuplicateNameError, SessionError, SessionSyntaxError, UnresolvedReferenceError,
    build_workspace, load_session, parse_session, render_session,
)
from surface import CurveConfig

ROOT = Path(__file__).resolve().parent.parent
SESSION_FILES = sorted((ROOT / "sessions").glob("*.session")) + sorted((ROOT / "tests" / "sessions").glob("*.session"))
FUZZ_CASES = int(os.getenv("CODIM_ONE_FUZZ_CASES", "200"))


@pytest.mark.parametrize("path", SESSION_FILES, ids=lambda p: p.stem)
def test_bundled_sessions_render_and_reparse(path):
    session = load_session(path)
    text = render_session(session)
    again = parse_session(text)
    assert again == session
    assert render_session(again) == text


@pytest.mark.parametrize("path", SESSION_FILES, ids=lambda p: p.stem)
def test_bundled_sessions_build(path):
    ws = build_workspace(load_session(path))
    assert set(ws.objects) == {d.name for d in ws.session.declarations}


def test_render_of_quadric_session():
    text = render_session(load_session(ROOT / "sessions" / "quadric_threefold.session"))
    assert text.splitlines() == [
        "ring RA = q[R, S, T, Z]",
        "algebra A = RA / (R*S - T*Z) domain",
        "ideal a in A = (R, T)",
        "ring RP = q[R, T]",
        "algebra P = RP domain factorial",
        "map phi : A -> P { R -> R, S -> 0, T -> T, Z -> 0 }",
        "witness w = map phi height 2",
        "task ledger a using w",
    ]


def test_empty_session():
    assert render_session(parse_session("")) == ""
    assert render_session(parse_session("# only a comment\n\n")) == ""


def test_workspace_objects():
    ws = build_workspace(load_session(ROOT / "sessions" / "quadric_threefold.session"))
    assert isinstance(ws.get("A"), PresentedAlgebra)
    assert isinstance(ws.get("w"), HeightWitness)
    ws = build_workspace(load_session(ROOT / "sessions" / "two_chart_k1.session"))
    assert isinstance(ws.get("c"), AffinenessCertificate)
    ws = build_workspace(load_session(ROOT / "sessions" / "cone_a1_ruling.session"))
    assert isinstance(ws.get("C"), ToricPresentation)
    assert ws.algebra("C") is ws.get("C").algebra
    ws = build_workspace(load_session(ROOT / "sessions" / "nine_point_cubic.session"))
    cfg = ws.get("cfg")
    assert isinstance(cfg, CurveConfig) and cfg.irreducible and len(cfg.test_curves) == 11


def test_laurent_relation_is_added_once():
    text = "ring R = q[V, W, T]\nalgebra B = R domain factorial laurent(V:W)\n"
    B = build_workspace(parse_session(text)).get("B")
    assert len(B.ideal) == 1 and B.laurent_pairs == (("V", "W"),)


def test_fields_and_rationals():
    s = parse_session("ring R = fp:7[x]\nalgebra A = R / (x^2 - 3)\n")
    assert s.declarations[0].ring.field.characteristic == 7
    s = parse_session("ring R = q[x, y]\nalgebra A = R / (x/2 - 3y)\n")
    assert str(s.declarations[1].relations[0]) == "1/2*x - 3*y"


def test_syntax_error_location():
    with pytest.raises(SessionSyntaxError) as info:
        parse_session("ring R = q[x, y]\nalgebra A = R / (x + ) domain\n")
    assert (info.value.line, info.value.column) == (2, 22)
    assert str(info.value).startswith("line 2, column 22:")


def test_double_comma():
    text = "ring R = q[x, y]\nalgebra A = R domain\nideal a in A = (x,, y)\n"
    with pytest.raises(SessionSyntaxError) as info:
        parse_session(text)
    assert (info.value.line, info.value.column) == (3, 19)


def test_reference_errors():
    with pytest.raises(UnresolvedReferenceError, match="no algebra or toric algebra named 'B'"):
        parse_session("ring R = q[x]\nideal a in B = (x)\n")
    with pytest.raises(UnresolvedReferenceError, match="unknown variable 'y'"):
        parse_session("ring R = q[x]\nalgebra A = R / (y)\n")
    with pytest.raises(UnresolvedReferenceError, match="is a ring, expected"):
        parse_session("ring R = q[x]\nideal a in R = (x)\n")
    with pytest.raises(DuplicateNameError) as info:
        parse_session("ring R = q[x]\nring R = q[y]\n")
    assert info.value.line == 2


def test_statement_level_errors():
    with pytest.raises(SessionError, match="symmetric"):
        parse_session("lattice N = matrix [F, G] { (0, 1), (2, 0) }\n")
    with pytest.raises(SessionError, match="no image for y"):
        parse_session("ring R = q[x, y]\nalgebra A = R\nmap f : A -> A { x -> y }\n")
    with pytest.raises(SessionError, match="division"):
        parse_session("ring R = q[x, y]\nalgebra A = R / (x / y)\n")
    with pytest.raises(SessionError, match="fp:8"):
        parse_session("ring R = fp:8[x]\n")
    with pytest.raises(SessionError, match="unknown ledger flag"):
        parse_session("ring R = q[x]\nalgebra A = R domain\nideal a in A = (x)\ntask ledger a sections-gf\n")


def test_power_limits():
    with pytest.raises(SessionError, match="power too large"):
        parse_session("ring R = q[x, y]\nalgebra A = R / ((x + y)^1001)\n")
    parse_session("ring R = q[x]\nalgebra A = R / (x^1000)\n")


def test_constant_power_towers_are_capped():
    with pytest.raises(SessionSyntaxError, match="coefficients too large") as info:
        parse_session("ring R = q[x]\nalgebra A = R / (2^1000^1000^1000)\n")
    assert (info.value.line, info.value.column) == (2, 25)
    parse_session("ring R = q[x]\nalgebra A = R / (x - 2^1000)\n")
    parse_session("ring R = fp:7[x]\nalgebra A = R / (2^1000^1000^1000)\n")


TOKENS = ["ring", "algebra", "ideal", "map", "task", "ledger", "R", "A", "a", "x", "y",
          "=", "q", "[", "]", "(", ")", "{", "}", ",", "/", "+", "-", "*", "^", "->",
          ":", "2", "0", "domain", "\n", "in", "using", "#"]


@settings(max_examples=FUZZ_CASES, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=40).map(" ".join))
def test_fuzzed_token_streams_fail_cleanly(text):
    try:
        session = parse_session(text)
    except SessionError:
        return
    assert render_session(parse_session(render_session(session))) == render_session(session)


@settings(max_examples=FUZZ_CASES, deadline=None)
@given(st.text(max_size=60))
def test_fuzzed_text_fails_cleanly(text):
    try:
        parse_session(text)
    except SessionError:
        pass
