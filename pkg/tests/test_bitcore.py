import json

import pytest
from hypothesis import given, settings, strategies as st

from ciprng.bitcore import (BooleanFunction, Configuration, Strategy, builtin_function, decode, encode,
                            hamming, iterate_G, load_function, load_functions, neighbor, step_F, trajectory)
from ciprng.errors import ContractError

B = builtin_function("b")


@st.composite
def functions(draw, max_n=5):
    n = draw(st.integers(2, max_n))
    images = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=1 << n, max_size=1 << n))
    return BooleanFunction(n, tuple(images))


def test_neighbor_examples():
    assert neighbor(0b0100, 3, 4) == 0b0110
    assert neighbor(0b1111, 1, 4) == 0b0111


@given(st.integers(2, 16).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1),
                                                       st.integers(1, n))))
def test_neighbor_involution(args):
    n, x, i = args
    assert neighbor(neighbor(x, i, n), i, n) == x
    assert hamming(x, neighbor(x, i, n)) == 1


def test_neighbor_rejects_bad_index():
    with pytest.raises(ContractError):
        neighbor(0, 0, 4)
    with pytest.raises(ContractError):
        neighbor(0, 5, 4)


def test_step_examples():
    assert B.images == (14, 15, 13, 12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0)
    assert step_F(B, 2, 0b0100) == 0b0000
    assert step_F(BooleanFunction.negation(4), 1, 0) == 0b1000
    ident = BooleanFunction.identity(4)
    assert all(step_F(ident, s, x) == x for s in range(1, 5) for x in range(16))


@settings(max_examples=60, deadline=None)
@given(functions())
def test_step_changes_at_most_one_component(f):
    # every s and x for this f
    for s in range(1, f.n + 1):
        for x in range(1 << f.n):
            y = step_F(f, s, x)
            assert hamming(x, y) <= 1
            assert (y >> (f.n - s)) & 1 == f.component(s, x)


def test_trace_examples():
    assert trajectory(B, (2, 4, 2, 3), 4, 4) == [4, 0, 0, 4, 6]
    assert trajectory(B, Strategy((4, 1, 1), 4), 6, 3) == [6, 7, 15, 7]
    assert iterate_G(B, [3, 1], 9, 0) == 9


def test_strategy_too_short():
    with pytest.raises(ContractError):
        iterate_G(B, (1, 2), 0, 3)
    with pytest.raises(ContractError):
        Strategy((0, 1), 4)


@given(st.integers(2, 10).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, (1 << n) - 1), st.integers(1, n))))
def test_negation_twice_is_identity(args):
    n, x, s = args
    assert iterate_G(BooleanFunction.negation(n), (s, s), x, 2) == x


@settings(max_examples=80, deadline=None)
@given(functions(), st.data())
def test_iteration_composes(f, data):
    terms = data.draw(st.lists(st.integers(1, f.n), max_size=12))
    a = data.draw(st.integers(0, len(terms)))
    x = data.draw(st.integers(0, (1 << f.n) - 1))
    s = Strategy(terms, f.n)
    mid = iterate_G(f, s, x, a)
    assert iterate_G(f, s, x, len(terms)) == iterate_G(f, s.shift(a), mid, len(terms) - a)


@given(st.integers(2, 10).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, (1 << n) - 1), st.permutations(range(1, n + 1)), st.integers(0, n))))
def test_negation_flips_distinct_components(args):
    n, x, perm, k = args
    chosen = perm[:k]
    expected = x
    for i in chosen:
        expected ^= 1 << (n - i)
    assert iterate_G(BooleanFunction.negation(n), chosen, x, k) == expected


def test_configuration_round_trip():
    c = Configuration.parse("0110")
    assert c.value == 6 and c.bits == (0, 1, 1, 0) and str(c) == "0110"
    assert Configuration.from_bits((1, 0, 1, 0)).value == 10
    assert encode(decode(11, 4)) == 11
    with pytest.raises(ContractError):
        Configuration(4, 16)
    with pytest.raises(ContractError):
        decode(4, 2)


def test_function_validation():
    with pytest.raises(ContractError):
        BooleanFunction(2, (0, 1, 2))
    with pytest.raises(ContractError):
        BooleanFunction(2, (0, 1, 2, 4))
    with pytest.raises(ContractError):
        BooleanFunction(1, (0, 1))


def test_json_round_trip(tmp_path):
    f = builtin_function("e")
    assert BooleanFunction.from_json(f.to_json()) == f
    single = tmp_path / "f.json"
    single.write_text(f.to_json())
    assert load_function(single) == f
    many = tmp_path / "fs.jsonl"
    many.write_text("\n".join(builtin_function(x).to_json() for x in "abc") + "\n")
    assert [g.name for g in load_functions(many)] == ["a", "b", "c"]
    doc = json.loads(f.to_json())
    assert doc["n"] == 4 and len(doc["images"]) == 16


def test_builtins():
    neg = builtin_function("neg")
    assert neg == BooleanFunction.negation(4)
    assert builtin_function("fig1_f").images == (1, 3, 0, 2)
    assert builtin_function("fig1_neg").images == (3, 2, 1, 0)
    with pytest.raises(ContractError):
        builtin_function("zz")
