"""Unit tests for the predicate expression language."""

import numpy as np
import pytest

from coverage_lab import dsl
from coverage_lab.errors import (ArityError, DimensionError, DimensionMismatch,
                                 DslSyntaxError, DslTypeError, EvalError,
                                 UnknownIdentifier)


def parse2(text):
    return dsl.parse(text, 2)


# --- parsing ----------------------------------------------------------------

def test_parse_simple_comparison():
    e = parse2("x1 < 3")
    assert e == dsl.Cmp("<", dsl.Var(1), dsl.Num(3.0))


def test_parse_precedence_arith():
    e = parse2("1 + 2 * x1 < 7")
    assert e == dsl.Cmp("<", dsl.Arith("+", dsl.Num(1.0),
                                       dsl.Arith("*", dsl.Num(2.0), dsl.Var(1))),
                        dsl.Num(7.0))


def test_parse_precedence_bool():
    e = parse2("x1 < 1 or x1 > 2 and x2 < 0")
    assert isinstance(e, dsl.BoolOp) and e.op == "or"
    assert isinstance(e.right, dsl.BoolOp) and e.right.op == "and"


def test_parse_not_binds_tighter_than_and():
    e = parse2("not x1 < 1 and x2 < 0")
    assert isinstance(e, dsl.BoolOp) and e.op == "and"
    assert isinstance(e.left, dsl.Not)


def test_parse_functions_and_unary_minus():
    e = parse2("-sin(x1) <= abs(x2)")
    assert e == dsl.Cmp("<=", dsl.Neg(dsl.Call("sin", dsl.Var(1))),
                        dsl.Call("abs", dsl.Var(2)))


def test_parse_bool_literals():
    assert parse2("true") == dsl.BoolLit(True)
    assert parse2("false") == dsl.BoolLit(False)


def test_parse_errors():
    with pytest.raises(DslSyntaxError):
        parse2("x1 < ")
    with pytest.raises(DslSyntaxError):
        parse2("")
    with pytest.raises(DslSyntaxError):
        parse2("x1 < 1 $")
    with pytest.raises(DslSyntaxError):
        parse2("(x1 < 1")
    with pytest.raises(UnknownIdentifier):
        parse2("y < 1")
    with pytest.raises(DimensionError):
        parse2("x3 < 1")
    with pytest.raises(ArityError):
        parse2("sin(x1, x2) < 1")


def test_parse_error_carries_offset():
    with pytest.raises(DslSyntaxError) as exc:
        parse2("x1 < 1 ^ 2")
    assert exc.value.offset == 7
    assert "byte 7" in str(exc.value)


def test_type_errors():
    with pytest.raises(DslTypeError):
        parse2("x1 + (x2 < 1) < 2")  # boolean used arithmetically
    with pytest.raises(DslTypeError):
        parse2("x1 and x2 < 1")  # numeric used as boolean
    with pytest.raises(DslTypeError):
        parse2("not x1 < 1 + true")


def test_predicate_requires_boolean_root():
    with pytest.raises(DslTypeError):
        dsl.Predicate(dsl.Arith("+", dsl.Var(1), dsl.Num(1.0)), 2)


# --- evaluation -------------------------------------------------------------

def test_evaluate_scalar_and_batch_agree():
    p = dsl.Predicate(parse2("10 * sin(0.1 * x1) < x2"), 2)
    rng = np.random.default_rng(3)
    X = rng.uniform(-20, 20, (300, 2))
    batch = p.evaluate_many(X)
    assert all(batch[i] == p.evaluate(X[i]) for i in range(len(X)))


def test_evaluate_matches_numpy_reference():
    p = dsl.Predicate(parse2("exp(x1 / 4) - abs(x2) >= 1"), 2)
    X = np.array([[0.0, 0.0], [4.0, 1.5], [4.0, 1.8], [-8.0, 0.0]])
    want = np.exp(X[:, 0] / 4) - np.abs(X[:, 1]) >= 1
    assert np.array_equal(p.evaluate_many(X), want)


def test_evaluate_dimension_checks():
    p = dsl.Predicate(parse2("x1 < x2"), 2)
    with pytest.raises(DimensionMismatch):
        p.evaluate([1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatch):
        p.evaluate_many(np.zeros((4, 3)))


def test_evaluate_nonfinite_raises():
    p = dsl.Predicate(dsl.parse("1 / x1 < 1", 1), 1)
    with pytest.raises(EvalError):
        p.evaluate([0.0])
    q = dsl.Predicate(dsl.parse("exp(x1) < 1", 1), 1)
    with pytest.raises(EvalError):
        q.evaluate([1e6])


# --- unparse round-trip -----------------------------------------------------

def _random_num_expr(rng, depth):
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            # literals are nonnegative: a leading minus parses as Neg(Num)
            return dsl.Num(float(np.round(rng.uniform(0, 9), 3)))
        return dsl.Var(int(rng.integers(1, 4)))
    roll = rng.random()
    if roll < 0.55:
        return dsl.Arith(str(rng.choice(["+", "-", "*", "/"])),
                         _random_num_expr(rng, depth - 1),
                         _random_num_expr(rng, depth - 1))
    if roll < 0.8:
        return dsl.Neg(_random_num_expr(rng, depth - 1))
    return dsl.Call(str(rng.choice(["sin", "cos", "exp", "abs"])),
                    _random_num_expr(rng, depth - 1))


def _random_bool_expr(rng, depth):
    if depth <= 0 or rng.random() < 0.35:
        if rng.random() < 0.1:
            return dsl.BoolLit(bool(rng.random() < 0.5))
        return dsl.Cmp(str(rng.choice(["<", "<=", ">", ">=", "=="])),
                       _random_num_expr(rng, 2), _random_num_expr(rng, 2))
    roll = rng.random()
    if roll < 0.3:
        return dsl.Not(_random_bool_expr(rng, depth - 1))
    return dsl.BoolOp(str(rng.choice(["and", "or"])),
                      _random_bool_expr(rng, depth - 1),
                      _random_bool_expr(rng, depth - 1))


def test_unparse_parse_round_trip_random():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        e = _random_bool_expr(rng, 3)
        text = dsl.unparse(e)
        again = dsl.parse(text, 3)
        assert again == e, f"round trip broke on: {text}"


def test_unparse_known_forms():
    cases = ["x1 < 3", "-x1 <= x2", "x1 * (x2 + 1) > 0",
             "not (x1 < 1 or x2 < 1)", "sin(x1 + x2) == 0"]
    for text in cases:
        e = dsl.parse(text, 2)
        assert dsl.parse(dsl.unparse(e), 2) == e
