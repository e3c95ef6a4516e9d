import random

import pytest

from conftest import corpus
from tierlang import genprog, opreg, parser
from tierlang.opreg import DeltaConfig
from tierlang.safety1 import (
    Judgment,
    TooLarge,
    brute_force_safe,
    check_derivation,
    check_for_program,
    infer_safety,
    undeclassified_vars,
)
from tierlang.syntax import Declass, OpApp, Skip, Var


def parse(src):
    return parser.parse(src)


# ---------------------------------------------------------------------------
# Undeclassified variables


def test_u_of_variable():
    assert undeclassified_vars(Var("x")) == {"x"}


def test_u_of_declass_keeps_bound_side():
    assert undeclassified_vars(Declass(Var("y"), Var("z"))) == {"z"}


def test_u_recurses_through_operators():
    e = OpApp("eq", [Var("x"), Declass(Var("y"), Var("z"))])
    assert undeclassified_vars(e) == {"x", "z"}


def test_u_of_oracle_call_unions_arguments():
    from tierlang.syntax import OracleCall

    e = OracleCall("F", (Var("a"), Declass(Var("b"), Var("c"))))
    assert undeclassified_vars(e) == {"a", "c"}


# ---------------------------------------------------------------------------
# Inference on the corpus


def test_bubble_inference(bubble):
    result = infer_safety(bubble)
    assert result.safe
    high = {"list", "list1", "len1", "len2"}
    low = {"list2", "len", "x", "y", "r"}
    top = min(result.gamma[v] for v in high)
    bottom = max(result.gamma[v] for v in low)
    assert bottom < top
    assert set(result.loop_levels) == {1, 2, 3}


def test_increment_loop_unsafe():
    result = infer_safety(parse("prog(x){while(x > u0){x := x + u1} return x}"))
    assert not result.safe
    assert "x" in result.explanation


def test_no_loop_lifts_constraints():
    result = infer_safety(parse("prog(x){y := x + u1 return y}"))
    assert result.safe


def test_exp2_inference():
    result = infer_safety(parser.parse_file(corpus("exp2.tl")))
    assert result.safe
    assert result.gamma["x"] == 1
    assert result.gamma["y"] == 0


def test_exp1_inference():
    result = infer_safety(parser.parse_file(corpus("exp1.tl")))
    assert result.safe
    assert result.gamma["x"] == 1
    assert result.gamma["y"] == 0


def test_nested_loops_force_level_two():
    src = """
    prog(a, w){
      while(a > u0){
        z := w + u1;
        while(z > u0){ z := z - u1 };
        a := a - u1
      };
      return a
    }
    """
    result = infer_safety(parse(src))
    assert result.safe
    assert result.gamma["a"] == 2
    assert result.gamma["z"] == 1
    assert result.loop_levels == {1: 2, 2: 1}


def test_declass_bound_must_sit_at_outer_level():
    # the declass bound types exactly at the outermost loop level, so a
    # variable that must stay at 0 cannot serve as the bound inside a loop
    src = """
    prog(x, y){
      while(x > u0){
        y := y + u1;
        z := declass(x, y);
        x := x - u1
      };
      return z
    }
    """
    result = infer_safety(parse(src))
    assert not result.safe


def test_pointwise_least_solution():
    result = infer_safety(parse("prog(x){while(x > u0){x := x - u1} return x}"))
    assert result.gamma["x"] == 1
    assert result.loop_levels[1] == 1


# ---------------------------------------------------------------------------
# Derivation checking


def test_inferred_derivations_recheck(bubble):
    for src in (
        "prog(x){skip return x}",
        "prog(x){y := x + u1 return y}",
        open(corpus("exp1.tl")).read(),
        open(corpus("exp2.tl")).read(),
        open(corpus("bubble_for.tl")).read(),
    ):
        program = parse(src)
        result = infer_safety(program)
        assert result.safe
        assert check_derivation(program, result.gamma, result.derivation)
    result = infer_safety(bubble)
    assert check_derivation(bubble, result.gamma, result.derivation)


def test_derivation_rejects_wrong_gamma(bubble):
    result = infer_safety(bubble)
    broken = dict(result.gamma)
    broken["len1"] = 0  # the outer guard needs len1 at the loop level >= 1
    assert not check_derivation(bubble, broken, result.derivation)


def test_trivial_skip_derivation():
    program = parse("prog(x){skip return x}")
    deriv = Judgment("SKP", program.body, 0, 0, 0)
    assert check_derivation(program, {"x": 0}, deriv)
    assert check_derivation(program, {"x": 2}, deriv)


def test_derivation_shape_mismatch_rejected():
    program = parse("prog(x){skip return x}")
    wrong = Judgment("ASG", program.body, 0, 0, 0)
    assert not check_derivation(program, {"x": 0}, wrong)
    other = parse("prog(x){y := x return y}")
    assert not check_derivation(other, {"x": 0}, Judgment("SKP", Skip(), 0, 0, 0))


def test_explicit_sub_nodes_accepted():
    program = parse("prog(x){skip return x}")
    inner = Judgment("SKP", program.body, 0, 0, 0)
    outer = Judgment("SUB", program.body, 0, 0, 3, [inner])
    assert check_derivation(program, {"x": 0}, outer)


# ---------------------------------------------------------------------------
# Brute force oracle


def test_brute_force_trivial():
    assert brute_force_safe(parse("prog(x){skip return x}"), 2)


def test_brute_force_rejects_increment_loop():
    p = parse("prog(x){while(x > u0){x := x + u1} return x}")
    assert not brute_force_safe(p, 3)


def test_brute_force_guard_on_variable_count():
    p = parse("prog(a, b, c, d){e := a; f := b; g := c return a}")
    with pytest.raises(TooLarge):
        brute_force_safe(p, 2)


def test_differential_small_run():
    rng = random.Random(20240601)
    for _ in range(60):
        program = genprog.random_program(rng)
        assert infer_safety(program).safe == brute_force_safe(program, 3)


# ---------------------------------------------------------------------------
# Registry restrictions


def test_config_restriction_rejects_bubble(bubble):
    config = DeltaConfig({"gt": [[1, 1, 1]]})
    restricted = infer_safety(bubble, config=config)
    assert not restricted.safe
    assert "forbidden" in restricted.explanation
    # monotonicity: safe under a restriction implies safe without it
    assert infer_safety(bubble).safe


def test_config_restriction_monotone():
    rng = random.Random(7)
    config = DeltaConfig({"gt": [[1, 1, 1]], "append": [[0, 0, 0]]})
    for _ in range(40):
        program = genprog.random_program(rng)
        if infer_safety(program, config=config).safe:
            assert infer_safety(program).safe


# ---------------------------------------------------------------------------
# The for criterion


def test_for_check_on_corpus(bubble):
    assert check_for_program(parser.parse_file(corpus("bubble_for.tl")))
    assert not check_for_program(bubble)
    assert not check_for_program(parser.parse_file(corpus("exp2.tl")))
    assert check_for_program(parse("prog(x){skip return x}"))
