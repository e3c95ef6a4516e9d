"""Randomized cross-checks tying the modules together."""

import random

from tierlang import genprog, interp1, parser, safety1, secondorder as so


def test_inferred_derivations_always_recheck():
    rng = random.Random(31337)
    seen = 0
    for _ in range(120):
        program = genprog.random_program(rng)
        result = safety1.infer_safety(program)
        if not result.safe:
            continue
        assert safety1.check_derivation(program, result.gamma, result.derivation), (
            parser.pretty_print(program)
        )
        seen += 1
    assert seen > 40


def test_embedding_runs_identically():
    rng = random.Random(90210)
    compared = 0
    for _ in range(80):
        program = genprog.random_program(rng)
        embedded = so.embed_program1(program)
        inputs = [
            "".join(rng.choice("01#") for _ in range(rng.randint(0, 4)))
            for _ in program.params
        ]
        try:
            direct, stats1 = interp1.run_program(program, inputs, budget=2000)
        except interp1.TopLevelBreak:
            # the embedding runs the body inside a call, where a break simply
            # ends the procedure; top-level breaks are not comparable
            continue
        except interp1.BudgetExhausted:
            continue
        via2, _ = so.eval_program2(embedded, {}, inputs, budget=50000)
        assert direct == via2, parser.pretty_print(program)
        compared += 1
    assert compared > 30


def test_embedded_programs_pass_simple_typing():
    rng = random.Random(55)
    for _ in range(25):
        program = genprog.random_program(rng)
        embedded = so.embed_program1(program)
        simple = so.simple_typecheck(embedded)
        assert simple.program_type == " -> ".join(["W"] * (len(program.params) + 1))
