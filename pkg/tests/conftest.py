"""Shared fixtures: structured operand sets, random formulas, assignments."""

from __future__ import annotations

import random
import struct

import pytest

from fpsat.fp import FP32, FP64, FPValue
from fpsat.harness import corpus_dir
from fpsat.normalizer import push_negations, simplify, to_cnf
from fpsat.objective import compile_objective
from fpsat.terms import (
    ArithOp,
    BoolAnd,
    BoolNot,
    BoolOr,
    CmpOp,
    Compare,
    FPArith,
    FPConst,
    FPVar,
    Ite,
)

# Structured operand encodings: +-0, +-min-subnormal, +-1, +-max-finite,
# +-inf, and two NaN payloads.
STRUCTURED_BITS_32 = [
    0x00000000, 0x80000000,  # +-0
    0x00000001, 0x80000001,  # +-min subnormal
    0x3F800000, 0xBF800000,  # +-1
    0x7F7FFFFF, 0xFF7FFFFF,  # +-max finite
    0x7F800000, 0xFF800000,  # +-inf
    0x7FC00000, 0x7F800001,  # two NaN payloads
]
STRUCTURED_BITS_64 = [
    0x0000000000000000, 0x8000000000000000,
    0x0000000000000001, 0x8000000000000001,
    0x3FF0000000000000, 0xBFF0000000000000,
    0x7FEFFFFFFFFFFFFF, 0xFFEFFFFFFFFFFFFF,
    0x7FF0000000000000, 0xFFF0000000000000,
    0x7FF8000000000000, 0x7FF0000000000001,
]


def structured_values(width: int) -> list[FPValue]:
    bits = STRUCTURED_BITS_32 if width == 32 else STRUCTURED_BITS_64
    return [FPValue(width, b) for b in bits]


def bits_to_double(bits: int, width: int) -> float:
    if width == 32:
        return struct.unpack("<f", struct.pack("<I", bits))[0]
    return struct.unpack("<d", struct.pack("<Q", bits))[0]


def random_fp_double(rng: random.Random, width: int, special_p: float = 0.3) -> float:
    """A random value (as a binary64 float) exercising the full encoding
    space of the given width, specials included."""
    if width == 32:
        pool = STRUCTURED_BITS_32
        bits = rng.choice(pool) if rng.random() < special_p else rng.getrandbits(32)
        return bits_to_double(bits, 32)
    pool = STRUCTURED_BITS_64
    bits = rng.choice(pool) if rng.random() < special_p else rng.getrandbits(64)
    return bits_to_double(bits, 64)


def random_const(rng: random.Random, sort):
    width = sort.width
    pool = STRUCTURED_BITS_32 if width == 32 else STRUCTURED_BITS_64
    if rng.random() < 0.4:
        bits = rng.choice(pool)
    else:
        bits = rng.getrandbits(width)
    return FPConst(FPValue(width, bits))


def random_formula(rng: random.Random, max_depth: int = 5, max_vars: int = 4):
    """A random Boolean formula over FP comparisons; returns (term, varmap)."""
    n_vars = rng.randint(0, max_vars)
    variables = [
        FPVar(f"v{i}", rng.choice([FP32, FP64])) for i in range(n_vars)
    ]

    def fp_node(depth, sort):
        svars = [v for v in variables if v.var_sort == sort]
        if depth <= 0 or rng.random() < 0.3:
            if svars and rng.random() < 0.6:
                return rng.choice(svars)
            return random_const(rng, sort)
        r = rng.random()
        if r < 0.75:
            op = rng.choice([ArithOp.ADD, ArithOp.SUB, ArithOp.MUL, ArithOp.DIV])
            return FPArith(op, (fp_node(depth - 1, sort), fp_node(depth - 1, sort)))
        if r < 0.85:
            op = rng.choice([ArithOp.NEG, ArithOp.ABS])
            return FPArith(op, (fp_node(depth - 1, sort),))
        return Ite(bool_node(depth - 1), fp_node(depth - 1, sort),
                   fp_node(depth - 1, sort))

    def atom(depth):
        sort = rng.choice([FP32, FP64])
        op = rng.choice(list(CmpOp))
        return Compare(op, fp_node(depth, sort), fp_node(depth, sort))

    def bool_node(depth):
        if depth <= 0 or rng.random() < 0.35:
            return atom(max(depth - 1, 0))
        r = rng.random()
        if r < 0.25:
            return BoolNot(bool_node(depth - 1))
        kids = tuple(bool_node(depth - 1) for _ in range(rng.randint(2, 3)))
        return BoolAnd(kids) if r < 0.625 else BoolOr(kids)

    formula = bool_node(rng.randint(1, max_depth))
    varmap = [(v.name, v.var_sort) for v in variables]
    return formula, varmap


def random_assignment(rng: random.Random, varmap) -> dict[str, float]:
    return {
        name: random_fp_double(rng, sort.width) for name, sort in varmap
    }


def build_program(formula, varmap):
    """formula -> simplify -> NNF -> CNF -> compiled program."""
    clauses = to_cnf(push_negations(simplify(formula)))
    return compile_objective(clauses, varmap), clauses


@pytest.fixture(scope="session")
def corpus_path():
    return corpus_dir()


@pytest.fixture(scope="session")
def listing1_text(corpus_path):
    return (corpus_path / "listing1.smt2").read_text()
