"""Negation-free CNF over comparison atoms.

Negation is never eliminated by flipping comparison operators (that would
be wrong for NaN); it is recorded as a per-atom flag instead. The CNF is
plain distributive, capped against pathological blowup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CnfBlowupError
from .fp import BOOL, FPValue, narrow32
from .terms import (
    ArithOp,
    BoolAnd,
    BoolConst,
    BoolNot,
    BoolOr,
    CmpOp,
    Compare,
    FALSE,
    FPArith,
    FPConst,
    FPVar,
    Ite,
    TRUE,
    Term,
    term_to_smt2,
)

__all__ = [
    "Atom",
    "ClauseSet",
    "push_negations",
    "to_cnf",
    "simplify",
    "clause_set_as_formula",
    "clause_set_to_sexpr",
]

DEFAULT_CLAUSE_CAP = 10**6


@dataclass(frozen=True)
class Atom(Term):
    """A comparison literal; `negated` records a surviving logical negation."""

    op: CmpOp
    negated: bool
    lhs: Term
    rhs: Term

    @property
    def sort(self):
        return BOOL


@dataclass(frozen=True)
class ClauseSet:
    """Conjunction of disjunctions of atoms.

    Constant formulas degenerate: no clauses means trivially true, an empty
    clause means trivially false (its empty product contributes 1 to the
    objective).
    """

    clauses: tuple[tuple[Atom, ...], ...]

    def __len__(self) -> int:
        return len(self.clauses)


# --------------------------------------------------------------------------
# NNF with negation flags
# --------------------------------------------------------------------------


def _normalize_fp(term: Term) -> Term:
    """Normalize Boolean content buried inside FP expressions (Ite conditions)."""
    if isinstance(term, (FPConst, FPVar)):
        return term
    if isinstance(term, FPArith):
        return FPArith(term.op, tuple(_normalize_fp(a) for a in term.args))
    if isinstance(term, Ite):
        return Ite(push_negations(term.cond), _normalize_fp(term.then),
                   _normalize_fp(term.orelse))
    raise TypeError(f"not an FP expression: {term!r}")


def push_negations(formula: Term, negate: bool = False) -> Term:
    """Convert to NNF; negations land in Atom flags, never in operators."""
    if isinstance(formula, BoolConst):
        return BoolConst(formula.value != negate)
    if isinstance(formula, BoolNot):
        return push_negations(formula.child, not negate)
    if isinstance(formula, BoolAnd):
        children = tuple(push_negations(c, negate) for c in formula.children)
        return BoolOr(children) if negate else BoolAnd(children)
    if isinstance(formula, BoolOr):
        children = tuple(push_negations(c, negate) for c in formula.children)
        return BoolAnd(children) if negate else BoolOr(children)
    if isinstance(formula, Compare):
        return Atom(formula.op, negate, _normalize_fp(formula.lhs),
                    _normalize_fp(formula.rhs))
    if isinstance(formula, Atom):
        return Atom(formula.op, formula.negated != negate, formula.lhs, formula.rhs)
    raise TypeError(f"cannot normalize {formula!r}")


# --------------------------------------------------------------------------
# Distributive CNF
# --------------------------------------------------------------------------


def to_cnf(nnf: Term, clause_cap: int = DEFAULT_CLAUSE_CAP) -> ClauseSet:
    """Distribute an NNF formula into clauses, deduplicating within clauses."""
    clauses = _cnf(nnf, clause_cap)
    out = []
    for clause in clauses:
        seen = []
        for atom in clause:
            if atom not in seen:
                seen.append(atom)
        out.append(tuple(seen))
    return ClauseSet(tuple(out))


def _cnf(term: Term, cap: int) -> list[list[Atom]]:
    if isinstance(term, Atom):
        return [[term]]
    if isinstance(term, BoolConst):
        return [] if term.value else [[]]
    if isinstance(term, BoolAnd):
        out = []
        for child in term.children:
            out.extend(_cnf(child, cap))
            if len(out) > cap:
                raise CnfBlowupError(f"clause count exceeded the cap of {cap}")
        return out
    if isinstance(term, BoolOr):
        # cross product of the children's clause lists
        acc: list[list[Atom]] = [[]]
        for child in term.children:
            child_clauses = _cnf(child, cap)
            if not child_clauses:  # child is trivially true: whole clause true
                return []
            nxt = []
            for left in acc:
                for right in child_clauses:
                    nxt.append(left + right)
                    if len(nxt) > cap:
                        raise CnfBlowupError(
                            f"clause count exceeded the cap of {cap}"
                        )
            acc = nxt
        return acc
    raise TypeError(f"not in NNF: {term!r}")


def clause_set_as_formula(clauses: ClauseSet) -> Term:
    """View a clause set as an NNF term (for equivalence checks)."""
    parts = []
    for clause in clauses.clauses:
        if not clause:
            parts.append(FALSE)
        elif len(clause) == 1:
            parts.append(clause[0])
        else:
            parts.append(BoolOr(tuple(clause)))
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return BoolAnd(tuple(parts))


def clause_set_to_sexpr(clauses: ClauseSet) -> str:
    """Debug rendering: one (clause ...) per line, atoms with negation flags."""
    lines = []
    for clause in clauses.clauses:
        atoms = []
        for a in clause:
            inner = f"({a.op.value} {term_to_smt2(a.lhs)} {term_to_smt2(a.rhs)})"
            atoms.append(f"(not {inner})" if a.negated else inner)
        lines.append("(clause " + " ".join(atoms) + ")")
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------------------
# Conservative simplification
# --------------------------------------------------------------------------


def _fold_arith(op: ArithOp, width: int, vals: list[float]) -> float:
    if op == ArithOp.NEG:
        return -vals[0]
    if op == ArithOp.ABS:
        return abs(vals[0])
    a, b = vals
    if op == ArithOp.ADD:
        r = a + b
    elif op == ArithOp.SUB:
        r = a - b
    elif op == ArithOp.MUL:
        r = a * b
    else:
        if b == 0.0:
            if a != a or a == 0.0:
                return math.nan
            sign = math.copysign(1.0, a) * math.copysign(1.0, b)
            return math.inf if sign > 0 else -math.inf
        r = a / b
    return narrow32(r) if width == 32 else r


_CMP_FOLD = {
    CmpOp.LT: lambda a, b: a < b,
    CmpOp.LEQ: lambda a, b: a <= b,
    CmpOp.GT: lambda a, b: a > b,
    CmpOp.GEQ: lambda a, b: a >= b,
    CmpOp.EQ: lambda a, b: a == b,
    CmpOp.NEQ: lambda a, b: a != b,
}


def simplify(formula: Term) -> Term:
    """Constant folding and Boolean identity folds; semantics preserved.

    All-constant FP subterms fold under RNE at their declared width;
    comparisons of constants fold to Boolean constants; and/or/not/ite
    collapse around constants. Nothing else is rewritten.
    """
    if isinstance(formula, (BoolConst, FPConst, FPVar)):
        return formula
    if isinstance(formula, BoolNot):
        child = simplify(formula.child)
        if isinstance(child, BoolConst):
            return BoolConst(not child.value)
        return BoolNot(child)
    if isinstance(formula, BoolAnd):
        kept = []
        for c in formula.children:
            s = simplify(c)
            if isinstance(s, BoolConst):
                if not s.value:
                    return FALSE
                continue  # drop true
            kept.append(s)
        if not kept:
            return TRUE
        if len(kept) == 1:
            return kept[0]
        return BoolAnd(tuple(kept))
    if isinstance(formula, BoolOr):
        kept = []
        for c in formula.children:
            s = simplify(c)
            if isinstance(s, BoolConst):
                if s.value:
                    return TRUE
                continue  # drop false
            kept.append(s)
        if not kept:
            return FALSE
        if len(kept) == 1:
            return kept[0]
        return BoolOr(tuple(kept))
    if isinstance(formula, Compare):
        lhs, rhs = simplify(formula.lhs), simplify(formula.rhs)
        if isinstance(lhs, FPConst) and isinstance(rhs, FPConst):
            return BoolConst(
                bool(_CMP_FOLD[formula.op](lhs.value.to_float(), rhs.value.to_float()))
            )
        return Compare(formula.op, lhs, rhs)
    if isinstance(formula, Atom):
        lhs, rhs = simplify(formula.lhs), simplify(formula.rhs)
        if isinstance(lhs, FPConst) and isinstance(rhs, FPConst):
            truth = bool(_CMP_FOLD[formula.op](lhs.value.to_float(), rhs.value.to_float()))
            return BoolConst(truth != formula.negated)
        return Atom(formula.op, formula.negated, lhs, rhs)
    if isinstance(formula, FPArith):
        args = tuple(simplify(a) for a in formula.args)
        if all(isinstance(a, FPConst) for a in args):
            width = formula.sort.width
            folded = _fold_arith(formula.op, width, [a.value.to_float() for a in args])
            return FPConst(FPValue.from_float(folded, width))
        return FPArith(formula.op, args)
    if isinstance(formula, Ite):
        cond = simplify(formula.cond)
        then, orelse = simplify(formula.then), simplify(formula.orelse)
        if isinstance(cond, BoolConst):
            return then if cond.value else orelse
        return Ite(cond, then, orelse)
    raise TypeError(f"cannot simplify {formula!r}")
