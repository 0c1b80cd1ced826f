"""Distance-based objective compilation and evaluation.

A clause set compiles to a flat arithmetic tape plus per-clause distance
descriptors. Evaluating the program at a point yields a non-negative value
that is exactly zero precisely on satisfying assignments; the independent
Boolean evaluator (`semantic_eval`) is the correctness oracle for that
claim and never touches the tape.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    SortError,
    UnboundVariableError,
)
from .fp import FPValue, Sort, float_to_bits, narrow32, ordered_bits
from .normalizer import Atom, ClauseSet
from .terms import (
    ArithOp,
    BoolAnd,
    BoolConst,
    BoolNot,
    BoolOr,
    CmpOp,
    Compare,
    DefApp,
    FPArith,
    FPConst,
    FPVar,
    Ite,
    Term,
)

__all__ = [
    "theta",
    "atom_distance",
    "ObjectiveProgram",
    "compile_objective",
    "semantic_eval",
    "render_objective_source",
]


# --------------------------------------------------------------------------
# Distance functions (value level)
# --------------------------------------------------------------------------


def _theta_val(a: float, b: float, width: int) -> float:
    if a != a or b != b:
        return 1.0
    if a == b:  # IEEE equality: +0 == -0
        return 0.0
    da = ordered_bits(float_to_bits(a, width), width)
    db = ordered_bits(float_to_bits(b, width), width)
    return float(abs(da - db))


def theta(a: FPValue, b: FPValue) -> float:
    """Bit-representation distance; 1 for NaN operands, 0 iff IEEE-equal."""
    if a.width != b.width:
        raise SortError("theta operands must share a width")
    return _theta_val(a.to_float(), b.to_float(), a.width)


def _d_eq(a, b, w):
    return _theta_val(a, b, w)


def _d_neq(a, b, w):
    # IEEE !=: true whenever either side is NaN
    return 0.0 if a != b else 1.0


def _d_lt(a, b, w):
    return 0.0 if a < b else _theta_val(a, b, w) + 1.0


def _d_leq(a, b, w):
    return 0.0 if a <= b else _theta_val(a, b, w)


def _d_gt(a, b, w):
    return 0.0 if a > b else _theta_val(a, b, w) + 1.0


def _d_geq(a, b, w):
    return 0.0 if a >= b else _theta_val(a, b, w)


def _negated(positive):
    def d(a, b, w):
        if a != a or b != b:
            return 0.0
        return positive(a, b, w)

    return d


# The full case table: (op, negated) -> distance function.
_DIST = {
    (CmpOp.EQ, False): _d_eq,
    (CmpOp.NEQ, False): _d_neq,
    (CmpOp.EQ, True): _d_neq,
    (CmpOp.NEQ, True): _d_eq,
    (CmpOp.LT, False): _d_lt,
    (CmpOp.LT, True): _negated(_d_geq),
    (CmpOp.LEQ, False): _d_leq,
    (CmpOp.LEQ, True): _negated(_d_gt),
    (CmpOp.GT, False): _d_gt,
    (CmpOp.GT, True): _negated(_d_leq),
    (CmpOp.GEQ, False): _d_geq,
    (CmpOp.GEQ, True): _negated(_d_lt),
}


def atom_distance(op: CmpOp, negated: bool, a: FPValue, b: FPValue) -> float:
    """Distance of one (possibly negated) comparison; 0 iff it holds."""
    if a.width != b.width:
        raise SortError("atom operands must share a width")
    return _DIST[(op, bool(negated))](a.to_float(), b.to_float(), a.width)


# --------------------------------------------------------------------------
# Tape compilation
# --------------------------------------------------------------------------

# opcodes; instructions are (code, dst, a, b, c)
_ADD32, _SUB32, _MUL32, _DIV32 = 0, 1, 2, 3
_ADD64, _SUB64, _MUL64, _DIV64 = 4, 5, 6, 7
_NEG, _ABS = 8, 9
_CMP = 10  # c = (cmp-op index, negated flag)
_AND, _OR = 11, 12
_SELECT = 13

_CMP_PY = {
    CmpOp.LT: 0,
    CmpOp.LEQ: 1,
    CmpOp.GT: 2,
    CmpOp.GEQ: 3,
    CmpOp.EQ: 4,
    CmpOp.NEQ: 5,
}


class _Compiler:
    def __init__(self, var_index: dict[str, tuple[int, Sort]]):
        self.var_index = var_index
        self.template: list = []
        self.widths: list[int] = []  # 32 / 64 for FP regs, 0 for booleans
        self.tape: list[tuple] = []
        self.memo: dict = {}
        self.var_regs: list[tuple[int, int, bool]] = []  # (reg, x-index, is32)

    def new_reg(self, width: int, init=0.0) -> int:
        self.template.append(init)
        self.widths.append(width)
        return len(self.template) - 1

    def compile_fp(self, term: Term) -> int:
        reg = self.memo.get(term)
        if reg is not None:
            return reg
        width = term.sort.width
        if isinstance(term, FPConst):
            reg = self.new_reg(width, term.value.to_float())
        elif isinstance(term, FPVar):
            entry = self.var_index.get(term.name)
            if entry is None:
                raise UnboundVariableError(f"variable {term.name} not in the variable map")
            idx, sort = entry
            reg = self.new_reg(width)
            self.var_regs.append((reg, idx, sort.width == 32))
        elif isinstance(term, FPArith):
            args = [self.compile_fp(a) for a in term.args]
            reg = self.new_reg(width)
            if term.op == ArithOp.NEG:
                self.tape.append((_NEG, reg, args[0], 0, 0))
            elif term.op == ArithOp.ABS:
                self.tape.append((_ABS, reg, args[0], 0, 0))
            else:
                base = {ArithOp.ADD: _ADD32, ArithOp.SUB: _SUB32,
                        ArithOp.MUL: _MUL32, ArithOp.DIV: _DIV32}[term.op]
                code = base if width == 32 else base + 4
                self.tape.append((code, reg, args[0], args[1], 0))
        elif isinstance(term, Ite):
            cond = self.compile_bool(term.cond)
            then = self.compile_fp(term.then)
            orelse = self.compile_fp(term.orelse)
            reg = self.new_reg(width)
            self.tape.append((_SELECT, reg, cond, then, orelse))
        else:
            raise TypeError(f"cannot compile FP term {term!r}")
        self.memo[term] = reg
        return reg

    def compile_bool(self, term: Term) -> int:
        reg = self.memo.get(term)
        if reg is not None:
            return reg
        if isinstance(term, BoolConst):
            reg = self.new_reg(0, term.value)
        elif isinstance(term, Atom):
            l = self.compile_fp(term.lhs)
            r = self.compile_fp(term.rhs)
            reg = self.new_reg(0)
            extra = (_CMP_PY[term.op], 1 if term.negated else 0)
            self.tape.append((_CMP, reg, l, r, extra))
        elif isinstance(term, Compare):
            # conditions not run through the normalizer still compile
            l = self.compile_fp(term.lhs)
            r = self.compile_fp(term.rhs)
            reg = self.new_reg(0)
            self.tape.append((_CMP, reg, l, r, (_CMP_PY[term.op], 0)))
        elif isinstance(term, BoolNot):
            inner = self.compile_bool(term.child)
            false_reg = self.new_reg(0, False)
            true_reg = self.new_reg(0, True)
            reg = self.new_reg(0)
            self.tape.append((_SELECT, reg, inner, false_reg, true_reg))
        elif isinstance(term, (BoolAnd, BoolOr)):
            code = _AND if isinstance(term, BoolAnd) else _OR
            regs = [self.compile_bool(c) for c in term.children]
            acc = regs[0]
            for nxt in regs[1:]:
                reg = self.new_reg(0)
                self.tape.append((code, reg, acc, nxt, 0))
                acc = reg
            reg = acc
        else:
            raise TypeError(f"cannot compile Boolean term {term!r}")
        self.memo[term] = reg
        return reg


@dataclass(frozen=True)
class _CompiledAtom:
    fn: object
    lhs_reg: int
    rhs_reg: int
    width: int
    op: CmpOp
    negated: bool


class ObjectiveProgram:
    """Compiled objective: a register template, a tape, and clause structure.

    Immutable after compilation; `evaluate` may be called concurrently from
    many threads (each call owns its register scratch). The evaluation
    counter is the only shared mutable state.
    """

    def __init__(self, template, tape, clauses, var_regs, varmap, widths):
        self._template = template
        self._tape = tape
        self._clauses = clauses  # list[list[_CompiledAtom]]
        self._var_regs = var_regs
        self.varmap = varmap  # list[(name, Sort)]
        self._widths = widths
        self._count_lock = threading.Lock()
        self._eval_count = 0

    @property
    def dimension(self) -> int:
        return len(self.varmap)

    @property
    def clause_count(self) -> int:
        return len(self._clauses)

    @property
    def eval_count(self) -> int:
        return self._eval_count

    def evaluate(self, x) -> float:
        """Compute the objective at x (binary64 coordinates).

        Coordinates bound to binary32 variables are narrowed (RNE) before
        substitution. The result is >= 0; +inf is possible on clause
        products that overflow, NaN is not.
        """
        if len(x) != len(self.varmap):
            raise DimensionMismatchError(
                f"expected {len(self.varmap)} coordinates, got {len(x)}"
            )
        regs = self._template.copy()
        for reg, idx, is32 in self._var_regs:
            v = float(x[idx])
            regs[reg] = narrow32(v) if is32 else v

        for code, dst, a, b, c in self._tape:
            if code == _ADD32:
                regs[dst] = narrow32(regs[a] + regs[b])
            elif code == _SUB32:
                regs[dst] = narrow32(regs[a] - regs[b])
            elif code == _MUL32:
                regs[dst] = narrow32(regs[a] * regs[b])
            elif code == _DIV32:
                va, vb = regs[a], regs[b]
                if vb == 0.0:
                    regs[dst] = _div_by_zero(va, vb)
                else:
                    regs[dst] = narrow32(va / vb)
            elif code == _ADD64:
                regs[dst] = regs[a] + regs[b]
            elif code == _SUB64:
                regs[dst] = regs[a] - regs[b]
            elif code == _MUL64:
                regs[dst] = regs[a] * regs[b]
            elif code == _DIV64:
                va, vb = regs[a], regs[b]
                if vb == 0.0:
                    regs[dst] = _div_by_zero(va, vb)
                else:
                    regs[dst] = va / vb
            elif code == _NEG:
                regs[dst] = -regs[a]
            elif code == _ABS:
                regs[dst] = abs(regs[a])
            elif code == _CMP:
                regs[dst] = _cmp_bool(c[0], regs[a], regs[b]) != bool(c[1])
            elif code == _AND:
                regs[dst] = regs[a] and regs[b]
            elif code == _OR:
                regs[dst] = regs[a] or regs[b]
            else:  # _SELECT
                regs[dst] = regs[b] if regs[a] else regs[c]

        total = 0.0
        for clause in self._clauses:
            prod = 1.0
            for atom in clause:
                d = atom.fn(regs[atom.lhs_reg], regs[atom.rhs_reg], atom.width)
                if d == 0.0:
                    # a satisfied literal zeroes the whole product; breaking
                    # here also forbids 0 * inf once products overflow
                    prod = 0.0
                    break
                prod *= d
            total += prod

        with self._count_lock:
            self._eval_count += 1
        return total


def _div_by_zero(a: float, b: float) -> float:
    if a != a or a == 0.0:
        return math.nan
    sign = math.copysign(1.0, a) * math.copysign(1.0, b)
    return math.inf if sign > 0 else -math.inf


def _cmp_bool(op_idx: int, a: float, b: float) -> bool:
    if op_idx == 0:
        return a < b
    if op_idx == 1:
        return a <= b
    if op_idx == 2:
        return a > b
    if op_idx == 3:
        return a >= b
    if op_idx == 4:
        return a == b
    return a != b


def compile_objective(clauses: ClauseSet, varmap: list[tuple[str, Sort]]) -> ObjectiveProgram:
    """Compile a clause set over the given variable map into a program.

    Identical subterms share tape slots; evaluation semantics stay the
    tree semantics of the source formula.
    """
    var_index = {name: (i, sort) for i, (name, sort) in enumerate(varmap)}
    comp = _Compiler(var_index)
    compiled_clauses = []
    for clause in clauses.clauses:
        catoms = []
        for atom in clause:
            l = comp.compile_fp(atom.lhs)
            r = comp.compile_fp(atom.rhs)
            fn = _DIST[(atom.op, atom.negated)]
            catoms.append(
                _CompiledAtom(fn, l, r, atom.lhs.sort.width, atom.op, atom.negated)
            )
        compiled_clauses.append(catoms)
    return ObjectiveProgram(comp.template, comp.tape, compiled_clauses,
                            comp.var_regs, list(varmap), comp.widths)


# --------------------------------------------------------------------------
# Independent Boolean oracle
# --------------------------------------------------------------------------


def semantic_eval(term: Term, binding, definitions=None) -> bool:
    """Ground-truth IEEE evaluation of a Boolean term.

    `binding` maps variable names to floats or FPValues; binary32 variables
    are narrowed on substitution. This walks the original term tree with
    numpy scalar arithmetic and shares nothing with the compiled tape.
    """
    env = {}
    for name, v in dict(binding).items():
        env[name] = v.to_float() if isinstance(v, FPValue) else float(v)
    with np.errstate(all="ignore"):
        result = _sem_bool(term, env, definitions or {})
    return bool(result)


def _sem_fp(term: Term, env, defs):
    if isinstance(term, FPConst):
        v = term.value.to_float()
        return np.float32(v) if term.value.width == 32 else np.float64(v)
    if isinstance(term, FPVar):
        try:
            v = env[term.name]
        except KeyError:
            raise UnboundVariableError(f"no value bound for {term.name}") from None
        return np.float32(v) if term.var_sort.width == 32 else np.float64(v)
    if isinstance(term, FPArith):
        if term.op == ArithOp.NEG:
            return -_sem_fp(term.args[0], env, defs)
        if term.op == ArithOp.ABS:
            return np.abs(_sem_fp(term.args[0], env, defs))
        a = _sem_fp(term.args[0], env, defs)
        b = _sem_fp(term.args[1], env, defs)
        if term.op == ArithOp.ADD:
            return a + b
        if term.op == ArithOp.SUB:
            return a - b
        if term.op == ArithOp.MUL:
            return a * b
        return a / b
    if isinstance(term, Ite):
        if _sem_bool(term.cond, env, defs):
            return _sem_fp(term.then, env, defs)
        return _sem_fp(term.orelse, env, defs)
    if isinstance(term, DefApp):
        defn = defs.get(term.name)
        if defn is None:
            raise UnboundVariableError(f"no definition for {term.name}")
        local = dict(env)
        for (pname, psort), arg in zip(defn.params, term.args):
            local[pname] = float(_sem_fp(arg, env, defs))
        if defn.result_sort.is_fp:
            return _sem_fp(defn.body, local, defs)
        raise SortError(f"{term.name} is not an FP definition")
    raise TypeError(f"not an FP term: {term!r}")


_SEM_CMP = {
    CmpOp.LT: lambda a, b: a < b,
    CmpOp.LEQ: lambda a, b: a <= b,
    CmpOp.GT: lambda a, b: a > b,
    CmpOp.GEQ: lambda a, b: a >= b,
    CmpOp.EQ: lambda a, b: a == b,
    CmpOp.NEQ: lambda a, b: a != b,
}


def _sem_bool(term: Term, env, defs) -> bool:
    if isinstance(term, BoolConst):
        return term.value
    if isinstance(term, BoolNot):
        return not _sem_bool(term.child, env, defs)
    if isinstance(term, BoolAnd):
        return all(_sem_bool(c, env, defs) for c in term.children)
    if isinstance(term, BoolOr):
        return any(_sem_bool(c, env, defs) for c in term.children)
    if isinstance(term, Compare):
        a = _sem_fp(term.lhs, env, defs)
        b = _sem_fp(term.rhs, env, defs)
        return bool(_SEM_CMP[term.op](a, b))
    if isinstance(term, Atom):
        a = _sem_fp(term.lhs, env, defs)
        b = _sem_fp(term.rhs, env, defs)
        truth = bool(_SEM_CMP[term.op](a, b))
        return truth != term.negated
    if isinstance(term, DefApp):
        defn = defs.get(term.name)
        if defn is None:
            raise UnboundVariableError(f"no definition for {term.name}")
        local = dict(env)
        for (pname, psort), arg in zip(defn.params, term.args):
            local[pname] = float(_sem_fp(arg, env, defs))
        return _sem_bool(defn.body, local, defs)
    raise TypeError(f"not a Boolean term: {term!r}")


# --------------------------------------------------------------------------
# Portable source rendering
# --------------------------------------------------------------------------

_C_PREAMBLE = """\
/* Auto-generated objective program. Compile, e.g.:
 *   gcc -O2 -shared -fPIC -o objective.so objective.c
 * The entry point is: double objective(const double *x);
 */
#include <math.h>
#include <stdint.h>
#include <string.h>

static double theta32(float a, float b) {
    if (isnan(a) || isnan(b)) return 1.0;
    if (a == b) return 0.0;
    uint32_t ua, ub;
    memcpy(&ua, &a, 4); memcpy(&ub, &b, 4);
    int64_t oa = (ua >> 31) ? -(int64_t)(ua & 0x7fffffffu) : (int64_t)ua;
    int64_t ob = (ub >> 31) ? -(int64_t)(ub & 0x7fffffffu) : (int64_t)ub;
    int64_t d = oa > ob ? oa - ob : ob - oa;
    return (double)d;
}

static double theta64(double a, double b) {
    if (isnan(a) || isnan(b)) return 1.0;
    if (a == b) return 0.0;
    uint64_t ua, ub;
    memcpy(&ua, &a, 8); memcpy(&ub, &b, 8);
    /* offset-binary so the unsigned difference is the ordered distance */
    uint64_t oa = (ua >> 63) ? (0x8000000000000000ull - (ua & 0x7fffffffffffffffull))
                             : (0x8000000000000000ull + ua);
    uint64_t ob = (ub >> 63) ? (0x8000000000000000ull - (ub & 0x7fffffffffffffffull))
                             : (0x8000000000000000ull + ub);
    uint64_t d = oa > ob ? oa - ob : ob - oa;
    return (double)d;
}

#define DEF_DIST(W, T) \\
static double d_eq##W(int n, T a, T b) { \\
    if (n) return (a != b) ? 0.0 : 1.0; \\
    return theta##W(a, b); \\
} \\
static double d_neq##W(int n, T a, T b) { return d_eq##W(!n, a, b); } \\
static double d_lt##W(int n, T a, T b) { \\
    if (n) return (isnan(a) || isnan(b)) ? 0.0 : d_geq##W(0, a, b); \\
    return (a < b) ? 0.0 : theta##W(a, b) + 1.0; \\
} \\
static double d_gt##W(int n, T a, T b) { \\
    if (n) return (isnan(a) || isnan(b)) ? 0.0 : d_leq##W(0, a, b); \\
    return (a > b) ? 0.0 : theta##W(a, b) + 1.0; \\
}

#define DEF_DIST_WEAK(W, T) \\
static double d_leq##W(int n, T a, T b); \\
static double d_geq##W(int n, T a, T b); \\
static double d_leq##W(int n, T a, T b) { \\
    if (n) return (isnan(a) || isnan(b)) ? 0.0 : d_gt##W(0, a, b); \\
    return (a <= b) ? 0.0 : theta##W(a, b); \\
} \\
static double d_geq##W(int n, T a, T b) { \\
    if (n) return (isnan(a) || isnan(b)) ? 0.0 : d_lt##W(0, a, b); \\
    return (a >= b) ? 0.0 : theta##W(a, b); \\
}

static double d_lt32(int n, float a, float b);
static double d_gt32(int n, float a, float b);
static double d_lt64(int n, double a, double b);
static double d_gt64(int n, double a, double b);
DEF_DIST_WEAK(32, float)
DEF_DIST_WEAK(64, double)
DEF_DIST(32, float)
DEF_DIST(64, double)

/* zero-propagating product: a satisfied literal zeroes its clause even if
 * other distances have overflowed to infinity */
static double mulz(double acc, double d) {
    return (acc == 0.0 || d == 0.0) ? 0.0 : acc * d;
}
"""

_C_DIST_NAME = {
    CmpOp.EQ: "d_eq",
    CmpOp.NEQ: "d_neq",
    CmpOp.LT: "d_lt",
    CmpOp.LEQ: "d_leq",
    CmpOp.GT: "d_gt",
    CmpOp.GEQ: "d_geq",
}


def _c_float(v: float, is32: bool) -> str:
    if v != v:
        return "NAN"
    if v == float("inf"):
        return "INFINITY"
    if v == float("-inf"):
        return "-INFINITY"
    text = float(v).hex()
    return f"{text}f" if is32 else text


def render_objective_source(program: ObjectiveProgram) -> str:
    """Deterministic C rendering of the program, one definition per clause."""
    widths = program._widths
    lines = [_C_PREAMBLE, "double objective(const double *x) {"]
    var_regs = {reg: (idx, is32) for reg, idx, is32 in program._var_regs}
    tape_defined = {inst[1] for inst in program._tape}

    def decl(reg: int) -> str:
        t = {0: "int", 32: "float", 64: "double"}[widths[reg]]
        return f"    const {t} v{reg}"

    for reg, init in enumerate(program._template):
        if reg in tape_defined:
            continue
        if reg in var_regs:
            idx, is32 = var_regs[reg]
            cast = "(float)" if is32 else ""
            lines.append(f"{decl(reg)} = {cast}x[{idx}];")
        elif widths[reg] == 0:
            lines.append(f"{decl(reg)} = {int(init)};")
        else:
            lines.append(f"{decl(reg)} = {_c_float(init, widths[reg] == 32)};")

    _OPS = {_ADD32: "+", _SUB32: "-", _MUL32: "*", _DIV32: "/",
            _ADD64: "+", _SUB64: "-", _MUL64: "*", _DIV64: "/"}
    for code, dst, a, b, c in program._tape:
        if code in _OPS:
            lines.append(f"{decl(dst)} = v{a} {_OPS[code]} v{b};")
        elif code == _NEG:
            lines.append(f"{decl(dst)} = -v{a};")
        elif code == _ABS:
            f = "fabsf" if widths[dst] == 32 else "fabs"
            lines.append(f"{decl(dst)} = {f}(v{a});")
        elif code == _CMP:
            op_idx, neg = c
            sym = ["<", "<=", ">", ">=", "==", "!="][op_idx]
            expr = f"(v{a} {sym} v{b})"
            if neg:
                expr = f"!{expr}"
            lines.append(f"{decl(dst)} = {expr};")
        elif code == _AND:
            lines.append(f"{decl(dst)} = v{a} && v{b};")
        elif code == _OR:
            lines.append(f"{decl(dst)} = v{a} || v{b};")
        else:
            lines.append(f"{decl(dst)} = v{a} ? v{b} : v{c};")

    clause_names = []
    for i, clause in enumerate(program._clauses):
        expr = None
        for atom in clause:
            fn = f"{_C_DIST_NAME[atom.op]}{atom.width}"
            call = f"{fn}({int(atom.negated)}, v{atom.lhs_reg}, v{atom.rhs_reg})"
            expr = call if expr is None else f"mulz({expr}, {call})"
        name = f"c{i}"
        clause_names.append(name)
        lines.append(f"    const double {name} = {expr};")
    total = " + ".join(clause_names) if clause_names else "0.0"
    lines.append(f"    return {total};")
    lines.append("}")
    return "\n".join(lines) + "\n"
