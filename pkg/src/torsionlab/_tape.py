"""Flat instruction tapes compiled from expression ASTs.

The jet kernels (compiled or pure python) execute these tapes; keeping the
encoding in one place guarantees both backends agree on it.

Instruction layout: ``code[i] = (opcode, a, b)`` with ``a``/``b`` operand slot
indices (or the coordinate index for COORD, an integer-exponent flag for POW)
and ``aux[i]`` holding the literal for CONST or the exponent for POW. Slot
``i`` holds the result of instruction ``i``; the last slot is the expression
value.
"""

from dataclasses import dataclass

import numpy as np

from . import exprparse as ex

OP_CONST = 0
OP_COORD = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_NEG = 6
OP_POW = 7
OP_SIN = 8
OP_COS = 9
OP_TAN = 10
OP_EXP = 11
OP_LOG = 12
OP_SQRT = 13
OP_SINH = 14
OP_COSH = 15

_FN_OPS = {
    "sin": OP_SIN,
    "cos": OP_COS,
    "tan": OP_TAN,
    "exp": OP_EXP,
    "log": OP_LOG,
    "sqrt": OP_SQRT,
    "sinh": OP_SINH,
    "cosh": OP_COSH,
}

ERR_NONE = 0
ERR_DIV_ZERO = 1
ERR_LOG_DOMAIN = 2
ERR_SQRT_DOMAIN = 3
ERR_POW_DOMAIN = 4
ERR_TAN_POLE = 5

ERR_REASON = {
    ERR_DIV_ZERO: "division by zero",
    ERR_LOG_DOMAIN: "log of a non-positive value",
    ERR_SQRT_DOMAIN: "sqrt of a non-positive value",
    ERR_POW_DOMAIN: "power outside its domain",
    ERR_TAN_POLE: "tan at a pole",
}


@dataclass
class Tape:
    code: np.ndarray      # int32, shape (n, 3)
    aux: np.ndarray       # float64, shape (n,)
    nodes: list           # AST node per instruction, for error reporting
    dim: int

    @property
    def n(self):
        return len(self.nodes)

    def guarded_slots(self):
        """Slots whose sign must not change across an FD stencil.

        A sign change of a divisor or of a log/sqrt/fractional-power argument
        between stencil points means the stencil crossed a singularity or a
        domain boundary even if every individual point evaluates.
        """
        out = []
        for i, (op, a, b) in enumerate(self.code):
            if op == OP_DIV:
                out.append((int(b), i))
            elif op in (OP_LOG, OP_SQRT):
                out.append((int(a), i))
            elif op == OP_POW and b == 0:   # non-integer exponent
                out.append((int(a), i))
        return out


def compile_ast(ast, dim):
    """Flatten an AST into a Tape; shared subtrees (by identity) compile once."""
    code = []
    aux = []
    nodes = []
    slot_of = {}

    def emit(op, a, b, x, node):
        code.append((op, a, b))
        aux.append(x)
        nodes.append(node)
        return len(code) - 1

    def walk(node):
        key = id(node)
        if key in slot_of:
            return slot_of[key]
        if isinstance(node, ex.Num):
            s = emit(OP_CONST, 0, 0, float(node.value), node)
        elif isinstance(node, ex.Param):
            s = emit(OP_CONST, 0, 0, float(node.value), node)
        elif isinstance(node, ex.Coord):
            if node.index >= dim:
                raise ValueError(f"coordinate index {node.index} out of range for dim {dim}")
            s = emit(OP_COORD, node.index, 0, 0.0, node)
        elif isinstance(node, ex.Add):
            s = emit(OP_ADD, walk(node.a), walk(node.b), 0.0, node)
        elif isinstance(node, ex.Sub):
            s = emit(OP_SUB, walk(node.a), walk(node.b), 0.0, node)
        elif isinstance(node, ex.Mul):
            s = emit(OP_MUL, walk(node.a), walk(node.b), 0.0, node)
        elif isinstance(node, ex.Div):
            s = emit(OP_DIV, walk(node.a), walk(node.b), 0.0, node)
        elif isinstance(node, ex.Neg):
            s = emit(OP_NEG, walk(node.a), 0, 0.0, node)
        elif isinstance(node, ex.Pow):
            p = float(node.expo)
            is_int = float(p).is_integer()
            s = emit(OP_POW, walk(node.base), 1 if is_int else 0, p, node)
        elif isinstance(node, ex.Call):
            s = emit(_FN_OPS[node.fn], walk(node.arg), 0, 0.0, node)
        else:
            raise TypeError(f"not an AST node: {node!r}")
        slot_of[key] = s
        return s

    walk(ast)
    return Tape(
        code=np.array(code, dtype=np.int32).reshape(-1, 3),
        aux=np.array(aux, dtype=np.float64),
        nodes=nodes,
        dim=dim,
    )
