"""OpenQASM 2.0 subset: parse circuit files, emit circuits back out.

Supported grammar: the ``OPENQASM 2.0;`` header, one ``qreg``, gate
statements over the package's named-gate alphabet (h x y z s t rx ry rz cx cz
swap), ``//`` comments, and whitespace.  ``creg``/``measure`` statements (and
the conventional ``include "qelib1.inc";`` prelude) are accepted and ignored
with a warning.  Rotation angles accept literals and simple ``pi`` arithmetic
(+ - * / and parentheses).
"""

from __future__ import annotations

import ast
import math
import re
import warnings
from dataclasses import dataclass

from qtol.circuits import Circuit, Gate, MATRIX_KINDS

_GATE_ARITIES = {
    "h": (0, 1),
    "x": (0, 1),
    "y": (0, 1),
    "z": (0, 1),
    "s": (0, 1),
    "t": (0, 1),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "cx": (0, 2),
    "cz": (0, 2),
    "swap": (0, 2),
}

_QREG_RE = re.compile(r"^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_GATE_RE = re.compile(r"^([A-Za-z_]\w*)\s*(?:\(([^()]*(?:\([^()]*\)[^()]*)*)\))?\s*(.*)$", re.S)
_ARG_RE = re.compile(r"^([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")


class QasmWarning(UserWarning):
    """A statement outside the circuit model was ignored."""


class UnsupportedGate(ValueError):
    """The circuit contains gates the text format cannot express."""


@dataclass(frozen=True)
class ParseError(Exception):
    """A syntax or semantic problem at a known source position."""

    line: int
    column: int
    message: str
    snippet: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


def _strip_comments(text: str) -> str:
    # Blank out '//' comments in place so offsets keep matching the source.
    out = []
    i = 0
    while i < len(text):
        if text.startswith("//", i):
            end = text.find("\n", i)
            if end == -1:
                end = len(text)
            out.append(" " * (end - i))
            i = end
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    last_newline = text.rfind("\n", 0, offset)
    return line, offset - last_newline


def _statements(text: str):
    """Yield (offset, statement_text) pairs split on ';'."""
    stripped = _strip_comments(text)
    cursor = 0
    while cursor < len(stripped):
        end = stripped.find(";", cursor)
        if end == -1:
            tail = stripped[cursor:]
            if tail.strip():
                offset = cursor + (len(tail) - len(tail.lstrip()))
                yield offset, tail.strip(), False
            return
        chunk = stripped[cursor:end]
        if chunk.strip():
            offset = cursor + (len(chunk) - len(chunk.lstrip()))
            yield offset, chunk.strip(), True
        cursor = end + 1


_ALLOWED_EXPR_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.USub,
    ast.UAdd,
    ast.Constant,
    ast.Name,
    ast.Load,
)


def _eval_angle(expr: str, error: "_ErrorFactory") -> float:
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except (SyntaxError, ValueError):
        raise error(f"cannot parse angle expression {expr.strip()!r}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_EXPR_NODES):
            raise error(f"unsupported construct in angle expression {expr.strip()!r}")
        if isinstance(node, ast.Name) and node.id != "pi":
            raise error(f"unknown symbol {node.id!r} in angle expression")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise error(f"non-numeric constant in angle expression {expr.strip()!r}")
    try:
        value = eval(compile(tree, "<angle>", "eval"), {"__builtins__": {}}, {"pi": math.pi})
    except ZeroDivisionError:
        raise error(f"division by zero in angle expression {expr.strip()!r}") from None
    return float(value)


class _ErrorFactory:
    def __init__(self, text: str, offset: int, snippet: str):
        self.text = text
        self.offset = offset
        self.snippet = snippet

    def __call__(self, message: str) -> ParseError:
        line, column = _position(self.text, self.offset)
        return ParseError(line=line, column=column, message=message, snippet=self.snippet)


def parse(text: str, name: str = "") -> Circuit:
    """Parse QASM-subset source into a Circuit.

    Ignored statements (creg, measure, include) are reported through
    :class:`QasmWarning`; everything else outside the subset raises
    :class:`ParseError` with its source position.
    """
    register: str | None = None
    width = 0
    gates: list[Gate] = []
    saw_header = False

    for offset, stmt, terminated in _statements(text):
        error = _ErrorFactory(text, offset, stmt)
        if not saw_header:
            if re.fullmatch(r"OPENQASM\s+2\.0", stmt):
                if not terminated:
                    raise error("missing ';' after OPENQASM header")
                saw_header = True
                continue
            raise error("missing OPENQASM header")
        if not terminated:
            raise error("statement is missing its terminating ';'")

        head = stmt.split(None, 1)[0]
        if head == "include":
            warnings.warn(f"ignored include statement: {stmt!r}", QasmWarning, stacklevel=2)
            continue
        if head == "creg":
            warnings.warn(f"ignored creg statement: {stmt!r}", QasmWarning, stacklevel=2)
            continue
        if head == "measure":
            warnings.warn(f"ignored measure statement: {stmt!r}", QasmWarning, stacklevel=2)
            continue
        if head == "qreg":
            match = _QREG_RE.match(stmt)
            if not match:
                raise error(f"malformed qreg statement {stmt!r}")
            if register is not None:
                raise error("only one qreg is supported")
            register = match.group(1)
            width = int(match.group(2))
            if width < 1:
                raise error(f"register size must be >= 1, got {width}")
            continue

        match = _GATE_RE.match(stmt)
        if not match:
            raise error(f"malformed statement {stmt!r}")
        gate_name, params_text, args_text = match.groups()
        gate_name = gate_name.lower()
        if gate_name not in _GATE_ARITIES:
            raise error(f"unknown gate {gate_name!r}")
        if register is None:
            raise error(f"gate {gate_name!r} before any qreg declaration")

        n_params, n_qubits = _GATE_ARITIES[gate_name]
        params = [p for p in (params_text.split(",") if params_text else []) if p.strip()]
        if len(params) != n_params:
            raise error(f"gate {gate_name!r} expects {n_params} parameter(s), got {len(params)}")

        args = [a.strip() for a in args_text.split(",")] if args_text.strip() else []
        if len(args) != n_qubits:
            raise error(f"gate {gate_name!r} expects {n_qubits} qubit(s), got {len(args)}")
        qubits = []
        for arg in args:
            arg_match = _ARG_RE.match(arg)
            if not arg_match:
                raise error(f"expected a qubit reference like q[0], got {arg!r}")
            if arg_match.group(1) != register:
                raise error(f"unknown register {arg_match.group(1)!r}")
            index = int(arg_match.group(2))
            if index >= width:
                raise error(f"qubit index {index} out of range for qreg[{width}]")
            qubits.append(index)
        if n_qubits == 2 and qubits[0] == qubits[1]:
            raise error(f"duplicate qubit {qubits[0]} in {gate_name!r}")

        theta = _eval_angle(params[0], error) if n_params else None
        if theta is not None and not math.isfinite(theta):
            raise error(f"angle {params[0].strip()!r} is not finite")
        gates.append(Gate(gate_name, tuple(qubits), theta=theta))

    if not saw_header:
        raise ParseError(1, 1, "missing OPENQASM header", text[:40])
    if register is None:
        raise ParseError(1, 1, "missing qreg declaration", text[:40])
    return Circuit(width=width, gates=tuple(gates), name=name)


def emit(circuit: Circuit) -> str:
    """Serialize a circuit to canonical QASM-subset text.

    Raises :class:`UnsupportedGate` for explicit-matrix gates, which the text
    format cannot express.  ``parse(emit(c))`` reproduces ``c`` exactly
    (angles are printed with full round-trip precision).
    """
    lines = ["OPENQASM 2.0;", f"qreg q[{circuit.width}];"]
    for i, gate in enumerate(circuit.gates):
        if gate.kind in MATRIX_KINDS:
            raise UnsupportedGate(
                f"gate {i} ({gate.kind}) has no QASM-subset representation"
            )
        operands = ",".join(f"q[{q}]" for q in gate.qubits)
        if gate.theta is not None:
            lines.append(f"{gate.kind}({gate.theta!r}) {operands};")
        else:
            lines.append(f"{gate.kind} {operands};")
    return "\n".join(lines) + "\n"
