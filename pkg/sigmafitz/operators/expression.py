"""
Recursive-descent parser for 1-D real expressions in the variable ``x``.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?
    unary  := '-'? atom
    atom   := number | 'x' | '(' expr ')' | func '(' expr (',' expr)? ')'
    func   := abs | sqrt | max | min | exp

Compiled expressions evaluate elementwise on floats and numpy arrays.
"""
import re
from dataclasses import dataclass

import numpy as np

from ..utils.errors import EvalError, ExpressionSyntaxError

_TOKEN_RE = re.compile(r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")

# name -> (arity, numpy implementation)
FUNCTIONS = {
    'abs': (1, np.abs),
    'sqrt': (1, np.sqrt),
    'exp': (1, np.exp),
    'max': (2, np.maximum),
    'min': (2, np.minimum),
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].isspace():
            break
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            bad = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {source[bad]!r}", bad)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(Token('end', '', len(source)))
    return tokens


class Node:
    def evaluate(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class Number(Node):
    value: float

    def evaluate(self, x):
        return np.full_like(x, self.value, dtype=float)


class Variable(Node):
    def evaluate(self, x):
        return x

    def __repr__(self):
        return 'Variable()'


@dataclass(frozen=True)
class Negate(Node):
    operand: Node

    def evaluate(self, x):
        return -self.operand.evaluate(x)


@dataclass(frozen=True)
class BinaryOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, x):
        a = self.left.evaluate(x)
        b = self.right.evaluate(x)
        if self.op == '+':
            return a + b
        if self.op == '-':
            return a - b
        if self.op == '*':
            return a * b
        if self.op == '/':
            if np.any(b == 0.0):
                raise EvalError("division by zero")
            return a / b
        with np.errstate(all='ignore'):
            out = np.power(a, b)
        if not np.all(np.isfinite(out)):
            raise EvalError("power has no finite real value")
        return out


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple

    def evaluate(self, x):
        values = [arg.evaluate(x) for arg in self.args]
        if self.name == 'sqrt' and np.any(values[0] < 0.0):
            raise EvalError("sqrt of negative number")
        _, fn = FUNCTIONS[self.name]
        with np.errstate(over='ignore'):
            out = fn(*values)
        if not np.all(np.isfinite(out)):
            raise EvalError(f"{self.name} overflowed")
        return out


class Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text):
        token = self.current
        if token.text != text:
            found = token.text or 'end of input'
            raise ExpressionSyntaxError(f"found {found!r}", token.pos, expected=repr(text))
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.current.kind != 'end':
            raise ExpressionSyntaxError(f"unexpected {self.current.text!r}", self.current.pos,
                                        expected="operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.current.text in ('+', '-'):
            op = self.advance().text
            node = BinaryOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.current.text in ('*', '/'):
            op = self.advance().text
            node = BinaryOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.unary()
        if self.current.text == '^':
            self.advance()
            # right-associative
            node = BinaryOp('^', node, self.factor())
        return node

    def unary(self):
        if self.current.text == '-':
            self.advance()
            return Negate(self.atom())
        return self.atom()

    def atom(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            return Number(float(token.text))
        if token.kind == 'name':
            if token.text == 'x':
                self.advance()
                return Variable()
            if token.text in FUNCTIONS:
                return self.call()
            raise ExpressionSyntaxError(f"unknown name {token.text!r}", token.pos,
                                        expected="x, a number or one of " + ", ".join(FUNCTIONS))
        if token.text == '(':
            self.advance()
            node = self.expr()
            self.expect(')')
            return node
        found = token.text or 'end of input'
        raise ExpressionSyntaxError(f"found {found!r}", token.pos, expected="number, 'x', '(' or function")

    def call(self):
        name_token = self.advance()
        arity, _ = FUNCTIONS[name_token.text]
        self.expect('(')
        args = [self.expr()]
        if self.current.text == ',':
            self.advance()
            args.append(self.expr())
        if len(args) != arity:
            raise ExpressionSyntaxError(f"{name_token.text} takes {arity} argument(s), got {len(args)}",
                                        name_token.pos)
        self.expect(')')
        return Call(name_token.text, tuple(args))


class CompiledExpression:
    """A parsed expression, callable on a float or on a numpy array."""

    def __init__(self, source, tree):
        self.source = source
        self.tree = tree

    def __call__(self, x):
        scalar = np.isscalar(x) or np.ndim(x) == 0
        values = np.asarray(x, dtype=float)
        out = np.asarray(self.tree.evaluate(values), dtype=float)
        if not np.all(np.isfinite(out)):
            raise EvalError(f"{self.source!r} has no finite value")
        return float(out) if scalar else out

    def __repr__(self):
        return f"CompiledExpression({self.source!r})"


def parse_expression(source):
    if not isinstance(source, str) or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0, expected="expression")
    return CompiledExpression(source, Parser(source).parse())
