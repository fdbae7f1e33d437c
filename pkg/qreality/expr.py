"""
Coevent expressions: ``w1 + w2*w3``, ``1``, ``0``.

``*`` binds tighter than ``+`` (XOR). Parentheses group.
"""
import re
from typing import List, Optional, Tuple

from qreality.errors import DimensionMismatch, ParseError
from qreality.logic import CoeventPoly, Coevent, as_poly

_TOKEN = re.compile(r'\s*(?:(w)(\d+)|(\d+)|(\+|\*|\(|\)))')


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} at {pos} in {text!r}")
        if match.group(1):
            tokens.append(('var', match.group(2)))
        elif match.group(3) is not None:
            if match.group(3) not in ('0', '1'):
                raise ParseError(f"only the literals 0 and 1 are allowed, got {match.group(3)}")
            tokens.append(('lit', match.group(3)))
        else:
            tokens.append(('op', match.group(4)))
        pos = match.end()
    return tokens


def max_index(text: str) -> int:
    """Largest ``wk`` index mentioned in an expression (0 if none)."""
    return max((int(k) for kind, k in _tokenize(text) if kind == 'var'), default=0)


class _Parser:
    def __init__(self, tokens, n):
        self.tokens = tokens
        self.pos = 0
        self.n = n

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        token = self.peek()
        self.pos += 1
        return token

    def expr(self) -> CoeventPoly:
        value = self.term()
        while self.peek() == ('op', '+'):
            self.take()
            value = value ^ self.term()
        return value

    def term(self) -> CoeventPoly:
        value = self.factor()
        while self.peek() == ('op', '*'):
            self.take()
            value = value & self.factor()
        return value

    def factor(self) -> CoeventPoly:
        token = self.take()
        if token is None:
            raise ParseError("expression ends early")
        kind, text = token
        if kind == 'var':
            i = int(text)
            if not 1 <= i <= self.n:
                raise DimensionMismatch(f"w{i} is outside Omega_{self.n}")
            return CoeventPoly.evaluation(self.n, i)
        if kind == 'lit':
            return CoeventPoly.one(self.n) if text == '1' else CoeventPoly.zero(self.n)
        if token == ('op', '('):
            value = self.expr()
            if self.take() != ('op', ')'):
                raise ParseError("missing closing parenthesis")
            return value
        raise ParseError(f"unexpected {text!r}")


def parse_coevent(text: str, n: Optional[int] = None) -> CoeventPoly:
    """
    Parse an expression into a polynomial coevent over Omega_n.

    When ``n`` is omitted it is the largest index mentioned.

    Raises:
        ParseError: on bad syntax
        DimensionMismatch: when an index exceeds n
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty coevent expression")
    if n is None:
        n = max_index(text)
        if n == 0:
            raise ParseError(f"cannot infer n from {text!r}; give it explicitly")
    parser = _Parser(tokens, n)
    value = parser.expr()
    if parser.peek() is not None:
        raise ParseError(f"trailing input after position {parser.pos} in {text!r}")
    return value


def format_coevent(phi: Coevent) -> str:
    """Canonical expression: monomials sorted by size then elements."""
    return str(as_poly(phi))
