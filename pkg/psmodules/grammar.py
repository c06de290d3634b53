"""
grammar.py – Literals for domains, elements, ideals and modules
===============================================================

    domain   := "Z" | "Z[w," "-" INT "]" | "Q[x]" | "loc(" domain ";" list ")"
    list     := "[" [element ("," element)*] "]"
    element  := term (("+" | "-") term)*
    term     := unary (["*" | "/"] unary)*        juxtaposition multiplies: 2w
    unary    := "-" unary | power
    power    := primary ["^" INT]
    primary  := INT | "w" | "x" | "(" element ")"
    vector   := "(" element ("," element)* ")" | element
    module   := ["module" "over" domain] "rank" INT "gens" "[" vector,* "]"
                ["loc" "by" list]

Whitespace is ignored. Errors carry 1-based line and column of the
offending token. Division is exact division in the domain, so "1/2" is a
rational in Q[x] and "(1+w)/2^3" a fraction in loc(...).
"""

import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

from psmodules.arith import (
    DomainDescriptor,
    ImagQuadOrder,
    Integers,
    Localized,
    PolyOverRationals,
    X,
)
from psmodules.errors import ParseError, PSModulesError, SemanticError
from psmodules.ideals import OIdeal, ideal_from_generators
from psmodules.modules import AnyModule, LocModuleView, module_from_generators

log = logging.getLogger(__name__)

KEYWORDS = {"Z", "Q", "w", "x", "loc", "module", "over", "rank", "gens", "by"}
PUNCT = "+-*/^()[],;"


@dataclass(frozen=True)
class Token:
    typ: str  # INT | NAME | one punctuation character | EOF
    value: str
    line: int
    column: int


# ------------------------------------------------------------
# LEXER
# ------------------------------------------------------------
def lex(text: str) -> List[Token]:
    tokens: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha():
            # names are single keywords; "2w" and "wx" never merge digits into names
            j = i
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word not in KEYWORDS:
                # split glued variables such as "ww" into single letters
                if all(ch in "wx" for ch in word):
                    for k, ch in enumerate(word):
                        tokens.append(Token("NAME", ch, line, col + k))
                    col += j - i
                    i = j
                    continue
                raise ParseError(f"unknown name {word!r}", line, col)
            tokens.append(Token("NAME", word, line, col))
            col += j - i
            i = j
            continue
        if c in PUNCT:
            tokens.append(Token(c, c, line, col))
            i, col = i + 1, col + 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ------------------------------------------------------------
# PARSER
# ------------------------------------------------------------
class Parser:
    """Recursive descent over the token list; every rule consumes exactly its text."""

    def __init__(self, text: str):
        self.text = text
        self.toks = lex(text)
        self.pos = 0

    # --- token plumbing ---
    def peek(self, offset: int = 0) -> Token:
        return self.toks[min(self.pos + offset, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.column)

    def semantic(self, message: str, tok: Token) -> SemanticError:
        return SemanticError(message, tok.line, tok.column)

    def expect(self, typ: str, value: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.typ != typ or (value is not None and tok.value != value):
            wanted = value or typ
            got = tok.value or tok.typ
            raise self.error(f"expected {wanted!r}, got {got!r}")
        return self.next()

    def at_name(self, value: str) -> bool:
        tok = self.peek()
        return tok.typ == "NAME" and tok.value == value

    def expect_end(self) -> None:
        if self.peek().typ != "EOF":
            raise self.error(f"unexpected trailing input {self.peek().value!r}")

    # --- domains ---
    def parse_domain(self) -> DomainDescriptor:
        tok = self.peek()
        if self.at_name("Z"):
            self.next()
            if self.peek().typ != "[":
                return Integers()
            self.next()
            self.expect("NAME", "w")
            self.expect(",")
            negative = self.peek().typ == "-"
            if negative:
                self.next()
            num = self.expect("INT")
            self.expect("]")
            if not negative:
                raise self.semantic(f"Z[w,{num.value}] needs a negative parameter -m", num)
            m = int(num.value)
            try:
                return ImagQuadOrder(m)
            except PSModulesError as e:
                raise self.semantic(str(e), num)
        if self.at_name("Q"):
            self.next()
            self.expect("[")
            self.expect("NAME", "x")
            self.expect("]")
            return PolyOverRationals()
        if self.at_name("loc"):
            self.next()
            self.expect("(")
            base = self.parse_domain()
            self.expect(";")
            list_tok = self.peek()
            gens = self.parse_list(base)
            self.expect(")")
            try:
                return Localized(base, tuple(gens))
            except PSModulesError as e:
                raise self.semantic(str(e), list_tok)
        raise self.error(f"expected a domain, got {tok.value or tok.typ!r}")

    # --- elements ---
    def parse_list(self, D: DomainDescriptor) -> List[Any]:
        self.expect("[")
        items: List[Any] = []
        if self.peek().typ != "]":
            items.append(self.parse_element(D))
            while self.peek().typ == ",":
                self.next()
                items.append(self.parse_element(D))
        self.expect("]")
        return items

    def parse_element(self, D: DomainDescriptor):
        value = self.parse_term(D)
        while self.peek().typ in ("+", "-"):
            op = self.next().typ
            rhs = self.parse_term(D)
            value = D.add(value, rhs) if op == "+" else D.sub(value, rhs)
        return value

    def _starts_primary(self) -> bool:
        tok = self.peek()
        return tok.typ in ("INT", "(") or (tok.typ == "NAME" and tok.value in ("w", "x"))

    def parse_term(self, D: DomainDescriptor):
        value = self.parse_unary(D)
        while True:
            tok = self.peek()
            if tok.typ == "*":
                self.next()
                value = D.mul(value, self.parse_unary(D))
            elif tok.typ == "/":
                self.next()
                div_tok = self.peek()
                divisor = self.parse_unary(D)
                value = self._divide(D, value, divisor, div_tok)
            elif self._starts_primary():
                value = D.mul(value, self.parse_unary(D))
            else:
                return value

    def _divide(self, D: DomainDescriptor, value, divisor, tok: Token):
        if D.is_zero(divisor):
            raise self.semantic("division by zero", tok)
        if isinstance(D, Localized):
            monomial = _as_s_monomial(D, divisor)
            if monomial is not None:
                unit, exps = monomial
                num = D.base.mul(value.num, unit)
                return D.make(num, [i + j for i, j in zip(value.exps, exps)])
        q = D.exact_div(divisor, value)
        if q is None:
            raise self.semantic(f"{D.format(divisor)} does not divide {D.format(value)} in {D}", tok)
        return q

    def parse_unary(self, D: DomainDescriptor):
        if self.peek().typ == "-":
            self.next()
            return D.neg(self.parse_unary(D))
        return self.parse_power(D)

    def parse_power(self, D: DomainDescriptor):
        base = self.parse_primary(D)
        if self.peek().typ == "^":
            self.next()
            k = int(self.expect("INT").value)
            return D.power(base, k)
        return base

    def parse_primary(self, D: DomainDescriptor):
        tok = self.peek()
        if tok.typ == "INT":
            self.next()
            return D.coerce(int(tok.value))
        if tok.typ == "(":
            self.next()
            value = self.parse_element(D)
            self.expect(")")
            return value
        if tok.typ == "NAME" and tok.value == "w":
            self.next()
            quad = D.base if isinstance(D, Localized) else D
            if not isinstance(quad, ImagQuadOrder):
                raise self.semantic(f"w is not an element of {D}", tok)
            return D.coerce(quad.w)
        if tok.typ == "NAME" and tok.value == "x":
            self.next()
            if not isinstance(D, PolyOverRationals):
                raise self.semantic(f"x is not an element of {D}", tok)
            return D.coerce(X)
        raise self.error(f"expected an element, got {tok.value or tok.typ!r}")

    # --- vectors & modules ---
    def parse_vector(self, D: DomainDescriptor) -> Tuple[Any, ...]:
        """A parenthesized tuple; a lone element is a vector of length one.

        "(3)" and "(1+w)" are vectors of length one as well, so a
        parenthesized expression followed by an operator is re-read as an
        element.
        """
        start = self.pos
        if self.peek().typ == "(":
            self.next()
            items = [self.parse_element(D)]
            while self.peek().typ == ",":
                self.next()
                items.append(self.parse_element(D))
            self.expect(")")
            if len(items) > 1 or self.peek().typ in (",", "]", ")", "EOF") or self.at_name("loc"):
                return tuple(items)
            self.pos = start
        return (self.parse_element(D),)

    def parse_module(self, D: Optional[DomainDescriptor] = None) -> AnyModule:
        if self.at_name("module"):
            self.next()
            self.expect("NAME", "over")
            D = self.parse_domain()
        if D is None:
            raise self.error("module literal needs 'module over <domain>' or a --domain")
        if isinstance(D, Localized):
            raise self.semantic("write localized modules as '... loc by [...]' over the base ring", self.peek())
        self.expect("NAME", "rank")
        rank_tok = self.expect("INT")
        rank = int(rank_tok.value)
        if rank < 1:
            raise self.semantic("module rank must be positive", rank_tok)
        self.expect("NAME", "gens")
        self.expect("[")
        gens: List[Tuple[Any, ...]] = []
        if self.peek().typ != "]":
            gens.append(self._module_vector(D, rank))
            while self.peek().typ == ",":
                self.next()
                gens.append(self._module_vector(D, rank))
        self.expect("]")
        try:
            M: AnyModule = module_from_generators(D, rank, gens)
        except PSModulesError as e:
            raise self.semantic(str(e), rank_tok)
        if self.at_name("loc"):
            self.next()
            by = self.expect("NAME", "by")
            S = self.parse_list(D)
            try:
                M = LocModuleView(M, tuple(S))
            except PSModulesError as e:
                raise self.semantic(str(e), by)
        return M

    def _module_vector(self, D: DomainDescriptor, rank: int) -> Tuple[Any, ...]:
        tok = self.peek()
        v = self.parse_vector(D)
        if len(v) != rank:
            raise self.semantic(f"generator of length {len(v)} in a rank {rank} module", tok)
        return v


def _as_s_monomial(L: Localized, value) -> Optional[Tuple[Any, List[int]]]:
    """(u^-1, exps) when value equals u·prod(s_i^exps[i]) for a base unit u."""
    if any(value.exps):
        return None
    base = L.base
    num = value.num
    exps = [0] * len(L.s_generators)
    for i, g in enumerate(L.s_generators):
        while True:
            q = base.exact_div(g, num)
            if q is None:
                break
            num = q
            exps[i] += 1
    if not base.is_unit(num):
        return None
    return base.exact_div(num, base.one), exps


# ------------------------------------------------------------
# ENTRY POINTS
# ------------------------------------------------------------
def parse_domain(text: str) -> DomainDescriptor:
    p = Parser(text)
    D = p.parse_domain()
    p.expect_end()
    return D


def parse_element(text: str, D: DomainDescriptor):
    p = Parser(text)
    value = p.parse_element(D)
    p.expect_end()
    return value


def parse_element_list(text: str, D: DomainDescriptor) -> List[Any]:
    p = Parser(text)
    items = p.parse_list(D)
    p.expect_end()
    return items


def parse_ideal(text: str, D: DomainDescriptor) -> OIdeal:
    p = Parser(text)
    tok = p.peek()
    gens = p.parse_list(D)
    p.expect_end()
    try:
        return ideal_from_generators(D, gens)
    except PSModulesError as e:
        raise SemanticError(str(e), tok.line, tok.column)


def parse_module(text: str, D: Optional[DomainDescriptor] = None) -> AnyModule:
    p = Parser(text)
    M = p.parse_module(D)
    p.expect_end()
    return M


def parse_vector(text: str, M: AnyModule):
    """A vector of M; entries may be S-fractions when M is localized."""
    p = Parser(text)
    tok = p.peek()
    D = M.local_domain if isinstance(M, LocModuleView) else M.domain
    v = p.parse_vector(D)
    p.expect_end()
    if len(v) != M.rank:
        raise SemanticError(f"vector of length {len(v)} in a rank {M.rank} module", tok.line, tok.column)
    try:
        return M.coerce(v)
    except PSModulesError as e:
        raise SemanticError(str(e), tok.line, tok.column)
