"""Recursive-descent parser for agent source (.asl subset).

Grammar:
    agent    := (belief "." | "!" literal "." | rule "." | plan ".")*
    rule     := literal ":-" logicexpr
    plan     := trigger [":" logicexpr] ["<-" body]
    trigger  := "+" ["!"] literal | "-" literal
    body     := step (";" step)*
    step     := "!" literal | "+" literal | "-" literal
              | "." name ["(" args ")"]          (internal action)
              | atom [":" atom] ["(" args ")"]   (environment action)

Logic expressions use `|`, `&`, `not` (loosest to tightest) over literals and
relational tests; relational operands are terms or arithmetic expressions
(`*` `/` over `+` `-`, left associative). `//` starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..errors import AslSemanticError, AslSyntaxError
from .ast import (
    AchieveSubgoal,
    AddBelief,
    AgentProgram,
    And,
    ArithExpr,
    Atom,
    BinOp,
    Const,
    EnvironmentAction,
    InternalAction,
    ListTerm,
    Lit,
    Literal,
    LogicExpr,
    Not,
    Num,
    Or,
    Plan,
    Rel,
    RemoveBelief,
    Rule,
    SourceLoc,
    Str,
    Structure,
    Term,
    TriggerEvent,
    TriggerKind,
    Var,
    VarRef,
    check_plan_bindings,
    is_ground,
)

# token kinds
ATOM, VAR, NUMBER, STRING, DOTNAME = "atom", "variable", "number", "string", "dotname"
LPAREN, RPAREN, LBRACKET, RBRACKET = "(", ")", "[", "]"
COMMA, SEMI, DOT, BANG, COLON = ",", ";", ".", "!", ":"
PLUS, MINUS, STAR, SLASH = "+", "-", "*", "/"
AMP, PIPE, NOT, ARROW, RULEARROW = "&", "|", "not", "<-", ":-"
RELOP, EOF = "relop", "end of input"

_SIMPLE = {
    "(": LPAREN, ")": RPAREN, "[": LBRACKET, "]": RBRACKET,
    ",": COMMA, ";": SEMI, "!": BANG, "+": PLUS, "-": MINUS,
    "*": STAR, "/": SLASH, "&": AMP, "|": PIPE,
}

_ARITH_OPS = frozenset({PLUS, MINUS, STAR, SLASH})


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    value: object
    line: int
    col: int


# identifiers and numbers are ASCII by the lexical rules; unicode stays
# confined to string literals
def _is_digit(c: str) -> bool:
    return "0" <= c <= "9"


def _is_ident_start(c: str) -> bool:
    return "a" <= c <= "z" or "A" <= c <= "Z" or c == "_"


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or _is_digit(c)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(msg: str) -> AslSyntaxError:
        return AslSyntaxError(msg, line, col)

    while i < n:
        c = source[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\\":
                    if j + 1 >= n or source[j + 1] not in '"\\':
                        raise AslSyntaxError(
                            "bad escape in string (only \\\" and \\\\ are allowed)",
                            line, col + (j - i))
                    buf.append(source[j + 1])
                    j += 2
                else:
                    buf.append(source[j])
                    j += 1
            if j >= n:
                raise err("unterminated string")
            text = source[i:j + 1]
            tokens.append(Token(STRING, text, "".join(buf), start_line, start_col))
            for ch in text:
                if ch == "\n":
                    line, col = line + 1, 1
                else:
                    col += 1
            i = j + 1
            continue
        if _is_digit(c):
            j = i + 1
            while j < n and _is_digit(source[j]):
                j += 1
            if j < n and source[j] == "." and j + 1 < n and _is_digit(source[j + 1]):
                j += 1
                while j < n and _is_digit(source[j]):
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and _is_digit(source[k]):
                    j = k + 1
                    while j < n and _is_digit(source[j]):
                        j += 1
            text = source[i:j]
            value = float(text)
            if value in (float("inf"), float("-inf")):
                raise err("number literal out of range")
            tokens.append(Token(NUMBER, text, value, start_line, start_col))
            col += j - i
            i = j
            continue
        if _is_ident_start(c):
            j = i + 1
            while j < n and _is_ident_char(source[j]):
                j += 1
            text = source[i:j]
            if text == "not":
                kind = NOT
            elif "a" <= text[0] <= "z":
                kind = ATOM
            else:
                kind = VAR
            tokens.append(Token(kind, text, text, start_line, start_col))
            col += j - i
            i = j
            continue
        if c == ".":
            if i + 1 < n and "a" <= source[i + 1] <= "z":
                j = i + 1
                while j < n and _is_ident_char(source[j]):
                    j += 1
                name = source[i + 1:j]
                tokens.append(Token(DOTNAME, source[i:j], name, start_line, start_col))
                col += j - i
                i = j
            else:
                tokens.append(Token(DOT, ".", ".", start_line, start_col))
                i, col = i + 1, col + 1
            continue
        if source.startswith("<-", i):
            tokens.append(Token(ARROW, "<-", "<-", start_line, start_col))
            i, col = i + 2, col + 2
            continue
        if source.startswith(":-", i):
            tokens.append(Token(RULEARROW, ":-", ":-", start_line, start_col))
            i, col = i + 2, col + 2
            continue
        if source.startswith("\\==", i):
            tokens.append(Token(RELOP, "\\==", "\\==", start_line, start_col))
            i, col = i + 3, col + 3
            continue
        for op in ("==", "<=", ">="):
            if source.startswith(op, i):
                tokens.append(Token(RELOP, op, op, start_line, start_col))
                i, col = i + 2, col + 2
                break
        else:
            if c in "<>=":
                tokens.append(Token(RELOP, c, c, start_line, start_col))
                i, col = i + 1, col + 1
                continue
            if c == ":":
                tokens.append(Token(COLON, ":", ":", start_line, start_col))
                i, col = i + 1, col + 1
                continue
            if c in _SIMPLE:
                tokens.append(Token(_SIMPLE[c], c, c, start_line, start_col))
                i, col = i + 1, col + 1
                continue
            raise err(f"unexpected character {c!r}")
    tokens.append(Token(EOF, "", None, line, col))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token plumbing ------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def expect(self, kind: str, context: str = "") -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(context or f"expected {kind}", {kind})
        return self.advance()

    def fail(self, message: str, expected: set[str]) -> None:
        tok = self.peek()
        found = tok.text or "end of input"
        raise AslSyntaxError(
            f"{message}, found {found!r}", tok.line, tok.col, expected
        )

    def loc(self, tok: Token) -> SourceLoc:
        return SourceLoc(tok.line, tok.col)

    # -- program -------------------------------------------------------

    def parse_program(self, name: str) -> AgentProgram:
        beliefs: list[Literal] = []
        goals: list[Literal] = []
        rules: list[Rule] = []
        plans: list[Plan] = []
        while not self.at(EOF):
            tok = self.peek()
            if tok.kind in (PLUS, MINUS):
                plans.append(self.parse_plan())
            elif tok.kind == BANG:
                self.advance()
                lit = self.parse_literal(loc=self.loc(tok))
                self.expect(DOT, "expected '.' after initial goal")
                goals.append(lit)
            elif tok.kind == ATOM:
                lit = self.parse_literal(loc=self.loc(tok))
                if self.at(RULEARROW):
                    self.advance()
                    body = self.parse_logic_expr()
                    self.expect(DOT, "expected '.' after rule body")
                    rules.append(Rule(lit, body, loc=self.loc(tok)))
                else:
                    self.expect(DOT, "expected '.' after belief")
                    if not is_ground(lit):
                        raise AslSemanticError(
                            "initial beliefs must be ground", tok.line, tok.col)
                    beliefs.append(lit)
            else:
                self.fail("expected a belief, goal, rule or plan",
                          {PLUS, MINUS, BANG, ATOM})
        return AgentProgram(name, tuple(beliefs), tuple(goals), tuple(rules), tuple(plans))

    # -- plans -----------------------------------------------------------

    def parse_plan(self) -> Plan:
        tok = self.advance()  # + or -
        if tok.kind == PLUS:
            if self.at(BANG):
                self.advance()
                kind = TriggerKind.GOAL_ADDED
            else:
                kind = TriggerKind.BELIEF_ADDED
        else:
            if self.at(BANG):
                self.fail("failure-handling triggers (-!) are not supported", {ATOM})
            kind = TriggerKind.BELIEF_REMOVED
        trigger = TriggerEvent(kind, self.parse_literal())
        context: Optional[LogicExpr] = None
        if self.at(COLON):
            self.advance()
            context = self.parse_logic_expr()
        body: list = []
        if self.at(ARROW):
            self.advance()
            body.append(self.parse_step())
            while self.at(SEMI):
                self.advance()
                body.append(self.parse_step())
        self.expect(DOT, "expected '.' at end of plan")
        plan = Plan(trigger, context, tuple(body), loc=self.loc(tok))
        problems = check_plan_bindings(plan)
        if problems:
            raise AslSemanticError(problems[0], tok.line, tok.col)
        return plan

    def parse_step(self):
        tok = self.peek()
        if tok.kind == BANG:
            self.advance()
            return AchieveSubgoal(self.parse_literal())
        if tok.kind == PLUS:
            self.advance()
            return AddBelief(self.parse_literal())
        if tok.kind == MINUS:
            self.advance()
            return RemoveBelief(self.parse_literal())
        if tok.kind == DOTNAME:
            self.advance()
            return InternalAction(tok.value, self.parse_opt_args())
        if tok.kind == ATOM:
            self.advance()
            action_id = tok.value
            if self.at(COLON):
                self.advance()
                suffix = self.expect(ATOM, "expected action name after ':'")
                action_id = f"{action_id}:{suffix.value}"
            return EnvironmentAction(action_id, self.parse_opt_args())
        self.fail("expected a plan step", {BANG, PLUS, MINUS, DOTNAME, ATOM})

    def parse_opt_args(self) -> tuple[Term, ...]:
        if not self.at(LPAREN):
            return ()
        self.advance()
        if self.at(RPAREN):
            self.advance()
            return ()
        args = [self.parse_term()]
        while self.at(COMMA):
            self.advance()
            args.append(self.parse_term())
        self.expect(RPAREN, "expected ')' after arguments")
        return tuple(args)

    # -- terms and literals ---------------------------------------------

    def parse_literal(self, loc: Optional[SourceLoc] = None) -> Literal:
        tok = self.expect(ATOM, "expected a predicate name")
        args: tuple[Term, ...] = ()
        if self.at(LPAREN):
            self.advance()
            items = [self.parse_term()]
            while self.at(COMMA):
                self.advance()
                items.append(self.parse_term())
            self.expect(RPAREN, "expected ')' after literal arguments")
            args = tuple(items)
        return Literal(tok.value, args, loc=loc or self.loc(tok))

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == ATOM:
            self.advance()
            if self.at(LPAREN):
                self.advance()
                args = [self.parse_term()]
                while self.at(COMMA):
                    self.advance()
                    args.append(self.parse_term())
                self.expect(RPAREN, "expected ')' after structure arguments")
                return Structure(tok.value, tuple(args))
            return Atom(tok.value)
        if tok.kind == VAR:
            self.advance()
            return Var(tok.value)
        if tok.kind == NUMBER:
            self.advance()
            return Num(tok.value)
        if tok.kind == MINUS and self.peek(1).kind == NUMBER:
            self.advance()
            return Num(-self.advance().value)
        if tok.kind == STRING:
            self.advance()
            return Str(tok.value)
        if tok.kind == LBRACKET:
            self.advance()
            items: list[Term] = []
            if not self.at(RBRACKET):
                items.append(self.parse_term())
                while self.at(COMMA):
                    self.advance()
                    items.append(self.parse_term())
            self.expect(RBRACKET, "expected ']' at end of list")
            return ListTerm(tuple(items))
        self.fail("expected a term", {ATOM, VAR, NUMBER, STRING, LBRACKET})

    # -- logic expressions ------------------------------------------------

    def parse_logic_expr(self) -> LogicExpr:
        left = self.parse_logic_and()
        if self.at(PIPE):
            self.advance()
            return Or(left, self.parse_logic_expr())
        return left

    def parse_logic_and(self) -> LogicExpr:
        left = self.parse_logic_unary()
        if self.at(AMP):
            self.advance()
            return And(left, self.parse_logic_and())
        return left

    def parse_logic_unary(self) -> LogicExpr:
        if self.at(NOT):
            self.advance()
            return Not(self.parse_logic_unary())
        if self.at(LPAREN):
            # Either a parenthesised logic expression or an arithmetic
            # operand; try the logic reading, back off if an operator follows.
            mark = self.pos
            inner: Optional[LogicExpr] = None
            try:
                self.advance()
                candidate = self.parse_logic_expr()
                self.expect(RPAREN)
                if self.peek().kind not in _ARITH_OPS and not self.at(RELOP):
                    inner = candidate
            except AslSyntaxError:
                pass
            if inner is not None:
                return inner
            self.pos = mark
        return self.parse_rel_or_literal()

    def parse_rel_or_literal(self) -> LogicExpr:
        tok = self.peek()
        lhs = self.parse_operand()
        if self.at(RELOP):
            op = self.advance().value
            rhs = self.parse_operand()
            return Rel(op, lhs, rhs)
        if isinstance(lhs, (Atom, Structure)):
            return Lit(Literal.from_term(lhs))
        raise AslSyntaxError(
            "expected a relational operator (only predicates stand alone in a "
            "logic expression)", tok.line, tok.col, {RELOP})

    # An operand is a plain term unless arithmetic operators appear, in which
    # case it becomes an ArithExpr over numbers and variables.

    def parse_operand(self) -> Union[Term, ArithExpr]:
        left = self.parse_mul()
        while self.peek().kind in (PLUS, MINUS):
            op = self.advance().kind
            right = self.parse_mul()
            left = self._binop(op, left, right)
        return left

    def parse_mul(self) -> Union[Term, ArithExpr]:
        left = self.parse_arith_primary()
        while self.peek().kind in (STAR, SLASH):
            op = self.advance().kind
            right = self.parse_arith_primary()
            left = self._binop(op, left, right)
        return left

    def parse_arith_primary(self) -> Union[Term, ArithExpr]:
        if self.at(LPAREN):
            self.advance()
            inner = self.parse_operand()
            self.expect(RPAREN, "expected ')' in arithmetic expression")
            return inner
        return self.parse_term()

    def _binop(self, op: str, left, right) -> BinOp:
        return BinOp(op, self._as_arith(left), self._as_arith(right))

    def _as_arith(self, side) -> ArithExpr:
        if isinstance(side, (Const, VarRef, BinOp)):
            return side
        if isinstance(side, Num):
            return Const(side)
        if isinstance(side, Var):
            return VarRef(side)
        tok = self.peek()
        raise AslSyntaxError(
            "only numbers and variables may appear in arithmetic",
            tok.line, tok.col)


def parse_agent(source: str, name: str = "agent") -> AgentProgram:
    """Parse agent source text into a program named `name`.

    Raises AslSyntaxError (with line/column and the expected-token set) on
    malformed input and AslSemanticError on invariant violations.
    """
    return Parser(source).parse_program(name)
