"""A concurrent call-by-value λ-calculus with global references, and its
explicit-substitution intermediate form.

Surface terms: variables, ∗, λ-abstraction, application, `get r`, `set r V`,
parallel composition and store bindings `r <= V`.  The IR replaces
applications and gets by nodes carrying reference-substitution multisets and
adds variable substitutions and formal sums.

The type-and-effect system assigns every term a type and the set of
references it may touch; reference contexts must be stratified (no reference
reachable from its own stored type).
"""
from __future__ import annotations

import graphlib
import itertools
import re
from dataclasses import dataclass, field

from .errors import BudgetExhausted, NotStratified, ParseError, TypingError

# ---------------------------------------------------------------------------
# Surface terms


@dataclass(frozen=True)
class TermA:
    pass


@dataclass(frozen=True)
class Var(TermA):
    name: str


@dataclass(frozen=True)
class Star(TermA):
    pass


@dataclass(frozen=True)
class Lam(TermA):
    var: str
    body: "TermA"


@dataclass(frozen=True)
class App(TermA):
    fun: "TermA"
    arg: "TermA"


@dataclass(frozen=True)
class Get(TermA):
    ref: str


@dataclass(frozen=True)
class Set(TermA):
    ref: str
    value: "TermA"


@dataclass(frozen=True)
class Par(TermA):
    left: "TermA"
    right: "TermA"


@dataclass(frozen=True)
class Store(TermA):
    ref: str
    value: "TermA"


def is_value(t: TermA) -> bool:
    return isinstance(t, (Var, Star, Lam))


def fmt_term(t: TermA) -> str:
    """Concrete syntax matching the term parser; minimal parentheses."""

    def atom(s: TermA) -> str:
        if isinstance(s, (Var, Star)):
            return fmt_term(s)
        return "(" + fmt_term(s) + ")"

    def head(s: TermA) -> str:
        # application heads may be chains, gets, or atoms
        if isinstance(s, (App, Get, Var, Star)):
            return fmt_term(s)
        return "(" + fmt_term(s) + ")"

    if isinstance(t, Var):
        return t.name
    if isinstance(t, Star):
        return "*"
    if isinstance(t, Lam):
        return f"\\{t.var}. {fmt_term(t.body)}"
    if isinstance(t, App):
        return f"{head(t.fun)} {atom(t.arg)}"
    if isinstance(t, Get):
        return f"get {t.ref}"
    if isinstance(t, Set):
        return f"set {t.ref} {atom(t.value)}"
    if isinstance(t, Par):
        # a bare lambda on the left would swallow the '||' into its body
        def ends_lam(s: TermA) -> bool:
            if isinstance(s, Lam):
                return True
            return isinstance(s, Par) and ends_lam(s.right)

        left = ("(" + fmt_term(t.left) + ")") if ends_lam(t.left) else fmt_term(t.left)
        right = (
            ("(" + fmt_term(t.right) + ")")
            if isinstance(t.right, Par)
            else fmt_term(t.right)
        )
        return f"{left} || {right}"
    if isinstance(t, Store):
        return f"{t.ref} <= {atom(t.value)}"
    raise TypeError(f"not a source term: {t!r}")


# ---------------------------------------------------------------------------
# IR terms (values are shared with TermA: Var, Star, Lam-with-IR-body)

RefVals = tuple[tuple[str, tuple], ...]  # sorted (ref, (values...)) pairs


def ref_vals(m: dict) -> RefVals:
    return tuple(sorted((r, tuple(vs)) for r, vs in m.items()))


@dataclass(frozen=True)
class TermL:
    pass


@dataclass(frozen=True)
class VarL(TermL):
    name: str


@dataclass(frozen=True)
class StarL(TermL):
    pass


@dataclass(frozen=True)
class LamL(TermL):
    var: str
    body: "TermL"


@dataclass(frozen=True)
class GetL(TermL):
    ref: str


@dataclass(frozen=True)
class ParL(TermL):
    left: "TermL"
    right: "TermL"


@dataclass(frozen=True)
class VarSubst(TermL):
    subst: tuple[tuple[str, "TermL"], ...]  # variable -> value
    body: "TermL"


@dataclass(frozen=True)
class LamSubst(TermL):
    vals: RefVals
    fun: "TermL"
    arg: "TermL"


@dataclass(frozen=True)
class DownSubst(TermL):
    vals: RefVals
    body: "TermL"


@dataclass(frozen=True)
class UpSubst(TermL):
    vals: RefVals
    body: "TermL"


@dataclass(frozen=True)
class SumL(TermL):
    terms: tuple["TermL", ...]


def is_value_l(t: TermL) -> bool:
    return isinstance(t, (VarL, StarL, LamL))


# ---------------------------------------------------------------------------
# Types and effects


@dataclass(frozen=True)
class TypeExpr:
    pass


@dataclass(frozen=True)
class Behavior(TypeExpr):
    pass


@dataclass(frozen=True)
class UnitT(TypeExpr):
    pass


@dataclass(frozen=True)
class Arrow(TypeExpr):
    dom: TypeExpr
    effect: frozenset[str]
    cod: TypeExpr

    def __repr__(self):
        return fmt_type(self)


@dataclass(frozen=True)
class Reg(TypeExpr):
    ref: str
    ty: TypeExpr


def eff_of_type(t: TypeExpr) -> frozenset[str]:
    if isinstance(t, (Behavior, UnitT)):
        return frozenset()
    if isinstance(t, Arrow):
        return eff_of_type(t.dom) | t.effect | eff_of_type(t.cod)
    if isinstance(t, Reg):
        return frozenset({t.ref}) | eff_of_type(t.ty)
    raise TypeError(t)


def fmt_type(t: TypeExpr) -> str:
    if isinstance(t, Behavior):
        return "B"
    if isinstance(t, UnitT):
        return "Unit"
    if isinstance(t, Reg):
        return f"Reg {t.ref} {fmt_type(t.ty)}"
    if isinstance(t, Arrow):
        e = t.effect
        eff = ",".join(sorted(e)) if isinstance(e, frozenset) else "?"
        return f"({fmt_type(t.dom)} -{{{eff}}}> {fmt_type(t.cod)})"
    return repr(t)


RegionCtx = dict  # ref -> TypeExpr, insertion ordered


def check_stratified(R: RegionCtx):
    """Return (True, witness order) or (False, None)."""
    ts = graphlib.TopologicalSorter()
    for r, ty in R.items():
        eff = eff_of_type(ty)
        if not eff <= R.keys():
            return False, None
        ts.add(r, *sorted(eff))  # r depends on everything in Eff(A_r)
        if r in eff:
            return False, None
    try:
        order = list(ts.static_order())
    except graphlib.CycleError:
        return False, None
    return True, order


# ---------------------------------------------------------------------------
# Parsing

_TERM_TOKEN = re.compile(r"\s*(\|\||<=|[\\.()*]|[A-Za-z_][A-Za-z0-9_']*)")


def _tokenize_term(text: str):
    toks, pos = [], 0
    while pos < len(text):
        m = _TERM_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad character {text[pos]!r}", pos)
            break
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    return toks


class _TermParser:
    def __init__(self, text: str):
        self.toks = _tokenize_term(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok[0]

    def offset(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else -1

    def expect(self, tok):
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}", self.offset())
        return self.next()

    def parse(self) -> TermA:
        t = self.term()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r}", self.offset())
        return t

    def term(self) -> TermA:
        # lambda extends as far right as possible; '||' binds loosest
        if self.peek() == "\\":
            self.next()
            x = self.ident()
            self.expect(".")
            return Lam(x, self.term())
        left = self.app()
        while self.peek() == "||":
            self.next()
            if self.peek() == "\\":
                right = self.term()
                return Par(left, right)
            left = Par(left, self.app_or_lam())
        return left

    def app_or_lam(self) -> TermA:
        if self.peek() == "\\":
            self.next()
            x = self.ident()
            self.expect(".")
            return Lam(x, self.term())
        return self.app()

    def app(self) -> TermA:
        t = self.atom()
        while self.peek() not in (None, ")", "||"):
            if self.peek() == "<=":
                # store binding: the previous atom must be a reference name
                if not isinstance(t, Var):
                    raise ParseError("store binding needs a reference name", self.offset())
                self.next()
                return Store(t.name, self.value())
            t = App(t, self.atom())
        return t

    def value(self) -> TermA:
        v = self.atom()
        if not is_value(v):
            raise ParseError("expected a value (variable, * or lambda)", self.offset())
        return v

    def atom(self) -> TermA:
        tok = self.peek()
        if tok == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if tok == "*":
            self.next()
            return Star()
        if tok == "\\":
            self.next()
            x = self.ident()
            self.expect(".")
            return Lam(x, self.term())
        if tok == "get":
            self.next()
            return Get(self.ident())
        if tok == "set":
            self.next()
            r = self.ident()
            return Set(r, self.value())
        if tok is not None and tok[0].isalpha() or tok == "_":
            self.next()
            return Var(tok)
        raise ParseError(f"unexpected token {tok!r}", self.offset())

    def ident(self) -> str:
        tok = self.peek()
        if tok is None or not (tok[0].isalpha() or tok[0] == "_"):
            raise ParseError("expected an identifier", self.offset())
        return self.next()


def parse_term(text: str) -> TermA:
    return _TermParser(text).parse()


_TYPE_TOKEN = re.compile(r"\s*(-\{[^}]*\}>|->|[()]|[A-Za-z_][A-Za-z0-9_']*)")


def _tokenize_type(text: str):
    toks, pos = [], 0
    while pos < len(text):
        m = _TYPE_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad character {text[pos]!r} in type", pos)
            break
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    return toks


def parse_type(text: str) -> TypeExpr:
    toks = _tokenize_type(text)
    i = [0]

    def peek():
        return toks[i[0]][0] if i[0] < len(toks) else None

    def advance():
        tok = toks[i[0]]
        i[0] += 1
        return tok[0]

    def offset():
        return toks[i[0]][1] if i[0] < len(toks) else -1

    def arrow() -> TypeExpr:
        left = atom()
        tok = peek()
        if tok == "->" or (tok and tok.startswith("-{")):
            advance()
            eff = frozenset() if tok == "->" else frozenset(
                s.strip() for s in tok[2:-2].split(",") if s.strip()
            )
            return Arrow(left, eff, arrow())
        return left

    def atom() -> TypeExpr:
        tok = peek()
        if tok == "(":
            advance()
            t = arrow()
            if peek() != ")":
                raise ParseError("expected ')'", offset())
            advance()
            return t
        if tok == "Unit":
            advance()
            return UnitT()
        if tok == "B":
            advance()
            return Behavior()
        if tok == "Reg":
            advance()
            r = advance()
            return Reg(r, atom())
        raise ParseError(f"unexpected type token {tok!r}", offset())

    t = arrow()
    if peek() is not None:
        raise ParseError(f"trailing type input {peek()!r}", offset())
    return t


def parse_region_ctx(text: str) -> RegionCtx:
    ctx: RegionCtx = {}
    for k, line in enumerate(text.splitlines()):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"line {k + 1}: expected 'r : type'")
        name, ty = line.split(":", 1)
        ctx[name.strip()] = parse_type(ty)
    return ctx


# ---------------------------------------------------------------------------
# Type-and-effect inference
#
# Lambda binders get type metavariables resolved by unification at
# application sites; latent effects of unknown arrows get effect variables
# solved afterwards by a least fixpoint over the recorded constraints.
# Unresolved metavariables default to Unit / the empty effect.


class _TMeta(TypeExpr):
    __slots__ = ("id", "bound")

    def __init__(self, ident: int):
        object.__setattr__(self, "id", ident)
        object.__setattr__(self, "bound", None)

    def bind(self, t: TypeExpr):
        object.__setattr__(self, "bound", t)

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other

    def __repr__(self):
        return f"_TMeta({self.id})"


@dataclass(frozen=True)
class _Eff:
    consts: frozenset[str] = frozenset()
    evars: frozenset[int] = frozenset()

    def union(self, other: "_Eff") -> "_Eff":
        return _Eff(self.consts | other.consts, self.evars | other.evars)


def _eff_lit(*refs: str) -> _Eff:
    return _Eff(frozenset(refs))


class Infer:
    """Shared engine: walks a term, synthesizing (type, effect) per node."""

    def __init__(self, R: RegionCtx):
        ok, _ = check_stratified(R)
        if not ok:
            raise NotStratified(f"region context {list(R)} is not stratified")
        self.R = R
        self.counter = itertools.count()
        self.evar_lb: dict[int, _Eff] = {}
        self.evar_alias: dict[int, int] = {}
        self.eqs: list[tuple[_Eff, _Eff]] = []
        self.annot: dict[int, tuple[TypeExpr, _Eff]] = {}
        self.nodes: list = []  # keep referents alive so id() stays unique
        self.relaxations: list[str] = []

    # -- metavariables ------------------------------------------------------

    def fresh_t(self) -> _TMeta:
        return _TMeta(next(self.counter))

    def fresh_e(self) -> _Eff:
        v = next(self.counter)
        self.evar_lb[v] = _Eff()
        return _Eff(frozenset(), frozenset({v}))

    def resolve(self, t: TypeExpr) -> TypeExpr:
        while isinstance(t, _TMeta) and t.bound is not None:
            t = t.bound
        return t

    def _eroot(self, v: int) -> int:
        while v in self.evar_alias:
            v = self.evar_alias[v]
        return v

    # -- unification --------------------------------------------------------

    def unify(self, a: TypeExpr, b: TypeExpr, rule: str):
        a, b = self.resolve(a), self.resolve(b)
        if a is b:
            return
        if isinstance(a, _TMeta):
            if self._occurs(a, b):
                raise TypingError(rule, "infinite type")
            a.bind(b)
            return
        if isinstance(b, _TMeta):
            self.unify(b, a, rule)
            return
        if isinstance(a, UnitT) and isinstance(b, UnitT):
            return
        if isinstance(a, Behavior) and isinstance(b, Behavior):
            return
        if isinstance(a, Reg) and isinstance(b, Reg) and a.ref == b.ref:
            self.unify(a.ty, b.ty, rule)
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.dom, b.dom, rule)
            self.unify(a.cod, b.cod, rule)
            self.unify_eff(a.effect, b.effect, rule)
            return
        raise TypingError(rule, f"cannot unify {fmt_type(a)} with {fmt_type(b)}")

    def _occurs(self, m: _TMeta, t: TypeExpr) -> bool:
        t = self.resolve(t)
        if t is m:
            return True
        if isinstance(t, Arrow):
            return self._occurs(m, t.dom) or self._occurs(m, t.cod)
        if isinstance(t, Reg):
            return self._occurs(m, t.ty)
        return False

    def unify_eff(self, a, b, rule: str):
        a, b = self._as_eff(a), self._as_eff(b)
        self.eqs.append((a, b))

    @staticmethod
    def _as_eff(e) -> _Eff:
        return e if isinstance(e, _Eff) else _Eff(frozenset(e))

    # -- finalization --------------------------------------------------------

    def _eval_eff(self, e: _Eff) -> frozenset[str]:
        out = set(e.consts)
        for v in e.evars:
            out |= self.evar_lb.get(self._eroot(v), _Eff()).consts
        return frozenset(out)

    def solve(self):
        """Effect equations: alias variable-only sides, then grow lower
        bounds to a fixpoint, then check every equation holds."""
        # alias pure-variable equations
        for a, b in self.eqs:
            if not a.consts and len(a.evars) == 1 and not b.consts and len(b.evars) == 1:
                ra, rb = self._eroot(next(iter(a.evars))), self._eroot(next(iter(b.evars)))
                if ra != rb:
                    self.evar_alias[ra] = rb
                    lb = self.evar_lb.pop(ra, _Eff())
                    self.evar_lb[rb] = self.evar_lb.get(rb, _Eff()).union(lb)
        changed = True
        while changed:
            changed = False
            for a, b in self.eqs:
                for side, other in ((a, b), (b, a)):
                    want = self._eval_eff(other)
                    have = self._eval_eff(side)
                    missing = want - have
                    if missing and side.evars:
                        v = self._eroot(next(iter(side.evars)))
                        self.evar_lb[v] = self.evar_lb.get(v, _Eff()).union(
                            _Eff(frozenset(missing))
                        )
                        changed = True
        for a, b in self.eqs:
            if self._eval_eff(a) != self._eval_eff(b):
                raise TypingError(
                    "sub",
                    f"effect mismatch {sorted(self._eval_eff(a))} vs {sorted(self._eval_eff(b))}",
                )

    def final_type(self, t: TypeExpr) -> TypeExpr:
        t = self.resolve(t)
        if isinstance(t, _TMeta):
            return UnitT()
        if isinstance(t, Arrow):
            return Arrow(
                self.final_type(t.dom),
                self._eval_eff(self._as_eff(t.effect)),
                self.final_type(t.cod),
            )
        if isinstance(t, Reg):
            return Reg(t.ref, self.final_type(t.ty))
        return t

    def annotations(self) -> dict[int, tuple[TypeExpr, frozenset[str]]]:
        return {
            k: (self.final_type(t), self._eval_eff(e)) for k, (t, e) in self.annot.items()
        }

    # -- judgement helpers ---------------------------------------------------

    def note(self, node, t: TypeExpr, e: _Eff):
        self.nodes.append(node)
        self.annot[id(node)] = (t, e)
        return t, e

    def ref_type(self, r: str, rule: str) -> TypeExpr:
        if r not in self.R:
            raise TypingError(rule, f"unknown reference {r!r}")
        return self.R[r]


def _infer_amadio(inf: Infer, env: dict, t: TermA):
    if isinstance(t, Var):
        if t.name not in env:
            raise TypingError("var", f"unbound variable {t.name!r}")
        return inf.note(t, env[t.name], _Eff())
    if isinstance(t, Star):
        return inf.note(t, UnitT(), _Eff())
    if isinstance(t, Lam):
        a = inf.fresh_t()
        ty, e = _infer_amadio(inf, {**env, t.var: a}, t.body)
        return inf.note(t, Arrow(a, e, ty), _Eff())
    if isinstance(t, App):
        f, e1 = _infer_amadio(inf, env, t.fun)
        a, e2 = _infer_amadio(inf, env, t.arg)
        beta = inf.fresh_t()
        lat = inf.fresh_e()
        inf.unify(f, Arrow(a, lat, beta), "app")
        return inf.note(t, beta, e1.union(e2).union(lat))
    if isinstance(t, Get):
        return inf.note(t, inf.ref_type(t.ref, "get"), _eff_lit(t.ref))
    if isinstance(t, Set):
        if not is_value(t.value):
            raise TypingError("set", "payload must be a value")
        v, _ = _infer_amadio(inf, env, t.value)
        inf.unify(v, inf.ref_type(t.ref, "set"), "set")
        return inf.note(t, UnitT(), _eff_lit(t.ref))
    if isinstance(t, Par):
        _, e1 = _infer_amadio(inf, env, t.left)
        _, e2 = _infer_amadio(inf, env, t.right)
        return inf.note(t, Behavior(), e1.union(e2))
    if isinstance(t, Store):
        if not is_value(t.value):
            raise TypingError("store", "payload must be a value")
        v, _ = _infer_amadio(inf, env, t.value)
        inf.unify(v, inf.ref_type(t.ref, "store"), "store")
        return inf.note(t, Behavior(), _Eff())
    raise TypingError("?", f"unknown term {t!r}")


def typecheck_amadio(R: RegionCtx, gamma: dict, t: TermA, want_infer: bool = False):
    inf = Infer(R)
    ty, e = _infer_amadio(inf, dict(gamma), t)
    inf.solve()
    result = (inf.final_type(ty), inf._eval_eff(e))
    if want_infer:
        return result, inf
    return result


def _infer_lthis(inf: Infer, env: dict, t: TermL):
    if isinstance(t, VarL):
        if t.name not in env:
            raise TypingError("var", f"unbound variable {t.name!r}")
        return inf.note(t, env[t.name], _Eff())
    if isinstance(t, StarL):
        return inf.note(t, UnitT(), _Eff())
    if isinstance(t, LamL):
        a = inf.fresh_t()
        ty, e = _infer_lthis(inf, {**env, t.var: a}, t.body)
        return inf.note(t, Arrow(a, e, ty), _Eff())
    if isinstance(t, GetL):
        return inf.note(t, inf.ref_type(t.ref, "get"), _eff_lit(t.ref))
    if isinstance(t, ParL):
        _, e1 = _infer_lthis(inf, env, t.left)
        _, e2 = _infer_lthis(inf, env, t.right)
        return inf.note(t, Behavior(), e1.union(e2))
    if isinstance(t, VarSubst):
        env2 = dict(env)
        for x, v in t.subst:
            if not is_value_l(v):
                raise TypingError("subst", "substituted term must be a value")
            tv, _ = _infer_lthis(inf, env, v)
            env2[x] = tv
        ty, e = _infer_lthis(inf, env2, t.body)
        return inf.note(t, ty, e)
    if isinstance(t, (LamSubst, DownSubst, UpSubst)):
        rule = "subst-r"
        if isinstance(t, LamSubst):
            f, e1 = _infer_lthis(inf, env, t.fun)
            a, e2 = _infer_lthis(inf, env, t.arg)
            beta = inf.fresh_t()
            lat = inf.fresh_e()
            inf.unify(f, Arrow(a, lat, beta), "app")
            ty, e = beta, e1.union(e2).union(lat)
        else:
            ty, e = _infer_lthis(inf, env, t.body)
        extra = set()
        for r, vs in t.vals:
            for v in vs:
                if not is_value_l(v):
                    raise TypingError(rule, "stored term must be a value")
                tv, _ = _infer_lthis(inf, env, v)
                inf.unify(tv, inf.ref_type(r, rule), rule)
            extra.add(r)
            # the rule requires r in the body effect; widening is recorded
            inf.relaxations.append(r)
        return inf.note(t, ty, e.union(_Eff(frozenset(extra))))
    if isinstance(t, SumL):
        if not t.terms:
            raise TypingError("sum", "empty sums have no type")
        ty, e = _infer_lthis(inf, env, t.terms[0])
        for s in t.terms[1:]:
            ty2, e2 = _infer_lthis(inf, env, s)
            inf.unify(ty, ty2, "sum")
            e = e.union(e2)
        return inf.note(t, ty, e)
    raise TypingError("?", f"unknown term {t!r}")


def typecheck_lthis(R: RegionCtx, gamma: dict, t: TermL, want_infer: bool = False):
    inf = Infer(R)
    ty, e = _infer_lthis(inf, dict(gamma), t)
    inf.solve()
    result = (inf.final_type(ty), inf._eval_eff(e))
    if want_infer:
        return result, inf
    return result


# ---------------------------------------------------------------------------
# Embedding into the IR


def split_stores(p: TermA):
    """Separate the thread tree from the store bindings (AC of ∥)."""
    stores: list[tuple[str, TermA]] = []

    def walk(t: TermA):
        if isinstance(t, Store):
            stores.append((t.ref, t.value))
            return None
        if isinstance(t, Par):
            l, r = walk(t.left), walk(t.right)
            if l is None:
                return r
            if r is None:
                return l
            return Par(l, r)
        return t

    tree = walk(p)
    return tree, stores


def _to_value_l(v: TermA) -> TermL:
    if isinstance(v, Var):
        return VarL(v.name)
    if isinstance(v, Star):
        return StarL()
    if isinstance(v, Lam):
        return LamL(v.var, embed_term(v.body, {}, None))
    raise TypingError("value", f"{v!r} is not a value")


def embed_term(t: TermA, store_vals: dict, effects) -> TermL:
    """Rewrite one thread; store multisets are injected at application and
    get sites, restricted to each site's inferred effect set."""

    def vals_for(eff: frozenset[str]) -> RefVals:
        return ref_vals({r: vs for r, vs in store_vals.items() if r in eff and vs})

    def eff_at(node: TermA) -> frozenset[str]:
        if effects is None:
            return frozenset(store_vals)
        return effects.get(id(node), (None, frozenset()))[1]

    if is_value(t):
        return _to_value_l(t)
    if isinstance(t, App):
        return LamSubst(
            vals_for(eff_at(t)),
            embed_term(t.fun, store_vals, effects),
            embed_term(t.arg, store_vals, effects),
        )
    if isinstance(t, Get):
        return DownSubst(vals_for(frozenset({t.ref})), GetL(t.ref))
    if isinstance(t, Set):
        return UpSubst(ref_vals({t.ref: [_to_value_l(t.value)]}), StarL())
    if isinstance(t, Par):
        return ParL(
            embed_term(t.left, store_vals, effects),
            embed_term(t.right, store_vals, effects),
        )
    raise TypingError("embed", f"cannot embed {t!r}")


def embed_lthis(p: TermA, R: RegionCtx, gamma: dict | None = None) -> TermL:
    """Full program embedding: strip stores into substitution multisets."""
    gamma = gamma or {}
    tree, stores = split_stores(p)
    (_, _), inf = typecheck_amadio(R, gamma, p, want_infer=True)
    effects = inf.annotations()
    store_vals: dict[str, list[TermL]] = {}
    for r, v in stores:
        store_vals.setdefault(r, []).append(_to_value_l(v))
    if tree is None:
        tree = Star()  # a program of stores alone behaves as a finished unit
    return embed_term(tree, store_vals, effects)


# ---------------------------------------------------------------------------
# Operational semantics (exhaustive, non-deterministic)


def free_vars(t: TermA) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset({t.name})
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, (Set, Store)):
        return free_vars(t.value)
    if isinstance(t, Par):
        return free_vars(t.left) | free_vars(t.right)
    return frozenset()


_FRESH = itertools.count()


def subst(t: TermA, x: str, v: TermA) -> TermA:
    if isinstance(t, Var):
        return v if t.name == x else t
    if isinstance(t, (Star, Get)):
        return t
    if isinstance(t, Lam):
        if t.var == x:
            return t
        if t.var in free_vars(v):
            fresh = f"{t.var}_{next(_FRESH)}"
            body = subst(t.body, t.var, Var(fresh))
            return Lam(fresh, subst(body, x, v))
        return Lam(t.var, subst(t.body, x, v))
    if isinstance(t, App):
        return App(subst(t.fun, x, v), subst(t.arg, x, v))
    if isinstance(t, Set):
        return Set(t.ref, subst(t.value, x, v))
    if isinstance(t, Store):
        return Store(t.ref, subst(t.value, x, v))
    if isinstance(t, Par):
        return Par(subst(t.left, x, v), subst(t.right, x, v))
    raise TypeError(t)


def alpha_normalize(t: TermA, env=None, counter=None) -> TermA:
    """Rename bound variables to a canonical left-to-right numbering."""
    env = env or {}
    counter = counter if counter is not None else itertools.count()
    if isinstance(t, Var):
        return Var(env.get(t.name, t.name))
    if isinstance(t, Star):
        return t
    if isinstance(t, Lam):
        fresh = f"v{next(counter)}"
        return Lam(fresh, alpha_normalize(t.body, {**env, t.var: fresh}, counter))
    if isinstance(t, App):
        return App(
            alpha_normalize(t.fun, env, counter), alpha_normalize(t.arg, env, counter)
        )
    if isinstance(t, Get):
        return t
    if isinstance(t, Set):
        return Set(t.ref, alpha_normalize(t.value, env, counter))
    if isinstance(t, Store):
        return Store(t.ref, alpha_normalize(t.value, env, counter))
    if isinstance(t, Par):
        return Par(
            alpha_normalize(t.left, env, counter), alpha_normalize(t.right, env, counter)
        )
    raise TypeError(t)


def alpha_eq(a: TermA, b: TermA) -> bool:
    return alpha_normalize(a) == alpha_normalize(b)


def _thread_steps(t: TermA, stores: list[tuple[str, TermA]]):
    """All one-step reducts of a single thread.

    Yields (new_thread, new_store or None).  Evaluation contexts reach into
    either side of an application but never under a λ or into payloads.
    """
    out = []
    if isinstance(t, App):
        if isinstance(t.fun, Lam) and is_value(t.arg):
            out.append((subst(t.fun.body, t.fun.var, t.arg), None))
        for m, s in _thread_steps(t.fun, stores):
            out.append((App(m, t.arg), s))
        for m, s in _thread_steps(t.arg, stores):
            out.append((App(t.fun, m), s))
    elif isinstance(t, Get):
        for r, v in stores:
            if r == t.ref:
                out.append((v, None))
    elif isinstance(t, Set):
        if is_value(t.value):
            out.append((Star(), (t.ref, t.value)))
    elif isinstance(t, Par):
        for m, s in _thread_steps(t.left, stores):
            out.append((Par(m, t.right), s))
        for m, s in _thread_steps(t.right, stores):
            out.append((Par(t.left, m), s))
    return out


def _state_of(p: TermA):
    tree, stores = split_stores(p)
    return tree, stores


def _rebuild(tree: TermA | None, stores) -> TermA:
    t = tree
    for r, v in stores:
        binding = Store(r, v)
        t = binding if t is None else Par(t, binding)
    return t if t is not None else Star()


def _state_key(tree, stores):
    tn = alpha_normalize(tree) if tree is not None else None
    sn = tuple(sorted((r, repr(alpha_normalize(v))) for r, v in stores))
    return (tn, sn)


def step(p: TermA) -> set[TermA]:
    tree, stores = _state_of(p)
    out = {}
    if tree is not None:
        for m, new_store in _thread_steps(tree, stores):
            st = stores + [new_store] if new_store else stores
            out[_state_key(m, st)] = _rebuild(m, st)
    return set(out.values())


def normal_forms(p: TermA, budget: int = 20000):
    """All states with no reduct, as (thread tree, stores) pairs."""
    tree, stores = _state_of(p)
    start = (tree, tuple(stores))
    seen = {_state_key(*start)}
    queue = [start]
    normals = []
    steps = 0
    while queue:
        tr, st = queue.pop(0)
        succs = _thread_steps(tr, list(st)) if tr is not None else []
        if not succs:
            normals.append((tr, st))
            continue
        for m, new_store in succs:
            steps += 1
            if steps > budget:
                raise BudgetExhausted(normals)
            st2 = st + (new_store,) if new_store else st
            key = _state_key(m, st2)
            if key not in seen:
                seen.add(key)
                queue.append((m, st2))
    return normals


def _threads(tree: TermA):
    if isinstance(tree, Par):
        return _threads(tree.left) + _threads(tree.right)
    return [tree]


def values(p: TermA, budget: int = 20000):
    """Multisets of final thread values over all runs; stores are stripped
    and only fully finished (all-value) normal forms count."""
    out = set()
    for tree, _stores in normal_forms(p, budget):
        if tree is None:
            continue
        ths = _threads(tree)
        if all(is_value(t) for t in ths):
            ms = tuple(sorted(repr(alpha_normalize(t)) for t in ths))
            out.add(ms)
    return out


def value_trees(p: TermA, budget: int = 20000):
    """The all-value normal-form thread trees themselves (stores stripped)."""
    out, seen = [], set()
    for tree, _stores in normal_forms(p, budget):
        if tree is None:
            continue
        if all(is_value(t) for t in _threads(tree)):
            key = repr(alpha_normalize(tree))
            if key not in seen:
                seen.add(key)
                out.append(tree)
    return out
