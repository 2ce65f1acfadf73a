"""Typed port-graph model for differential MELL proof nets.

A net is a set of ports partitioned into wires, some ports being grouped
into cells.  Wires carry a formula read in the direction src -> dst; the
reversed wire carries the dual formula.  Exponential boxes are cells with a
nested net whose first free wire is the content and whose remaining free
wires correspond to the auxiliary doors.

Equality of nets is taken modulo associativity/commutativity of
(co)contraction trees, neutrality of (co)weakening, and port renaming; it is
decided through an exact canonical form.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import ParseError

# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Formula:
    kind: str  # one | bot | bang | whynot | tensor | par
    left: "Formula | None" = None
    right: "Formula | None" = None

    def __repr__(self):
        return f"Formula({fmt_formula(self)!r})"


ONE = Formula("one")
BOT = Formula("bot")


def bang(a: Formula) -> Formula:
    return Formula("bang", a)


def whynot(a: Formula) -> Formula:
    return Formula("whynot", a)


def tensor(a: Formula, b: Formula) -> Formula:
    return Formula("tensor", a, b)


def par(a: Formula, b: Formula) -> Formula:
    return Formula("par", a, b)


def dual(f: Formula) -> Formula:
    # memoized per instance (frozen dataclasses still have a __dict__)
    d = f.__dict__.get("_dual")
    if d is not None:
        return d
    if f.kind == "one":
        d = BOT
    elif f.kind == "bot":
        d = ONE
    elif f.kind == "bang":
        d = Formula("whynot", dual(f.left))
    elif f.kind == "whynot":
        d = Formula("bang", dual(f.left))
    elif f.kind == "tensor":
        d = Formula("par", dual(f.left), dual(f.right))
    else:
        d = Formula("tensor", dual(f.left), dual(f.right))
    f.__dict__["_dual"] = d
    d.__dict__["_dual"] = f
    return d


def fmt_formula(f: Formula) -> str:
    s = f.__dict__.get("_fmt")
    if s is not None:
        return s
    if f.kind == "one":
        s = "1"
    elif f.kind == "bot":
        s = "bot"
    elif f.kind == "bang":
        s = "!" + fmt_formula(f.left)
    elif f.kind == "whynot":
        s = "?" + fmt_formula(f.left)
    else:
        op = "*" if f.kind == "tensor" else "%"
        s = f"({fmt_formula(f.left)}{op}{fmt_formula(f.right)})"
    f.__dict__["_fmt"] = s
    return s


def parse_formula(text: str) -> Formula:
    pos = 0

    def fail(reason):
        raise ParseError(reason, pos)

    def atom():
        nonlocal pos
        if pos >= len(text):
            fail("unexpected end of formula")
        c = text[pos]
        if c == "1":
            pos += 1
            return ONE
        if text.startswith("bot", pos):
            pos += 3
            return BOT
        if c == "!":
            pos += 1
            return bang(atom())
        if c == "?":
            pos += 1
            return whynot(atom())
        if c == "(":
            pos += 1
            a = atom()
            if pos >= len(text) or text[pos] not in "*%":
                fail("expected '*' or '%'")
            op = text[pos]
            pos += 1
            b = atom()
            if pos >= len(text) or text[pos] != ")":
                fail("expected ')'")
            pos += 1
            return tensor(a, b) if op == "*" else par(a, b)
        fail(f"unexpected character {c!r}")

    f = atom()
    if pos != len(text):
        raise ParseError("trailing characters in formula", pos)
    return f


# ---------------------------------------------------------------------------
# Nets

# Arity of each cell symbol (Box is variable and handled separately).
ARITY = {
    "One": 0,
    "Tensor": 2,
    "Par": 2,
    "Dereliction": 1,
    "Contraction": 2,
    "Weakening": 0,
    "Cocontraction": 2,
    "Coweakening": 0,
}
SYMBOLS = set(ARITY) | {"Box"}


@dataclass
class Cell:
    id: int
    sym: str
    principal: int
    aux: list[int] = field(default_factory=list)
    inner: "Net | None" = None

    def ports(self) -> list[int]:
        return [self.principal] + list(self.aux)

    def copy(self) -> "Cell":
        return Cell(
            self.id,
            self.sym,
            self.principal,
            list(self.aux),
            self.inner.copy() if self.inner is not None else None,
        )


@dataclass
class Wire:
    a: int
    b: int
    ty: Formula  # read a -> b

    def other(self, port: int) -> int:
        return self.b if port == self.a else self.a

    def toward(self, port: int) -> Formula:
        """Formula read in the direction of `port`."""
        return self.ty if port == self.b else dual(self.ty)


@dataclass
class Net:
    cells: list[Cell] = field(default_factory=list)
    wires: list[Wire] = field(default_factory=list)
    free: list[tuple[int, str]] = field(default_factory=list)

    # -- basic queries ------------------------------------------------------

    def copy(self) -> "Net":
        return Net(
            [c.copy() for c in self.cells],
            [Wire(w.a, w.b, w.ty) for w in self.wires],
            list(self.free),
        )

    def wire_of(self) -> dict[int, Wire]:
        m: dict[int, Wire] = {}
        for w in self.wires:
            m[w.a] = w
            m[w.b] = w
        return m

    def owner(self) -> dict[int, tuple[Cell, object]]:
        """Map port -> (cell, slot) with slot 'p' or aux index."""
        m: dict[int, tuple[Cell, object]] = {}
        for c in self.cells:
            m[c.principal] = (c, "p")
            for i, p in enumerate(c.aux):
                m[p] = (c, i)
        return m

    def max_port(self) -> int:
        mx = 0
        for w in self.wires:
            mx = max(mx, w.a, w.b)
        return mx

    def cell_by_id(self, cid: int) -> Cell:
        for c in self.cells:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def free_port(self, label: str) -> int:
        for p, l in self.free:
            if l == label:
                return p
        raise KeyError(label)

    def outward(self, port: int) -> Formula:
        """Formula carried out of the net through a free port."""
        return self.wire_of()[port].toward(port)


def free_wire(label_a: str, label_b: str, ty: Formula) -> Net:
    """A single floating wire; the formula reads label_a -> label_b."""
    return Net([], [Wire(1, 2, ty)], [(1, label_a), (2, label_b)])


# ---------------------------------------------------------------------------
# Validation


def validate(net: Net) -> list[str]:
    """Return the list of well-formedness violations (empty if valid)."""
    out: list[str] = []
    _validate(net, out, "")
    return out


def _validate(net: Net, out: list[str], where: str):
    seen: dict[int, int] = {}
    for w in net.wires:
        if w.a == w.b:
            out.append(f"{where}SelfWire: wire on single port {w.a}")
        for p in (w.a, w.b):
            seen[p] = seen.get(p, 0) + 1
    for p, n in seen.items():
        if n > 1:
            out.append(f"{where}PortReuse: port {p} on {n} wires")

    slot_of: dict[int, str] = {}
    ids = set()
    for c in net.cells:
        if c.id in ids:
            out.append(f"{where}DupCellId: {c.id}")
        ids.add(c.id)
        if c.sym not in SYMBOLS:
            out.append(f"{where}BadSymbol: cell {c.id} {c.sym}")
            continue
        if c.sym != "Box" and len(c.aux) != ARITY[c.sym]:
            out.append(f"{where}BadArity: cell {c.id} {c.sym} arity {len(c.aux)}")
        ps = c.ports()
        if len(set(ps)) != len(ps):
            out.append(f"{where}DupPort: cell {c.id}")
        for p in ps:
            if p in slot_of:
                out.append(f"{where}SharedPort: port {p}")
            slot_of[p] = c.sym
            if p not in seen:
                out.append(f"{where}Unwired: port {p} of cell {c.id}")
    for p, lbl in net.free:
        if p in slot_of:
            out.append(f"{where}FreeInCell: port {p} ({lbl})")
        if p not in seen:
            out.append(f"{where}Unwired: free port {p} ({lbl})")
    free_ports = {p for p, _ in net.free}
    if len(free_ports) != len(net.free):
        out.append(f"{where}DupFreePort")
    for p in seen:
        if p not in slot_of and p not in free_ports:
            out.append(f"{where}Dangling: port {p} neither in a cell nor free")

    wire_of = net.wire_of()

    def toward(p):
        return wire_of[p].toward(p)

    def away(p):
        return dual(wire_of[p].toward(p))

    for c in net.cells:
        if any(p not in seen for p in c.ports()):
            continue
        tag = f"{where}TypeMismatch: cell {c.id} {c.sym}"
        if c.sym == "One":
            if away(c.principal).kind != "one":
                out.append(tag)
        elif c.sym in ("Tensor", "Par"):
            want = "tensor" if c.sym == "Tensor" else "par"
            f = away(c.principal)
            if f.kind != want or f.left != toward(c.aux[0]) or f.right != toward(c.aux[1]):
                out.append(tag)
        elif c.sym == "Dereliction":
            # the aux emits A; the principal concludes ?(dual A), the cut
            # partner of !A
            if away(c.principal) != whynot(toward(c.aux[0])):
                out.append(tag)
        elif c.sym == "Contraction":
            f = away(c.principal)
            if f.kind != "whynot" or toward(c.aux[0]) != f or toward(c.aux[1]) != f:
                out.append(tag)
        elif c.sym == "Weakening":
            if away(c.principal).kind != "whynot":
                out.append(tag)
        elif c.sym == "Cocontraction":
            f = away(c.principal)
            if f.kind != "bang" or toward(c.aux[0]) != f or toward(c.aux[1]) != f:
                out.append(tag)
        elif c.sym == "Coweakening":
            if away(c.principal).kind != "bang":
                out.append(tag)
        elif c.sym == "Box":
            inner = c.inner
            if inner is None:
                out.append(f"{where}BoxNoInner: cell {c.id}")
                continue
            if len(inner.free) != len(c.aux) + 1 or not inner.free:
                out.append(f"{where}BoxDoorCount: cell {c.id}")
                continue
            iw = inner.wire_of()
            fp = {p for p, _ in inner.free}
            for w in inner.wires:
                # the content wire may run straight to a door (boxed axiom),
                # but a fully disconnected floating wire is malformed
                if w.a in fp and w.b in fp and inner.free[0][0] not in (w.a, w.b):
                    out.append(f"{where}BoxFloatingWire: cell {c.id}")
            bad = False
            for p, _ in inner.free:
                if p not in iw:
                    bad = True
            if bad:
                out.append(f"{where}BoxDoorUnwired: cell {c.id}")
            else:
                content = iw[inner.free[0][0]].toward(inner.free[0][0])
                if away(c.principal) != bang(content):
                    out.append(tag)
                for i, (p, _) in enumerate(inner.free[1:]):
                    door = dual(iw[p].toward(p))
                    if door.kind != "bang" or toward(c.aux[i]) != door:
                        out.append(tag + f" door {i}")
            _validate(inner, out, where + f"box{c.id}/")
    return out


# ---------------------------------------------------------------------------
# Canonical form
#
# Strategy: recursively canonicalize box contents, flatten maximal
# (co)contraction trees into n-ary unordered nodes, absorb neutral
# (co)weakening leaves, then compute an exact canonical labelling of the
# resulting multigraph by colour refinement with individualisation.  The
# canonical certificate decides equality; a concrete representative is
# rebuilt with left combs and dense port numbering.


class _FlatNode:
    __slots__ = ("key", "sym", "inner")

    def __init__(self, key, sym, inner=None):
        self.key = key  # hashable initial colour
        self.sym = sym
        self.inner = inner  # canonical inner Net for boxes


class _FlatEdge:
    """Endpoint slots: 'p', ('a', i) for ordered aux, 'a' unordered, 'f'."""

    __slots__ = ("n0", "s0", "n1", "s1", "ty")

    def __init__(self, n0, s0, n1, s1, ty):
        self.n0, self.s0, self.n1, self.s1, self.ty = n0, s0, n1, s1, ty

    def end(self, i):
        return (self.n0, self.s0, self.ty) if i == 0 else (self.n1, self.s1, dual(self.ty))


_NARY = {"Contraction": "NContr", "Cocontraction": "NCocontr"}
_NEUTRAL = {"NContr": "Weakening", "NCocontr": "Coweakening"}


def _flatten(net: Net):
    """Return (nodes: dict id -> _FlatNode, edges: list[_FlatEdge])."""
    nodes: dict[int, _FlatNode] = {}
    nid = 0

    port_node: dict[int, tuple[int, object]] = {}
    # keyed by label only: the interface is a labelled set, not a sequence
    for p, lbl in net.free:
        nodes[nid] = _FlatNode(("free", lbl), "free")
        port_node[p] = (nid, "f")
        nid += 1
    for c in net.cells:
        if c.sym == "Box":
            inner, cert = canonicalize_with_cert(c.inner)
            node = _FlatNode(("cell", "Box", cert), "Box", inner)
        elif c.sym in _NARY:
            node = _FlatNode(("cell", _NARY[c.sym]), _NARY[c.sym])
        else:
            node = _FlatNode(("cell", c.sym), c.sym)
        nodes[nid] = node
        port_node[c.principal] = (nid, "p")
        for i, p in enumerate(c.aux):
            port_node[p] = (nid, "a" if node.sym in _NEUTRAL else ("a", i))
        nid += 1

    edges: list[_FlatEdge] = []
    for w in net.wires:
        (na, sa) = port_node[w.a]
        (nb, sb) = port_node[w.b]
        edges.append(_FlatEdge(na, sa, nb, sb, w.ty))

    def step() -> bool:
        # Associativity: an edge from the principal of u into an aux slot of
        # v, both the same n-ary kind, fuses u into v.
        for e in edges:
            for nu, su, nv, sv in (
                (e.n0, e.s0, e.n1, e.s1),
                (e.n1, e.s1, e.n0, e.s0),
            ):
                if (
                    su == "p"
                    and sv == "a"
                    and nu != nv
                    and nodes[nv].sym in _NEUTRAL
                    and nodes[nu].sym == nodes[nv].sym
                ):
                    edges.remove(e)
                    for e2 in edges:
                        if e2.n0 == nu:
                            e2.n0 = nv
                        if e2.n1 == nu:
                            e2.n1 = nv
                    del nodes[nu]
                    return True
        # Neutrality: a (co)weakening on an aux slot of the matching n-ary
        # node disappears together with its edge.
        for e in edges:
            for nu, su, nv, sv in (
                (e.n0, e.s0, e.n1, e.s1),
                (e.n1, e.s1, e.n0, e.s0),
            ):
                if (
                    su == "p"
                    and sv == "a"
                    and nodes[nv].sym in _NEUTRAL
                    and nodes[nu].sym == _NEUTRAL[nodes[nv].sym]
                ):
                    edges.remove(e)
                    del nodes[nu]
                    return True
        # Degenerate n-ary nodes: arity 0 becomes the neutral cell, arity 1
        # dissolves by splicing its principal edge with its only aux edge.
        for n, node in list(nodes.items()):
            if node.sym not in _NEUTRAL:
                continue
            aux_edges = [
                (e, i)
                for e in edges
                for i, (en, es) in (((0, (e.n0, e.s0)), (1, (e.n1, e.s1))))
                if en == n and es == "a"
            ]
            if len(aux_edges) == 0:
                node.sym = _NEUTRAL[node.sym]
                node.key = ("cell", node.sym)
                return True
            if len(aux_edges) == 1:
                (ea, ia) = aux_edges[0]
                (ep, ip) = next(
                    (e, i)
                    for e in edges
                    for i, (en, es) in (((0, (e.n0, e.s0)), (1, (e.n1, e.s1))))
                    if en == n and es == "p"
                )
                if ep is ea:
                    continue  # principal looped onto own aux; leave as is
                (xn, xs, xty) = ep.end(1 - ip)  # xty reads x -> principal
                (yn, ys, _) = ea.end(1 - ia)
                # the new edge y -> x carries what flowed out of the principal
                edges.remove(ep)
                edges.remove(ea)
                edges.append(_FlatEdge(yn, ys, xn, xs, dual(xty)))
                del nodes[n]
                return True
        return False

    while step():
        pass
    return nodes, edges


def _refine(nodes, edges, colors):
    """Iterated colour refinement; returns stable colors (dense ranks)."""
    adj: dict[int, list] = {n: [] for n in nodes}
    for e in edges:
        for i in (0, 1):
            (nu, su, tyu) = e.end(i)
            (nv, sv, _) = e.end(1 - i)
            adj[nu].append((repr(su), repr(sv), fmt_formula(tyu), nv, e))
            # tyu reads nu -> nv
    while True:
        sigs = {}
        for n in nodes:
            nb = sorted((s0, s1, ty, colors[v]) for (s0, s1, ty, v, _) in adj[n])
            sigs[n] = (colors[n], tuple(nb))
        ranking = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
        new = {n: ranking[sigs[n]] for n in nodes}
        if new == colors:
            return colors
        colors = new


def _canonical_labelling(nodes, edges):
    """Exact canonical labelling; returns (certificate, node -> position)."""

    init = {n: nodes[n].key for n in nodes}
    base_rank = {k: i for i, k in enumerate(sorted(set(init.values()), key=repr))}
    colors = _refine(nodes, edges, {n: base_rank[init[n]] for n in nodes})

    def finish(colors):
        classes: dict[int, list[int]] = {}
        for n, c in colors.items():
            classes.setdefault(c, []).append(n)
        target = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                target = classes[c]
                break
        if target is None:
            return _certificate(nodes, edges, colors)
        best = None
        mx = max(colors.values())
        for pick in target:
            c2 = dict(colors)
            c2[pick] = mx + 1
            cert, pos = finish(_refine(nodes, edges, c2))
            if best is None or cert < best[0]:
                best = (cert, pos)
        return best

    return finish(colors)


def _certificate(nodes, edges, order):
    pos = {n: i for i, n in enumerate(sorted(nodes, key=lambda n: order[n]))}
    node_part = tuple(
        nodes[n].key for n in sorted(nodes, key=lambda n: pos[n])
    )
    edge_part = []
    for e in edges:
        i, j = pos[e.n0], pos[e.n1]
        if (i, repr(e.s0)) <= (j, repr(e.s1)):
            edge_part.append((i, j, repr(e.s0), repr(e.s1), fmt_formula(e.ty)))
        else:
            edge_part.append((j, i, repr(e.s1), repr(e.s0), fmt_formula(dual(e.ty))))
    return (node_part, tuple(sorted(edge_part))), pos


def _rebuild(net: Net, nodes, edges, pos) -> Net:
    """Build the concrete canonical representative."""
    counter = [0]

    def newp():
        counter[0] += 1
        return counter[0]

    # Deterministic edge order; orientation normalized to the sort key so
    # the rebuilt net is a function of the canonical data alone.
    def ecanon(e):
        i, j = pos[e.n0], pos[e.n1]
        if (i, repr(e.s0)) <= (j, repr(e.s1)):
            return _FlatEdge(e.n0, e.s0, e.n1, e.s1, e.ty)
        return _FlatEdge(e.n1, e.s1, e.n0, e.s0, dual(e.ty))

    def ekey(e):
        return (pos[e.n0], pos[e.n1], repr(e.s0), repr(e.s1), fmt_formula(e.ty))

    sedges = sorted((ecanon(e) for e in edges), key=ekey)
    # Allocate a port per edge endpoint; orient each wire canonically.
    wires = []
    endpoint_port = {}  # (edge index, end) -> port
    for k, e in enumerate(sedges):
        pa, pb = newp(), newp()
        endpoint_port[(k, 0)] = pa
        endpoint_port[(k, 1)] = pb
        ta, tb = fmt_formula(e.ty), fmt_formula(dual(e.ty))
        if ta <= tb:
            wires.append(Wire(pa, pb, e.ty))
        else:
            wires.append(Wire(pb, pa, dual(e.ty)))

    # Slots per node.
    slots: dict[int, dict] = {n: {"a": []} for n in nodes}
    for k, e in enumerate(sedges):
        for i, (n, s, _) in enumerate([e.end(0), e.end(1)]):
            p = endpoint_port[(k, i)]
            if s == "a":
                slots[n]["a"].append((pos[e.end(1 - i)[0]], k, p))
            else:
                slots[n][s] = p

    cells = []
    cid = [0]

    def newc():
        cid[0] += 1
        return cid[0]

    wire_of = {}
    for w in wires:
        wire_of[w.a] = w
        wire_of[w.b] = w

    for n in sorted(nodes, key=lambda n: pos[n]):
        node = nodes[n]
        if node.sym == "free":
            continue
        if node.sym in _NEUTRAL:  # n-ary node, arity >= 2 by flattening
            sym = "Contraction" if node.sym == "NContr" else "Cocontraction"
            leaves = [p for (_, _, p) in sorted(slots[n]["a"])]
            root = slots[n]["p"]
            ty = dual(wire_of[root].toward(root))  # principal type away
            # left comb: combine first two leaves, then fold the rest
            acc = None
            for leaf in leaves:
                if acc is None:
                    acc = leaf
                    continue
                pr = newp()
                cells.append(Cell(newc(), sym, pr, [acc, leaf]))
                mid = newp()
                wires.append(
                    Wire(pr, mid, ty) if sym == "Cocontraction" else Wire(mid, pr, dual(ty))
                )
                acc = mid
            # fuse acc with root: both are dangling ports of existing wires
            wa = next(w for w in wires if acc in (w.a, w.b))
            wb = next(w for w in wires if root in (w.a, w.b))
            wires.remove(wa)
            wires.remove(wb)
            fa, fb = wa.other(acc), wb.other(root)
            # the merged wire read fa -> fb carries what flowed fa -> acc
            wires.append(Wire(fa, fb, wa.toward(acc)))
            wire_of = {}
            for w in wires:
                wire_of[w.a] = w
                wire_of[w.b] = w
        elif node.sym == "Box":
            ordered = [(s, p) for s, p in slots[n].items() if isinstance(s, tuple)]
            aux = [p for (s, p) in sorted(ordered, key=lambda kv: kv[0][1])]
            cells.append(Cell(newc(), "Box", slots[n]["p"], aux, node.inner.copy()))
        else:
            ordered = [(s, p) for s, p in slots[n].items() if isinstance(s, tuple)]
            aux = [p for (s, p) in sorted(ordered, key=lambda kv: kv[0][1])]
            cells.append(Cell(newc(), node.sym, slots[n]["p"], aux))

    free = []
    for n in sorted(nodes, key=lambda n: pos[n]):
        if nodes[n].sym == "free":
            (_, lbl) = nodes[n].key
            free.append((lbl, slots[n]["f"]))
    free.sort()
    out = Net(cells, wires, [(p, lbl) for (lbl, p) in free])

    # normalize wire orientation once more (comb fusions may have flipped)
    for i, w in enumerate(out.wires):
        if fmt_formula(w.ty) > fmt_formula(dual(w.ty)):
            out.wires[i] = Wire(w.b, w.a, dual(w.ty))
    out.wires.sort(key=lambda w: (w.a, w.b))
    return out


def canonicalize_with_cert(net: Net):
    nodes, edges = _flatten(net)
    cert, pos = _canonical_labelling(nodes, edges)
    rebuilt = _rebuild(net, nodes, edges, pos)
    return rebuilt, cert


def canonicalize(net: Net) -> Net:
    return canonicalize_with_cert(net)[0]


def certificate(net: Net):
    return canonicalize_with_cert(net)[1]


# ---------------------------------------------------------------------------
# Sums of nets


class NetSum:
    """An idempotent formal sum of nets; the empty sum is the zero net."""

    def __init__(self, nets=()):
        self._by_cert: dict = {}
        for n in nets:
            self.add(n)

    def add(self, net: Net):
        canon, cert = canonicalize_with_cert(net)
        if cert not in self._by_cert:
            self._by_cert[cert] = canon

    def union(self, other: "NetSum") -> "NetSum":
        s = NetSum()
        s._by_cert.update(self._by_cert)
        s._by_cert.update(other._by_cert)
        return s

    @property
    def summands(self) -> list[Net]:
        return list(self._by_cert.values())

    def certs(self):
        return frozenset(self._by_cert)

    def is_zero(self) -> bool:
        return not self._by_cert

    def __len__(self):
        return len(self._by_cert)

    def __iter__(self):
        return iter(self._by_cert.values())

    def __eq__(self, other):
        if not isinstance(other, NetSum):
            return NotImplemented
        return self.certs() == other.certs()

    def __hash__(self):
        return hash(self.certs())


def canonical_equal(a, b) -> bool:
    """Equality of nets or sums modulo the structural equivalence."""
    if isinstance(a, Net):
        a = NetSum([a])
    if isinstance(b, Net):
        b = NetSum([b])
    return a.certs() == b.certs()


# ---------------------------------------------------------------------------
# Serialization


def _net_to_obj(net: Net) -> dict:
    return {
        "free": [{"port": p, "label": l} for p, l in net.free],
        "cells": [
            {
                "id": c.id,
                "sym": c.sym,
                "pal": c.principal,
                "aux": list(c.aux),
                **({"box": _net_to_obj(c.inner)} if c.inner is not None else {}),
            }
            for c in net.cells
        ],
        "wires": [
            {"a": w.a, "b": w.b, "ty": fmt_formula(w.ty), "dir": "ab"} for w in net.wires
        ],
    }


def serialize(s) -> bytes:
    """Serialize a Net, a NetSum, or a plain list of Nets to JSON bytes."""
    if isinstance(s, Net):
        s = [s]
    obj = {"sum": [_net_to_obj(n) for n in s]}
    return json.dumps(obj, separators=(",", ":"), sort_keys=True).encode()


def _net_from_obj(obj, where="") -> Net:
    try:
        free = [(f["port"], f["label"]) for f in obj["free"]]
        cells = []
        for c in obj["cells"]:
            inner = _net_from_obj(c["box"], where + "box/") if "box" in c else None
            cells.append(Cell(c["id"], c["sym"], c["pal"], list(c["aux"]), inner))
        wires = []
        for w in obj["wires"]:
            ty = parse_formula(w["ty"])
            if w.get("dir", "ab") == "ab":
                wires.append(Wire(w["a"], w["b"], ty))
            else:
                wires.append(Wire(w["b"], w["a"], ty))
        return Net(cells, wires, free)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{where}bad net object: {exc}") from exc


def parse(data: bytes):
    """Parse a serialized sum of nets.  Returns a list of Nets (kept as
    written, without canonicalization) wrapped so iteration works."""
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from exc
    if not isinstance(obj, dict) or "sum" not in obj or not isinstance(obj["sum"], list):
        raise ParseError("expected top-level object with 'sum' list")
    return [_net_from_obj(o) for o in obj["sum"]]


# ---------------------------------------------------------------------------
# Graphviz export

_DOT_LABEL = {
    "One": "1",
    "Tensor": "*",
    "Par": "%",
    "Dereliction": "?d",
    "Contraction": "?c",
    "Weakening": "?w",
    "Cocontraction": "!c",
    "Coweakening": "!w",
}


def to_dot(net: Net) -> str:
    lines = ["digraph net {", "  node [shape=circle];"]
    _dot_net(net, lines, "n", "  ")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_net(net: Net, lines, prefix, indent):
    port_home = {}
    for c in net.cells:
        name = f"{prefix}c{c.id}"
        if c.sym == "Box":
            lines.append(f"{indent}subgraph cluster_{name} {{")
            lines.append(f'{indent}  label="!";')
            _dot_net(c.inner, lines, name + "_", indent + "  ")
            lines.append(f'{indent}  {name} [label="!p" shape=box];')
            lines.append(f"{indent}}}")
        else:
            lines.append(f'{indent}{name} [label="{_DOT_LABEL[c.sym]}"];')
        for p in c.ports():
            port_home[p] = name
    for p, lbl in net.free:
        name = f"{prefix}f{p}"
        lines.append(f'{indent}{name} [label="{lbl}" shape=plaintext];')
        port_home[p] = name
    for w in net.wires:
        a = port_home.get(w.a, f"{prefix}p{w.a}")
        b = port_home.get(w.b, f"{prefix}p{w.b}")
        lines.append(f'{indent}{a} -> {b} [label="{fmt_formula(w.ty)}"];')
