"""Routing areas: nets of (co)contraction trees realizing a multirelation.

An area for R : I x O -> N has one contraction tree per input (rooted at the
input's free wire), one cocontraction tree per output, and exactly R(i,o)
wires crossing from the tree of i to the tree of o.  All wires carry the
same formula !A oriented from inputs to outputs; a free port is an input
when the !A flows from it into the net, an output when it flows out.

Two semantics are computed — normal-form shape reading and free-to-free
path counting — and agree on routing nets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import multirel
from .errors import CycleRisk, NotAreaShaped, NotNormal, RoutenetError
from .multirel import LabelSet, Multirelation
from .paths import check_acyclic, count_paths_all
from .proofnet import (
    Cell,
    Net,
    ONE,
    Wire,
    bang,
    canonical_equal,
    canonicalize,
    dual,
)
from .rewrite import ALL, find_redexes, normalize

_STRUCTURAL = {"Contraction", "Cocontraction", "Weakening", "Coweakening"}


@dataclass(frozen=True)
class RoutingArea:
    rel: Multirelation
    payload: "Formula" = field(default=bang(ONE))  # the common !A

    def __post_init__(self):
        if self.payload.kind != "bang":
            raise ValueError("payload formula must be an exponential !A")


# ---------------------------------------------------------------------------
# Construction


def build_area(area: RoutingArea) -> Net:
    """Left-comb trees in label order; degenerate arities become a bare
    wire (1) or a (co)weakening (0)."""
    R, A = area.rel, area.payload
    net = Net()
    port = [0]
    cid = [0]

    def newp():
        port[0] += 1
        return port[0]

    def newc():
        cid[0] += 1
        return cid[0]

    # one crossing wire per unit of R(i,o); endpoints dangle until combed
    in_leaves: dict[str, list[int]] = {i: [] for i in R.domain}
    out_leaves: dict[str, list[int]] = {o: [] for o in R.codomain}
    for i in R.domain:
        for o in R.codomain:
            for _ in range(R(i, o)):
                u, v = newp(), newp()
                net.wires.append(Wire(u, v, A))
                in_leaves[i].append(u)
                out_leaves[o].append(v)

    def comb(sym: str, leaves: list[int]) -> int:
        """Build a left comb over the leaf ports; return its root port."""
        acc = leaves[0]
        for leaf in leaves[1:]:
            p = newp()
            net.cells.append(Cell(newc(), sym, p, [acc, leaf]))
            q = newp()
            # wire between this root and its consumer, !A oriented
            if sym == "Contraction":
                net.wires.append(Wire(q, p, A))
            else:
                net.wires.append(Wire(p, q, A))
            acc = q
        return acc

    for i in R.domain:
        leaves = in_leaves[i]
        if not leaves:
            w = newp()
            net.cells.append(Cell(newc(), "Weakening", w))
            pi = newp()
            net.wires.append(Wire(pi, w, A))
            net.free.append((pi, i))
        else:
            net.free.append((comb("Contraction", leaves), i))
    for o in R.codomain:
        leaves = out_leaves[o]
        if not leaves:
            w = newp()
            net.cells.append(Cell(newc(), "Coweakening", w))
            po = newp()
            net.wires.append(Wire(w, po, A))
            net.free.append((po, o))
        else:
            net.free.append((comb("Cocontraction", leaves), o))
    return net


def gamma(payload: "Formula" = bang(ONE)) -> Net:
    """The 3-way communication area: every input reaches every other output."""
    return build_area(RoutingArea(multirel.comm_relation(3), payload))


def delta(payload: "Formula" = bang(ONE)) -> Net:
    """The 4-way area sequencing plug 3 after plugs 1 and 2: the
    communication relation on {1..4} minus (3,1) and (3,2)."""
    r = multirel.comm_relation(4)
    ent = dict(r.entries)
    del ent[("3", "1")]
    del ent[("3", "2")]
    return build_area(RoutingArea(Multirelation(r.domain, r.codomain, ent), payload))


# ---------------------------------------------------------------------------
# Recognition


def is_routing_net(n: Net) -> bool:
    if any(c.sym not in _STRUCTURAL for c in n.cells):
        return False
    payload = None
    for w in n.wires:
        f = w.ty if w.ty.kind == "bang" else dual(w.ty)
        if f.kind != "bang":
            return False
        if payload is None:
            payload = f
        elif f != payload:
            return False
    return check_acyclic(n)


def _free_io(n: Net):
    """Split free ports into inputs (consume !A) and outputs (emit !A)."""
    ins, outs = [], []
    wire_of = n.wire_of()
    for p, lbl in n.free:
        if wire_of[p].toward(p).kind == "bang":
            outs.append((p, lbl))
        else:
            ins.append((p, lbl))
    return ins, outs


def read_area(n: Net) -> RoutingArea:
    """Decompose a normal routing net into its multirelation."""
    if not is_routing_net(n):
        raise NotAreaShaped("not a routing net")
    if find_redexes(n, ALL):
        raise NotNormal("net has residual cuts")
    n = canonicalize(n)
    ins, outs = _free_io(n)
    if len({l for _, l in ins}) != len(ins) or len({l for _, l in outs}) != len(outs):
        raise NotAreaShaped("duplicate free labels within a direction")
    wire_of = n.wire_of()
    owner = n.owner()
    payload = None
    for w in n.wires:
        f = w.ty if w.ty.kind == "bang" else dual(w.ty)
        payload = f
        break

    visited: set[int] = set()
    # map each output-tree entry port (cocontraction aux) to its output label
    entry: dict[int, str] = {}
    out_port_label = {}
    for po, lbl in outs:
        out_port_label[po] = lbl
        x = wire_of[po].other(po)
        if x in {p for p, _ in ins}:
            continue  # floating wire; counted from the input side
        got = owner.get(x)
        if got is None:
            raise NotAreaShaped(f"output {lbl} hangs on an unknown port")
        cell, slot = got
        if cell.sym == "Coweakening" and slot == "p":
            visited.add(cell.id)
            continue
        if cell.sym == "Contraction" and isinstance(slot, int):
            continue  # bare crossing wire; counted from the input side
        if cell.sym != "Cocontraction" or slot != "p":
            raise NotAreaShaped(f"output {lbl} not rooted in a cocontraction")
        stack = [cell]
        while stack:
            c = stack.pop()
            visited.add(c.id)
            for a in c.aux:
                y = wire_of[a].other(a)
                oy = owner.get(y)
                if oy and oy[0].sym == "Cocontraction" and oy[1] == "p":
                    stack.append(oy[0])
                else:
                    entry[a] = lbl

    rel: dict[tuple[str, str], int] = {}

    def leaf(i_lbl: str, y: int):
        if y in entry:
            rel[(i_lbl, entry[y])] = rel.get((i_lbl, entry[y]), 0) + 1
        elif y in out_port_label:
            lbl = out_port_label[y]
            rel[(i_lbl, lbl)] = rel.get((i_lbl, lbl), 0) + 1
        else:
            raise NotAreaShaped(f"input {i_lbl} leaks outside the output trees")

    for pi, lbl in ins:
        x = wire_of[pi].other(pi)
        got = owner.get(x)
        if got is None:
            leaf(lbl, x)
            continue
        cell, slot = got
        if cell.sym == "Weakening" and slot == "p":
            visited.add(cell.id)
            continue
        if cell.sym == "Cocontraction" and slot != "p":
            leaf(lbl, x)
            continue
        if cell.sym != "Contraction" or slot != "p":
            raise NotAreaShaped(f"input {lbl} not rooted in a contraction")
        stack = [cell]
        while stack:
            c = stack.pop()
            visited.add(c.id)
            for a in c.aux:
                y = wire_of[a].other(a)
                oy = owner.get(y)
                if oy and oy[0].sym == "Contraction" and oy[1] == "p":
                    stack.append(oy[0])
                else:
                    leaf(lbl, y)

    if visited != {c.id for c in n.cells}:
        raise NotAreaShaped("stray cells outside the tree-of-trees shape")
    r = Multirelation(
        LabelSet(tuple(l for _, l in ins)), LabelSet(tuple(l for _, l in outs)), rel
    )
    return RoutingArea(r, payload or bang(ONE))


# ---------------------------------------------------------------------------
# Semantics


def semantics(n: Net, budget: int = 10000) -> Multirelation:
    s = normalize(n, budget)
    if len(s) != 1:
        raise NotAreaShaped(f"routing net reduced to {len(s)} summands")
    return read_area(s.summands[0]).rel


def path_semantics(n: Net) -> Multirelation:
    ins, outs = _free_io(n)
    counts = count_paths_all(n, [p for p, _ in ins], [p for p, _ in outs])
    ent = {}
    for pi, i in ins:
        for po, o in outs:
            v = counts[(pi, po)]
            if v:
                ent[(i, o)] = v
    return Multirelation(
        LabelSet(tuple(l for _, l in ins)), LabelSet(tuple(l for _, l in outs)), ent
    )


# ---------------------------------------------------------------------------
# Algebra


def juxtapose(a: Net, b: Net) -> Net:
    """Disjoint union; free labels tagged 'L.'/'R.' like multirel.coproduct."""
    out = a.copy()
    out.free = [(p, "L." + l) for p, l in out.free]
    off = out.max_port()
    cidoff = max((c.id for c in out.cells), default=0)
    for c in b.cells:
        c2 = c.copy()
        c2.id += cidoff
        c2.principal += off
        c2.aux = [p + off for p in c2.aux]
        out.cells.append(c2)
    out.wires.extend(Wire(w.a + off, w.b + off, w.ty) for w in b.wires)
    out.free.extend((p + off, "R." + l) for p, l in b.free)
    return out


def _find_free(n: Net, label: str, want_input: bool) -> int:
    ins, outs = _free_io(n)
    for p, l in ins if want_input else outs:
        if l == label:
            return p
    raise NotAreaShaped(f"no free {'input' if want_input else 'output'} {label!r}")


def trace_net(a: Net, i: str, o: str, budget: int = 10000) -> Net:
    """Wire output o back into input i and normalize."""
    if semantics(a, budget)(i, o) >= 1:
        raise CycleRisk(f"semantics({i},{o}) >= 1")
    n = a.copy()
    pi = _find_free(n, i, True)
    po = _find_free(n, o, False)
    wa = n.wire_of()[pi]
    wb = n.wire_of()[po]
    n.free = [(p, l) for p, l in n.free if p not in (pi, po)]
    n.wires.remove(wa)
    if wb is not wa:
        n.wires.remove(wb)
        # flow leaves the net at o and re-enters at i
        n.wires.append(Wire(wb.other(po), wa.other(pi), wb.toward(po)))
    s = normalize(n, budget)
    if len(s) != 1:
        raise NotAreaShaped(f"trace produced {len(s)} summands")
    return s.summands[0]


def compose_areas(
    a: Net, outs: list[str], b: Net, ins: list[str], budget: int = 10000
) -> Net:
    """Juxtapose and trace each of a's listed outputs onto b's inputs.

    Tags introduced by the juxtaposition are stripped from the result, so a
    full composition exposes a's inputs and b's outputs under their own
    names."""
    if len(outs) != len(ins):
        raise ValueError("output and input pairing lists differ in length")
    n = juxtapose(a, b)
    for o, i in zip(outs, ins):
        n = trace_net(n, "R." + i, "L." + o, budget)
    n = n.copy()
    n.free = [(p, l[2:] if l[:2] in ("L.", "R.") else l) for p, l in n.free]
    return n


# ---------------------------------------------------------------------------
# Transit


def boxed_one() -> Net:
    """The smallest closed box: !1 with content a One cell."""
    inner = Net([Cell(1, "One", 1)], [Wire(1, 2, ONE)], [(2, "c")])
    return Net([Cell(1, "Box", 1, [], inner)], [Wire(1, 2, bang(ONE))], [(2, "out")])


def transit(a: Net, i: str, payload: Net | None = None, budget: int = 10000):
    """Feed one boxed payload into input i and count deliveries per output.

    The payload enters through a fresh cocontraction so the input port stays
    free.  Returns {output label: copies}; the counts equal row i of the
    semantics, and the net left over once the copies are removed is checked
    to be the original area again.
    """
    if payload is None:
        payload = boxed_one()
    n = a.copy()
    pi = _find_free(n, i, True)
    w = n.wire_of()[pi]
    A = w.ty if w.ty.kind == "bang" else dual(w.ty)
    far = w.other(pi)
    base = n.max_port()
    p, a1, a2 = base + 1, base + 2, base + 3
    cidoff = max((c.id for c in n.cells), default=0)
    n.cells.append(Cell(cidoff + 1, "Cocontraction", p, [a1, a2]))
    # input wire now feeds aux 1; the principal takes the old far end
    if w.a == pi:
        n.wires[n.wires.index(w)] = Wire(pi, a1, w.ty)
    else:
        n.wires[n.wires.index(w)] = Wire(a1, pi, w.ty)
    n.wires.append(Wire(p, far, A))
    # merge the payload net, fusing its free port onto aux 2
    off = max(n.max_port(), a2)
    pcidoff = cidoff + 1
    for c in payload.cells:
        c2 = c.copy()
        c2.id += pcidoff
        c2.principal += off
        c2.aux = [q + off for q in c2.aux]
        n.cells.append(c2)
    (pf, _), = payload.free
    for pw in payload.wires:
        x, y = pw.a + off, pw.b + off
        if pw.a == pf:
            x = a2
        if pw.b == pf:
            y = a2
        n.wires.append(Wire(x, y, pw.ty))

    s = normalize(n, budget)
    if len(s) != 1:
        raise NotAreaShaped(f"transit produced {len(s)} summands")
    m = s.summands[0]

    # count payload boxes per output tree
    _, outs = _free_io(m)
    counts = {l: 0 for _, l in outs}
    wire_of = m.wire_of()
    owner = m.owner()
    for c in m.cells:
        if c.sym != "Box":
            continue
        y = wire_of[c.principal].other(c.principal)
        while True:
            oy = owner.get(y)
            if oy is None:
                break
            cell, slot = oy
            if cell.sym != "Cocontraction":
                raise NotAreaShaped("payload copy stranded outside output trees")
            y = wire_of[cell.principal].other(cell.principal)
        lbl = next((l for p, l in outs if p == y), None)
        if lbl is None:
            raise NotAreaShaped("payload copy not delivered to an output")
        counts[lbl] += 1

    # residual check: replacing every copy by a coweakening restores the area
    residual = m.copy()
    for c in residual.cells:
        if c.sym == "Box":
            c.sym = "Coweakening"
            c.inner = None
    if not canonical_equal(canonicalize(residual), canonicalize(a)):
        raise RoutenetError("transit disturbed the area")
    return counts
