"""Compilation of programs to nets: type translation, interfaces, values."""
import pytest

from routenet.errors import RoutenetError
from routenet.lang import parse_region_ctx, parse_term, parse_type, Behavior
from routenet.proofnet import (
    Cell,
    dual,
    Net,
    ONE,
    Wire,
    bang,
    canonical_equal,
    fmt_formula,
    validate,
    whynot,
)
from routenet.rewrite import normalize
from routenet.translate import (
    compile_program,
    is_value_net,
    ref_wire_type,
    translate,
    translate_type,
    value_certs,
)
from routenet.lang import embed_lthis


def _compile(ctx: str, src: str) -> Net:
    return compile_program(parse_term(src), parse_region_ctx(ctx))


# ---------------------------------------------------------------------------
# type translation


def test_translate_type_unit():
    R = parse_region_ctx("")
    assert fmt_formula(translate_type(parse_type("Unit"), R)) == "!1"


def test_translate_type_pure_arrow():
    R = parse_region_ctx("")
    got = translate_type(parse_type("Unit -> Unit"), R)
    assert fmt_formula(got) == "!(?bot%!1)"


def test_translate_type_effectful_arrow_threads_ref_wires():
    R = parse_region_ctx("r : Unit")
    w = ref_wire_type("r", R)
    assert fmt_formula(w) == "!!1"  # one exponential around the stored Unit
    got = translate_type(parse_type("Unit -{r}> Unit"), R)
    # argument and ref wire enter (dualized), ref wire and result leave
    assert fmt_formula(got) == "!((?bot%??bot)%(!!1*!1))"
    # currying nests on the right
    curried = translate_type(parse_type("Unit -> Unit -> Unit"), R)
    assert fmt_formula(curried) == "!(?bot%!(?bot%!1))"


def test_translate_type_rejects_behavior():
    R = parse_region_ctx("")
    with pytest.raises(RoutenetError):
        translate_type(Behavior(), R)


# ---------------------------------------------------------------------------
# compilation


def boxed_one() -> Net:
    inner = Net([Cell(1, "One", 1)], [Wire(1, 2, ONE)], [(2, "main")])
    return Net([Cell(1, "Box", 1, [], inner)], [Wire(1, 2, bang(ONE))], [(2, "out")])


def test_compile_star_is_boxed_one():
    assert canonical_equal(_compile("", "*"), boxed_one())


def test_compile_validates():
    for ctx, src in [
        ("", r"(\x. x) *"),
        ("r : Unit", "set r * || get r"),
        ("r : Unit", r"(\u. set r u) * || get r"),
    ]:
        assert validate(_compile(ctx, src)) == []


def test_identity_application_normalizes_to_star():
    n = normalize(_compile("", r"(\x. x) *"))
    m = normalize(_compile("", "*"))
    assert n == m
    assert len(n) == 1


def test_interface_labels_of_open_translation():
    R = parse_region_ctx("r : Unit")
    p = parse_term("set r * || get r")
    net = translate(embed_lthis(p, R), R)
    labels = sorted(l for _, l in net.free)
    assert labels == ["out", "ri:r", "ro:r"]
    # the reference wires carry the stored type under one exponential:
    # ro emits the boxed value, ri consumes it
    w = ref_wire_type("r", R)
    assert net.outward(net.free_port("ro:r")) == w
    assert net.outward(net.free_port("ri:r")) == dual(w)
    # a two-thread program's output pairs the branch outputs structurally
    assert fmt_formula(net.outward(net.free_port("out"))) == "(!1%!1)"


def test_closed_program_interface_is_out_only():
    net = _compile("r : Unit", "set r * || get r")
    assert [l for _, l in net.free] == ["out"]


def test_value_recognition():
    R = parse_region_ctx("r : Unit")
    p = parse_term("set r * || get r")
    certs = value_certs(p, R)
    assert len(certs) == 1
    nf = normalize(compile_program(p, R))
    matched = [s for s in nf.summands if is_value_net(s, certs)]
    assert len(matched) == 1
    # the pure unit program's net is NOT a value of the two-thread program
    assert not is_value_net(normalize(_compile("", "*")).summands[0], certs)


def test_starved_get_compiles_to_zero():
    # a lone get can never fire: its net normalizes to the empty sum
    nf = normalize(_compile("r : Unit", "get r"))
    assert nf.is_zero()


def test_race_summands_cover_both_values():
    ctx = "r : Unit -> Unit"
    src = r"get r || r <= (\z. z) || r <= (\z. (\w. w) z)"
    R = parse_region_ctx(ctx)
    p = parse_term(src)
    nf = normalize(compile_program(p, R), budget=100000)
    certs = value_certs(p, R)
    matched = {c for c in certs for s in nf.summands if is_value_net(s, {c})}
    assert matched == certs  # every source outcome appears among the summands
