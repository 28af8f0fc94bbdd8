"""Smoke test for the gausspi_py extension. Run after `pip install -e crates/gausspi-py`."""

from fractions import Fraction

import gausspi_py as gp

TREFOIL = "gd 1\ngroup trivial\ndegree 3\narrows 0->3:+ 4->1:+ 2->5:+\nedges e e e e e e\n"


def groups():
    z2 = gp.Group("Z/2 w -1")
    assert z2.is_abelian() and z2.is_finite()
    assert z2.weight("x1") == -1
    assert z2.mul("1", "1") == z2.identity()
    f2 = gp.Group("free 2")
    assert not f2.is_abelian()
    assert f2.mul("x1", f2.inv("x1")) == f2.identity()
    try:
        gp.Group("Q")
    except ValueError:
        pass
    else:
        raise AssertionError("bad spec accepted")


def diagrams():
    t = gp.Diagram.parse(TREFOIL)
    assert t.degree == 3 and t.aut_order() == 3
    assert gp.Diagram.parse(t.to_text()) == t
    assert gp.Diagram(t.group, t.code()) == t
    assert t.energy("comb 1 0") == 1
    assert t.torsion("comb 1") == -1
    assert t.decompose("comb 2 1 0 -1") == ([1, 0, -1], 2)
    assert len(t.sub([0]).arrows()) == 1

    moves = t.moves(ball=0)
    assert any(m.startswith("R1+") for m in moves)
    for m in moves:
        t.apply(m)
    r1 = "R1+ @edge=0 writhe=- dir=th"
    one = t.apply(r1)
    assert one.degree == 4
    m2 = one.moves(ball=0, kinds=["R2+"])[0]
    assert t.replay([r1, m2]) == one.apply(m2)
    try:
        t.replay(["R2- @arrows=0,1"])
    except gp.DomainError as e:
        assert "move 1" in str(e)
    else:
        raise AssertionError("bad move accepted")

    z = gp.Group("Z")
    g = gp.Diagram(z, "degree 2 arrows 0->2:+ 1->3:+ edges 1 0 0 0")
    v_l, v_r = g.whitney()
    assert isinstance(v_l, int) and isinstance(v_r, int)
    assert "global 5" in gp.Diagram(z, "degree 1 arrows 0->1:+ edges 2 3").abelianize()


def series():
    z2 = gp.Group("Z/2 w -1")
    x = gp.Series(z2, [(1, "degree 1 arrows 0->1 edges x1 x1"), ("-1/2", "degree 0 class e")])
    assert len(x) == 2
    assert x.pair(x) == Fraction(5, 4)
    assert x.i_map().i_inv() == x
    assert gp.Series.parse(x.to_text()) == x
    assert Fraction(-1, 2) in [c for c, _ in x.terms()]

    good = gp.Series(z2, [(1, "degree 1 arrows 0->1 edges x1 x1")])
    cert = good.check_invariance(ball=1, seed=3)
    assert cert["verdict"] == "PASS", cert
    bad = gp.Series(z2, [(1, "degree 1 arrows 0->1 edges 0 x1"), (1, "degree 1 arrows 0->1 edges x1 0")])
    cert = bad.check_invariance(ball=1)
    assert cert["verdict"] == "FAIL" and cert["ap1"] == "fail", cert

    rels = gp.relations("AP1", gp.Group("Z/2"), 1, ball=1)
    assert len(rels) == 3
    r = gp.Series(gp.Group("Z/2"), [(1, "degree 1 arrows 0->1 edges 0 1")])
    assert r.in_span("AP1")
    assert not gp.Series(gp.Group("Z/2"), [(1, "degree 1 arrows 0->1 edges 1 1")]).in_span("AP1")

    c = gp.Series(gp.Group("Z"), [(1, "degree 0 class 1")])
    g = gp.Diagram(gp.Group("Z"), "degree 2 arrows 0->2:+ 1->3:+ edges 1 0 0 0")
    assert c.evaluate(g) == 1


def selftest():
    report = gp.selftest(only=[1, 2])
    assert [r[0] for r in report] == [1, 2]
    assert all(ok for _, _, ok, _ in report), report


if __name__ == "__main__":
    for check in (groups, diagrams, series, selftest):
        check()
        print(f"ok {check.__name__}")
