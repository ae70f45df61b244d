import pytest

from chainkit import fgmod
from chainkit.complex import disk, homology_all, is_exact, sphere, zero_complex
from chainkit.fgmod import FgAbInvariants
from chainkit.tensorx import bar_tensor, counterexample_report, example_complex, tensor

Z, Z2 = fgmod.free(1), fgmod.cyclic(2)
Z2_INV = FgAbInvariants(0, (2,))


def groups(C):
    return {m: fgmod.invariants(C.module(m)) for m in C.degrees if not C.module(m).is_zero()}


def boundary_vanishes(C, m):
    M = C.module(m - 1)
    return all(M.is_zero_element(c) for c in C.d(m).columns())


def test_tensor_counterexample_components():
    T = tensor(sphere(0, Z2), example_complex())
    C = T.result
    assert groups(C) == {1: Z2_INV, 0: Z2_INV, -1: Z2_INV}
    assert boundary_vanishes(C, 1)
    assert homology_all(C)[1] == Z2_INV
    assert not is_exact(C)
    assert T.block(0, 0).size == 1


def test_unit_for_tensor():
    X = example_complex()
    C = tensor(X, sphere(0, Z)).result
    assert list(C.degrees) == list(X.degrees)
    for m in X.degrees:
        assert fgmod.isomorphic(C.module(m), X.module(m))
        if m - 1 in X.degrees:
            assert C.d(m) == X.d(m)


def test_disk_times_disk():
    C = tensor(disk(1, Z), disk(1, Z)).result
    assert groups(C) == {2: FgAbInvariants(1), 1: FgAbInvariants(2), 0: FgAbInvariants(1)}
    assert is_exact(C)


def test_koszul_sign_makes_a_complex():
    X = example_complex()
    tensor(X, X)                     # validated on construction
    # a disk is contractible, so tensoring with it stays contractible
    C = tensor(disk(1, Z), X).result
    assert all(h.is_zero for h in homology_all(C).values())


def test_bar_tensor_counterexample():
    C = bar_tensor(sphere(0, Z2), example_complex())
    assert groups(C) == {1: Z2_INV, 0: Z2_INV}
    assert all(boundary_vanishes(C, m) for m in C.degrees if m - 1 in C.degrees)
    assert not is_exact(C)


def test_bar_tensor_with_zero():
    C = bar_tensor(zero_complex(), example_complex())
    assert all(C.module(m).is_zero() for m in C.degrees)


def test_bar_tensor_of_disk_and_unit():
    # D^1(Z) (x) S^0(Z) = D^1(Z); dividing by boundaries kills all of degree 0
    # (the image of the identity) and nothing in degree 1, leaving S^1(Z)
    C = bar_tensor(disk(1, Z), sphere(0, Z))
    assert groups(C) == {1: FgAbInvariants(1)}


def test_counterexample_report():
    rep = counterexample_report(1)
    assert rep.fails
    text = rep.text()
    assert text.splitlines()[-1] == "pushout-product axiom: FAILS for ⊗ and ⊗̄"
    assert rep.trivial_cofibration_checks["X exact with cycles of pd <= 1"] is True
    assert rep.cofibration_checks["mono"] is True
    for p in rep.products:
        assert p.homology[1] == Z2_INV and not p.exact
    assert all(ok for _, ok in rep.controls)


def test_counterexample_needs_positive_n():
    with pytest.raises(ValueError):
        counterexample_report(0)
