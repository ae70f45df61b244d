import random

import pytest

import samples
from chainkit import fgmod
from chainkit.complex import (ChainComplex, InvalidComplex, Element, boundaries, cycles, direct_sum, disk,
                              disk_decomposition, homology, homology_all, induced_subcomplex,
                              is_contractible, is_exact, is_free_complex, quotient, shift, size, sphere,
                              validate, zero_complex)
from chainkit.fgmod import FgAbInvariants, ZZ
from chainkit.linalg import IntMatrix
from chainkit.tensorx import example_complex

Z, Z2 = fgmod.free(1), fgmod.cyclic(2)


def test_validate_example_and_zero():
    assert validate(example_complex()).ok
    assert validate(zero_complex()).ok


def test_bad_boundary_is_rejected_with_degree():
    with pytest.raises(InvalidComplex) as err:
        ChainComplex(ZZ, {1: Z, 0: Z, -1: Z2}, {1: IntMatrix([[3]]), 0: IntMatrix([[1]])})
    assert err.value.degree == 1
    X = ChainComplex(ZZ, {1: Z, 0: Z, -1: Z2}, {1: IntMatrix([[3]]), 0: IntMatrix([[1]])}, check=False)
    rep = validate(X)
    assert not rep.ok and rep.problems[0][0] == 1


def test_boundary_must_respect_relations():
    with pytest.raises(InvalidComplex):
        ChainComplex(ZZ, {0: Z2, -1: Z}, {0: IntMatrix([[1]])})


def test_homology_of_example():
    X = example_complex()
    assert all(h.is_zero for h in homology_all(X).values())
    assert is_exact(X)
    assert fgmod.invariants(cycles(X, 0)) == FgAbInvariants(1)
    assert homology(sphere(0, Z2), 0) == FgAbInvariants(0, (2,))


def test_cycles_and_boundaries_of_a_sphere_pair():
    X = ChainComplex(ZZ, {1: Z, 0: Z}, {1: IntMatrix([[4]])})
    assert fgmod.invariants(boundaries(X, 0)) == FgAbInvariants(1)
    assert homology(X, 0) == FgAbInvariants(0, (4,))
    assert homology(X, 1).is_zero


def test_shift_moves_degrees():
    X = shift(example_complex(), 2)
    assert X.degrees == range(1, 4)
    assert is_exact(X)


def test_quotients():
    X = example_complex()
    full = induced_subcomplex(X, {m: IntMatrix.identity(X.gens(m)) for m in X.degrees})
    Q, _ = quotient(X, full)
    assert all(Q.module(m).is_zero() for m in Q.degrees)
    Y = disk(0, Z)
    S = direct_sum(X, Y)
    first = induced_subcomplex(S, {m: IntMatrix.from_columns(
        [[int(r == c) for r in range(S.gens(m))] for c in range(X.gens(m))], S.gens(m)) for m in X.degrees})
    Q, _ = quotient(S, first)
    assert all(fgmod.isomorphic(Q.module(m), Y.module(m)) for m in S.degrees)


def test_quotient_by_the_doubled_degree_one_part():
    # 2Z in degree 1 together with its boundary 4Z in degree 0
    X = example_complex()
    sub = induced_subcomplex(X, {1: IntMatrix([[2]]), 0: IntMatrix([[4]])})
    assert sub.validate().ok
    Q, proj = quotient(X, sub)
    assert validate(Q).ok and proj.commutes()
    # Q = Z/2 --2--> Z/4 --> Z/2: doubling is injective and its image {0, 2}
    # is the kernel of reduction, so Q is exact like X and the subcomplex
    assert [str(fgmod.invariants(Q.module(m))) for m in (1, 0, -1)] == ["Z/2", "Z/4", "Z/2"]
    assert is_exact(sub.complex)
    assert all(h.is_zero for h in homology_all(Q).values())


def test_non_closed_span_is_rejected():
    with pytest.raises(InvalidComplex):
        induced_subcomplex(disk(1, Z), {1: IntMatrix([[1]])})


def test_disk_decomposition():
    X = direct_sum(disk(2, Z), disk(0, Z))
    assert is_free_complex(X)
    assert disk_decomposition(X).disks == ((2, 1), (0, 1))
    assert not is_free_complex(example_complex())
    assert disk_decomposition(zero_complex()).disks == ()


def test_decomposition_certificate_on_twisted_sums():
    rng = random.Random(12)
    for _ in range(15):
        X = samples.twist(samples.random_disk_sum(rng, 12), rng)
        dec = disk_decomposition(X)
        assert dec.iso.commutes()
        assert sum(r for _, r in dec.disks) == len(dec.basis.disks)


def test_contractibility():
    assert is_contractible(disk(3, fgmod.free(2)))
    assert not is_contractible(sphere(0, Z))
    assert not is_contractible(example_complex())   # exact but Z/2 cycles do not split


def test_size_counts_generators():
    assert size(example_complex()) == 3
    assert size(zero_complex()) == 0


def test_elements():
    X = example_complex()
    e = Element.of(X, 0, [1])
    assert e.degree == 0 and e.coords == (1,)
    with pytest.raises(ValueError):
        Element.of(X, 0, [1, 2])
