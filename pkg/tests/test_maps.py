import random

import pytest

import samples
from chainkit import fgmod
from chainkit.complex import ChainComplex, direct_sum, disk, homology_all, is_exact, sphere, zero_complex
from chainkit.fgmod import FgAbInvariants, ZZ
from chainkit.linalg import IntMatrix
from chainkit.maps import (ChainMap, InvalidChainMap, are_homotopic, cokernel_complex, compose, cone,
                           cone_inclusion, identity, image_complex, is_epi, is_iso, is_mono,
                           is_nullhomotopic, is_quasi_iso, kernel_complex, mapping_cylinder, zero_map)
from chainkit.resolve import projective_cover_complex
from chainkit.tensorx import example_complex

Z, Z2 = fgmod.free(1), fgmod.cyclic(2)


def scalar(X, k):
    return ChainMap(X, X, {m: IntMatrix.identity(X.gens(m)).scale(k) for m in X.degrees})


def invariants_by_degree(X):
    return {m: fgmod.invariants(X.module(m)) for m in X.degrees if not X.module(m).is_zero()}


def test_kernel_image_cokernel_of_doubling_a_disk():
    D = disk(1, Z)
    f = scalar(D, 2)
    C, proj = cokernel_complex(f)
    assert invariants_by_degree(C) == {1: FgAbInvariants(0, (2,)), 0: FgAbInvariants(0, (2,))}
    assert is_exact(C) and proj.commutes()
    assert all(M.is_zero() for M in (kernel_complex(f).module(m) for m in D.degrees))
    assert invariants_by_degree(image_complex(f)) == invariants_by_degree(D)


def test_kernel_of_zero_map_is_source():
    X = example_complex()
    K = kernel_complex(zero_map(X, disk(0, Z)))
    assert all(fgmod.isomorphic(K.module(m), X.module(m)) for m in X.degrees)


def test_kernel_of_map_onto_bottom_disk():
    # reduction mod 2 in degree 0 and the identity in degree -1; the kernel
    # is Z --2--> 2Z in degrees 1 and 0
    X = example_complex()
    T = disk(0, Z2)
    f = ChainMap(X, T, {0: IntMatrix([[1]]), -1: IntMatrix([[1]])})
    K = kernel_complex(f)
    assert invariants_by_degree(K) == {1: FgAbInvariants(1), 0: FgAbInvariants(1)}
    assert is_exact(K)


def test_invalid_chain_map():
    X = example_complex()
    with pytest.raises(InvalidChainMap):
        ChainMap(X, sphere(-1, Z2), {-1: IntMatrix([[1]])})


def test_nullhomotopies():
    h = is_nullhomotopic(identity(disk(1, Z)))
    assert h is not None and h.verify()
    assert h.at(0) == IntMatrix([[1]])
    assert is_nullhomotopic(identity(sphere(0, Z))) is None


def test_maps_out_of_disk_sums_are_nullhomotopic():
    rng = random.Random(6)
    for _ in range(15):
        Y = samples.random_complex(rng)
        P, eps, _ = projective_cover_complex(Y)
        s = is_nullhomotopic(eps)
        assert s is not None and s.verify()


def test_homotopic_maps():
    rng = random.Random(7)
    for _ in range(10):
        X = samples.random_complex(rng)
        f = identity(X)
        h = samples.random_nullhomotopic(rng, X, X)
        g = ChainMap(X, X, {m: f.component(m) + h.component(m) for m in X.degrees})
        s = are_homotopic(f, g)
        assert s is not None
    D = sphere(0, Z)
    assert are_homotopic(identity(D), scalar(D, 3)) is None


def test_quasi_isomorphisms():
    assert is_quasi_iso(zero_map(example_complex(), zero_complex()))
    assert not is_quasi_iso(scalar(sphere(0, Z), 2))
    assert is_quasi_iso(scalar(sphere(0, Z), -1))
    assert is_quasi_iso(zero_map(disk(2, fgmod.free(3)), zero_complex()))


def test_cone_of_doubling_a_sphere():
    f = scalar(sphere(0, Z), 2)
    C = cone(f)
    h = homology_all(C)
    assert h[0] == FgAbInvariants(0, (2,))
    assert cone_inclusion(f, C).commutes()


def test_mono_epi_iso():
    X = example_complex()
    inc = ChainMap(X, direct_sum(X, disk(0, Z)),
                   {m: IntMatrix.from_columns([[int(r == c) for r in range(X.gens(m) + (1 if m in (0, -1) else 0))]
                                               for c in range(X.gens(m))],
                                              X.gens(m) + (1 if m in (0, -1) else 0)) for m in X.degrees})
    assert is_mono(inc) and not is_epi(inc)
    assert is_iso(identity(X))
    assert not is_mono(zero_map(X, X))


def test_composition():
    X = sphere(0, Z)
    assert compose(scalar(X, 2), scalar(X, 3)).equals(scalar(X, 6))


def test_mapping_cylinder_factors_the_map():
    rng = random.Random(8)
    for _ in range(5):
        f = samples.random_chain_map(rng)
        cyl = mapping_cylinder(f)
        Cyl, inc, proj = cyl
        assert inc.commutes() and proj.commutes()
        assert is_mono(inc)
        assert compose(proj, inc).equals(f)
        assert is_quasi_iso(proj)
