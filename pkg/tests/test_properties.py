"""Invariants checked on randomly drawn inputs."""
import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import samples
from chainkit import fgmod
from chainkit.complex import (Element, cycles, direct_sum, homology, homology_all, is_exact, simplify_complex,
                              size, sphere)
from chainkit.fgmod import ModuleMap, Presentation, ZZ
from chainkit.linalg import IntMatrix, snf
from chainkit.maps import cokernel_complex, cone, is_epi, is_mono, is_quasi_iso, kernel_subcomplex
from chainkit.resolve import ext1_complex, is_n_projective_complex, projective_cover_complex
from chainkit.tensorx import tensor
from chainkit.zigzag import build_filtration, verify_certificate, verify_filtration, zigzag_complex

seeds = st.integers(0, 2 ** 32 - 1)
matrices = st.integers(0, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=0, max_size=4)
    .map(lambda rows: IntMatrix(rows, c)))
slow = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@given(matrices)
def test_smith_form_certificate(A):
    s = snf(A)
    r, c = A.shape
    assert s.U @ s.diagonal_matrix() @ s.V == A
    assert s.U @ s.U_inv == IntMatrix.identity(r)
    assert s.V @ s.V_inv == IntMatrix.identity(c)
    nz = [x for x in s.d if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert list(s.d[:len(nz)]) == nz       # nonzero entries come first


@given(matrices, st.sampled_from([0, 0, 4, 6]))
def test_simplify_is_an_isomorphism(R, modulus):
    ring = fgmod.Ring(modulus)
    M = Presentation(ring, R.ncols, R)
    S = fgmod.simplify(M)
    fwd = ModuleMap(M, S.module, S.to_new).check()
    back = ModuleMap(S.module, M, S.from_new).check()
    assert (back @ fwd).equals(fgmod.identity_map(M))
    assert (fwd @ back).equals(fgmod.identity_map(S.module))
    assert fgmod.invariants(S.module) == fgmod.invariants(M)


@slow
@given(seeds)
def test_twisting_preserves_homology(seed):
    rng = random.Random(seed)
    X = samples.random_p1(rng, 12, twisted=False) if rng.random() < 0.5 else samples.random_complex(rng)
    assert homology_all(samples.twist(X, rng)) == homology_all(X)


@slow
@given(seeds)
def test_quasi_isomorphism_iff_exact_cone(seed):
    f = samples.random_chain_map(random.Random(seed))
    assert is_quasi_iso(f) == is_exact(cone(f))


@slow
@given(seeds)
def test_kunneth_for_free_complexes(seed):
    rng = random.Random(seed)
    X, Y = samples.random_complex(rng), samples.random_complex(rng)
    T = tensor(X, Y).result
    hx, hy = homology_all(X), homology_all(Y)
    for n in T.degrees:
        parts = []
        for i, a in hx.items():
            A = fgmod.from_invariants(a)
            for j, b in hy.items():
                B = fgmod.from_invariants(b)
                if i + j == n:
                    parts.append(fgmod.tensor_mod(A, B))
                if i + j == n - 1:
                    parts.append(fgmod.from_invariants(fgmod.tor1(A, B)))
        expected = fgmod.invariants(fgmod.direct_sum(*parts)) if parts else fgmod.FgAbInvariants(0)
        assert homology(T, n) == expected


@slow
@given(seeds)
def test_ext_of_a_sphere_sits_in_a_short_exact_sequence(seed):
    # 0 -> Ext(M, cycles_0 Y) -> Ext(S^0 M, Y) -> Hom(M, H_{-1} Y) -> 0
    rng = random.Random(seed)
    M = samples.random_module(rng)
    Y = samples.random_complex(rng)
    mid = ext1_complex(sphere(0, M), Y)
    left = fgmod.ext1(M, cycles(Y, 0))
    right = fgmod.hom(M, fgmod.from_invariants(homology(Y, -1)))
    assert mid.free_rank == left.free_rank + right.free_rank
    tors = [fgmod.FgAbInvariants(0, e.torsion).order() for e in (left, mid, right)]
    assert tors[1] % tors[0] == 0
    assert (tors[0] * tors[2]) % tors[1] == 0
    if mid.free_rank == 0:
        assert tors[1] == tors[0] * tors[2]


@slow
@given(seeds, st.integers(3, 10))
def test_filtration_factor_sizes(seed, budget):
    X = samples.random_p1(random.Random(seed), 16)
    F = build_filtration(X, 1, budget)
    assert verify_filtration(F) == []
    assert sum(F.factor_sizes()) >= size(simplify_complex(X)[0])
    if not F.budget_exceeded:
        assert all(s <= budget for s in F.factor_sizes())


@slow
@given(seeds)
def test_zigzag_certificates_are_sound(seed):
    rng = random.Random(seed)
    X = samples.random_p1(rng, 16)
    degs = [m for m in X.degrees if X.gens(m)]
    m = rng.choice(degs)
    x = Element.of(X, m, [rng.randint(-3, 3) for _ in range(X.gens(m))])
    cert = zigzag_complex(X, x, 1, budget=rng.choice([None, 4]))
    assert verify_certificate(cert) == []


@slow
@given(seeds)
def test_direct_sums_add_homology(seed):
    rng = random.Random(seed)
    A, B = samples.random_complex(rng), samples.random_complex(rng)
    S = direct_sum(A, B)
    for m in S.degrees:
        hs = [homology(C, m) if m in C.degrees else fgmod.FgAbInvariants(0) for C in (A, B)]
        parts = [fgmod.from_invariants(h) for h in hs]
        assert homology(S, m) == fgmod.invariants(fgmod.direct_sum(*parts))


@slow
@given(seeds)
def test_class_closure_along_covers(seed):
    # 0 -> K -> P -> X -> 0 with X a member: the class is closed under
    # kernels of epimorphisms and cokernels of monomorphisms between members
    rng = random.Random(seed)
    X = samples.random_p1(rng, 12)
    P, eps, _ = projective_cover_complex(X)
    assert is_epi(eps) and is_n_projective_complex(P, 0)
    sub = kernel_subcomplex(eps)
    assert is_n_projective_complex(sub.complex, 1)
    inc = sub.as_chain_map()
    assert is_mono(inc)
    C, _ = cokernel_complex(inc)
    assert is_n_projective_complex(C, 1)
    assert all(fgmod.isomorphic(C.module(m), X.module(m)) for m in X.degrees)
