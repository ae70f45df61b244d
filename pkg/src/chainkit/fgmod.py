"""Finitely generated modules over Z or Z/m given by presentations.

A module over Z/m is handled as a Z-module killed by m: its full relation
lattice is the given relations plus m times the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

from .linalg import (IntMatrix, block_diag, hnf_rows, hstack, kernel_basis, kron,
                     reduce_mod_lattice, snf, solve, solve_many, vstack)

INFINITY = math.inf


class RingMismatch(ValueError):
    pass


class InvalidMap(ValueError):
    pass


@dataclass(frozen=True)
class Ring:
    """Z when modulus is 0, otherwise Z/modulus."""

    modulus: int = 0

    def __post_init__(self):
        if self.modulus < 0 or self.modulus == 1:
            raise ValueError("modulus must be 0 (for Z) or at least 2")

    @property
    def kind(self) -> str:
        return "Z" if self.modulus == 0 else "Zmod"

    @property
    def is_integers(self) -> bool:
        return self.modulus == 0

    def __str__(self) -> str:
        return "Z" if self.modulus == 0 else f"Z/{self.modulus}"


ZZ = Ring()


def Zmod(m: int) -> Ring:
    return Ring(m)


@dataclass(frozen=True)
class FgAbInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> Union[int, float]:
        if self.free_rank:
            return INFINITY
        return math.prod(self.torsion)

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def invariants_from_cyclic(free_rank: int, orders: Sequence[int]) -> FgAbInvariants:
    """Invariant factors of Z^free_rank plus a sum of cyclic groups Z/d."""
    orders = [abs(d) for d in orders if abs(d) != 1]
    free_rank += sum(1 for d in orders if d == 0)
    orders = [d for d in orders if d]
    if not orders:
        return FgAbInvariants(free_rank, ())
    d = snf(IntMatrix.diag(orders)).d
    return FgAbInvariants(free_rank, tuple(x for x in d if x > 1))


@dataclass(frozen=True)
class Presentation:
    """The cokernel of the relation matrix: Z^gens modulo the row lattice."""

    ring: Ring
    gens: int
    relations: IntMatrix = None

    def __post_init__(self):
        if self.relations is None:
            object.__setattr__(self, "relations", IntMatrix.zeros(0, self.gens))
        if self.relations.ncols != self.gens:
            raise ValueError(f"relation matrix has {self.relations.ncols} columns, expected {self.gens}")

    @cached_property
    def full_relations(self) -> IntMatrix:
        if self.ring.modulus:
            return vstack(self.relations, IntMatrix.identity(self.gens).scale(self.ring.modulus))
        return self.relations

    @cached_property
    def lattice(self) -> IntMatrix:
        """HNF basis of the relation lattice."""
        return hnf_rows(self.full_relations)

    def reduce(self, v: Sequence[int]) -> list[int]:
        return reduce_mod_lattice(v, self.lattice)

    def is_zero_element(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def is_zero(self) -> bool:
        return all(self.is_zero_element(e) for e in _unit_vectors(self.gens))

    def __repr__(self) -> str:
        return f"Presentation({self.ring}, gens={self.gens}, relations={self.relations.to_list()})"


def _unit_vectors(n: int) -> list[list[int]]:
    return [[int(i == j) for i in range(n)] for j in range(n)]


def free(n: int, ring: Ring = ZZ) -> Presentation:
    return Presentation(ring, n)


def cyclic(d: int, ring: Ring = ZZ) -> Presentation:
    """The cyclic module Z/d (d = 0 gives the free module of rank one)."""
    return Presentation(ring, 1, IntMatrix([[d]]) if d else IntMatrix.zeros(0, 1))


def zero_module(ring: Ring = ZZ) -> Presentation:
    return Presentation(ring, 0)


def from_invariants(inv: FgAbInvariants, ring: Ring = ZZ) -> Presentation:
    n = inv.free_rank + len(inv.torsion)
    rels = [[d if j == i else 0 for j in range(n)] for i, d in enumerate(inv.torsion)]
    return Presentation(ring, n, IntMatrix(rels, n))


def invariants(M: Presentation) -> FgAbInvariants:
    s = snf(M.full_relations)
    free_rank = M.gens - s.rank
    return FgAbInvariants(free_rank, tuple(x for x in s.d if x > 1))


def isomorphic(M: Presentation, N: Presentation) -> bool:
    return invariants(M) == invariants(N)


def in_submodule(M: Presentation, gens: IntMatrix, v: Sequence[int]) -> Optional[list[int]]:
    """Coefficients c with gens * c = v modulo the relations of M, or None."""
    a = hstack(gens, M.full_relations.T)
    x = solve(a, list(v))
    return None if x is None else x[:gens.ncols]


def express(M: Presentation, gens: IntMatrix, targets: IntMatrix) -> Optional[IntMatrix]:
    """Matrix C with gens * C = targets modulo the relations of M."""
    a = hstack(gens, M.full_relations.T)
    x = solve_many(a, targets)
    return None if x is None else x.select_rows(range(gens.ncols))


@dataclass(frozen=True)
class SimplifiedPresentation:
    module: Presentation
    to_new: IntMatrix     # old coordinates -> new coordinates
    from_new: IntMatrix   # new coordinates -> old coordinates


def simplify(M: Presentation) -> SimplifiedPresentation:
    """Isomorphic diagonal presentation with no unit invariant factors."""
    R = M.full_relations
    s = snf(R)
    keep = [i for i in range(M.gens) if i >= len(s.d) or s.d[i] != 1]
    rels = []
    for k, i in enumerate(keep):
        d = s.d[i] if i < len(s.d) else 0
        if d and d != M.ring.modulus:
            rels.append([d if j == k else 0 for j in range(len(keep))])
    N = Presentation(M.ring, len(keep), IntMatrix(rels, len(keep)))
    # relations are rows: R = U D V, so old coordinates are V^T times new ones
    return SimplifiedPresentation(N, s.V_inv.select_cols(keep).T, s.V.select_rows(keep).T)


# ---------------------------------------------------------------------------
# maps

@dataclass(frozen=True)
class ModuleMap:
    """A homomorphism; the matrix is target.gens x source.gens."""

    source: Presentation
    target: Presentation
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.gens, self.source.gens):
            raise InvalidMap(f"matrix shape {self.matrix.shape} does not match "
                             f"{self.target.gens} x {self.source.gens}")
        if self.source.ring != self.target.ring:
            raise RingMismatch("source and target over different rings")

    def is_well_defined(self) -> bool:
        images = self.matrix @ self.source.full_relations.T
        return express(self.target, IntMatrix.zeros(self.target.gens, 0), images) is not None

    def check(self) -> "ModuleMap":
        if not self.is_well_defined():
            raise InvalidMap("a relation of the source is not sent into the relations of the target")
        return self

    def __call__(self, v: Sequence[int]) -> list[int]:
        return self.target.reduce(self.matrix.apply(v))

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """Composition self o other."""
        if other.target.gens != self.source.gens:
            raise InvalidMap("maps are not composable")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix)

    def equals(self, other: "ModuleMap") -> bool:
        diff = self.matrix - other.matrix
        return all(self.target.is_zero_element(c) for c in diff.columns())

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(c) for c in self.matrix.columns())


def identity_map(M: Presentation) -> ModuleMap:
    return ModuleMap(M, M, IntMatrix.identity(M.gens))


def zero_map(M: Presentation, N: Presentation) -> ModuleMap:
    return ModuleMap(M, N, IntMatrix.zeros(N.gens, M.gens))


def _kernel_generators(f: ModuleMap) -> IntMatrix:
    """Source-coordinate generators of the kernel of f."""
    T = f.target.full_relations
    a = hstack(f.matrix, T.T.scale(-1))
    K = kernel_basis(a)
    return column_basis(K.select_rows(range(f.source.gens)))


def column_basis(G: IntMatrix) -> IntMatrix:
    """Independent columns spanning the same lattice as the columns of G."""
    if not G.ncols:
        return G
    return hnf_rows(G.T).T


def submodule(M: Presentation, gens: IntMatrix, simplify_result: bool = True) -> tuple[Presentation, IntMatrix]:
    """Presentation of the submodule of M spanned by the given columns.

    Returns (S, incl) where incl maps S's generators into M's coordinates.
    """
    k = gens.ncols
    a = hstack(gens, M.full_relations.T.scale(-1))
    rel = kernel_basis(a).select_rows(range(k)).T
    S = Presentation(M.ring, k, rel)
    if M.ring.modulus:
        S = Presentation(M.ring, k, _drop_ring_rows(rel, M.ring.modulus))
    if not simplify_result:
        return S, gens
    sp = simplify(S)
    return sp.module, gens @ sp.from_new


def _drop_ring_rows(rel: IntMatrix, m: int) -> IntMatrix:
    rows = [r for r in rel.rows if any(x % m for x in r)]
    return IntMatrix(rows, rel.ncols)


def kernel(f: ModuleMap, simplify_result: bool = True) -> tuple[Presentation, ModuleMap]:
    K, incl = submodule(f.source, _kernel_generators(f), simplify_result)
    return K, ModuleMap(K, f.source, incl)


def image(f: ModuleMap, simplify_result: bool = True) -> tuple[Presentation, ModuleMap]:
    I, incl = submodule(f.target, f.matrix, simplify_result)
    return I, ModuleMap(I, f.target, incl)


def cokernel(f: ModuleMap) -> tuple[Presentation, ModuleMap]:
    rels = vstack(f.target.relations, f.matrix.T)
    C = Presentation(f.target.ring, f.target.gens, rels)
    return C, ModuleMap(f.target, C, IntMatrix.identity(f.target.gens))


def is_injective(f: ModuleMap) -> bool:
    K = _kernel_generators(f)
    return all(f.source.is_zero_element(c) for c in K.columns())


def is_surjective(f: ModuleMap) -> bool:
    ident = IntMatrix.identity(f.target.gens)
    return express(f.target, f.matrix, ident) is not None


def is_isomorphism(f: ModuleMap) -> bool:
    return is_injective(f) and is_surjective(f)


def subquotient(incoming: ModuleMap, outgoing: ModuleMap) -> tuple[Presentation, IntMatrix]:
    """ker(outgoing) / im(incoming) for composable maps with outgoing o incoming = 0.

    Returns the presentation and the matrix of representatives in the middle
    module's coordinates.
    """
    mid = outgoing.source
    Kgen = _kernel_generators(outgoing)
    Kmod, kinc = submodule(mid, Kgen, simplify_result=False)
    coords = express(mid, kinc, incoming.matrix)
    if coords is None:
        raise InvalidMap("incoming image is not inside the kernel of outgoing")
    rels = vstack(Kmod.relations, coords.T)
    H = Presentation(mid.ring, Kmod.gens, rels)
    sp = simplify(H)
    return sp.module, kinc @ sp.from_new


def exact_at(incoming: ModuleMap, outgoing: ModuleMap) -> bool:
    if not (outgoing @ incoming).is_zero():
        return False
    H, _ = subquotient(incoming, outgoing)
    return invariants(H).is_zero


# ---------------------------------------------------------------------------
# constructions

def direct_sum(*mods: Presentation) -> Presentation:
    if not mods:
        raise ValueError("empty direct sum")
    ring = mods[0].ring
    if any(M.ring != ring for M in mods):
        raise RingMismatch("direct sum over different rings")
    return Presentation(ring, sum(M.gens for M in mods), block_diag(*(M.relations for M in mods)))


def power(M: Presentation, k: int) -> Presentation:
    if k == 0:
        return zero_module(M.ring)
    return direct_sum(*([M] * k))


def tensor_mod(M: Presentation, N: Presentation) -> Presentation:
    """M tensor N; generator (i, j) has index i * N.gens + j."""
    if M.ring != N.ring:
        raise RingMismatch("tensor over different rings")
    rels = []
    IN, IM = IntMatrix.identity(N.gens), IntMatrix.identity(M.gens)
    if M.relations.nrows:
        rels.append(kron(M.relations, IN))
    if N.relations.nrows:
        rels.append(kron(IM, N.relations))
    g = M.gens * N.gens
    R = vstack(*rels) if rels else IntMatrix.zeros(0, g)
    return Presentation(M.ring, g, R)


def tensor_map(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    return ModuleMap(tensor_mod(f.source, g.source), tensor_mod(f.target, g.target),
                     kron(f.matrix, g.matrix))


def _cyclic_orders(M: Presentation) -> tuple[int, list[int]]:
    inv = invariants(M)
    return inv.free_rank, list(inv.torsion)


def hom(M: Presentation, N: Presentation) -> FgAbInvariants:
    """Hom(M, N) from the normal forms of both modules."""
    if M.ring != N.ring:
        raise RingMismatch("hom over different rings")
    a, ds = _cyclic_orders(M)
    b, es = _cyclic_orders(N)
    free_rank = a * b
    orders = [e for _ in range(a) for e in es]
    orders += [math.gcd(d, e) for d in ds for e in es]
    return invariants_from_cyclic(free_rank, orders)


def hom_free_map(A: IntMatrix, N: Presentation) -> IntMatrix:
    """Matrix of precomposition Hom(F, N) -> Hom(F', N) for A : F' -> F.

    Hom(Z^k, N) is identified with N^k, copy l holding the image of e_l.
    """
    return kron(A.T, IntMatrix.identity(N.gens))


@dataclass(frozen=True)
class ResolutionData:
    """0 -> F1 -> F0 -> M -> 0 with F0 free on the generators of M."""

    module: Presentation
    rank1: int
    rank0: int
    d: IntMatrix  # rank0 x rank1


def free_resolution(M: Presentation) -> ResolutionData:
    if not M.ring.is_integers:
        raise ValueError("length-one free resolutions are only built over Z")
    H = hnf_rows(M.relations)
    return ResolutionData(M, H.nrows, M.gens, H.T)


def _truncated_resolution(M: Presentation) -> tuple[IntMatrix, IntMatrix]:
    """Maps d1 : F1 -> F0 and d2 : F2 -> F1 of a free resolution over the ring."""
    if M.ring.is_integers:
        res = free_resolution(M)
        return res.d, IntMatrix.zeros(res.rank1, 0)
    m = M.ring.modulus
    d1 = M.relations.T
    d2 = kernel_basis(d1, modulus=m)
    return d1, d2


def ext1(M: Presentation, N: Presentation) -> FgAbInvariants:
    if M.ring != N.ring:
        raise RingMismatch("ext over different rings")
    d1, d2 = _truncated_resolution(M)
    H0 = power(N, d1.nrows)
    H1 = power(N, d1.ncols)
    H2 = power(N, d2.ncols)
    a = ModuleMap(H0, H1, hom_free_map(d1, N))
    b = ModuleMap(H1, H2, hom_free_map(d2, N))
    return invariants(subquotient(a, b)[0])


def tor1(M: Presentation, N: Presentation) -> FgAbInvariants:
    if M.ring != N.ring:
        raise RingMismatch("tor over different rings")
    d1, d2 = _truncated_resolution(M)
    IN = IntMatrix.identity(N.gens)
    T0, T1, T2 = power(N, d1.nrows), power(N, d1.ncols), power(N, d2.ncols)
    a = ModuleMap(T2, T1, kron(d2, IN))
    b = ModuleMap(T1, T0, kron(d1, IN))
    return invariants(subquotient(a, b)[0])


def prime_power_factors(m: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
        p += 1
    if m > 1:
        out.append((m, 1))
    return out


def _primary_parts(torsion: Sequence[int], p: int) -> list[int]:
    parts = []
    for d in torsion:
        q = 1
        while d % p == 0:
            d //= p
            q *= p
        if q > 1:
            parts.append(q)
    return parts


def is_projective(M: Presentation) -> bool:
    inv = invariants(M)
    if M.ring.is_integers:
        return not inv.torsion
    return all(all(q == p ** k for q in _primary_parts(inv.torsion, p))
               for p, k in prime_power_factors(M.ring.modulus))


def _nonprojective_signature(M: Presentation) -> tuple:
    inv = invariants(M)
    sig = []
    for p, k in prime_power_factors(M.ring.modulus):
        sig.append(tuple(sorted(q for q in _primary_parts(inv.torsion, p) if q != p ** k)))
    return tuple(sig)


def syzygy(M: Presentation) -> Presentation:
    """Kernel of the free cover on the generators of M."""
    F = free(M.gens, M.ring)
    return kernel(ModuleMap(F, M, IntMatrix.identity(M.gens)))[0]


def pd(M: Presentation, max_steps: int = 64) -> Union[int, float]:
    """Projective dimension: 0 or 1 over Z; 0 or infinity over Z/m."""
    if M.ring.is_integers:
        return 0 if is_projective(M) else 1
    seen = set()
    cur = M
    for step in range(max_steps):
        if is_projective(cur):
            return step
        sig = _nonprojective_signature(cur)
        if sig in seen:
            return INFINITY
        seen.add(sig)
        cur = syzygy(cur)
    return INFINITY
