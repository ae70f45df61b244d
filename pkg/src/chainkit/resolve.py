"""Resolutions of complexes by disk sums, n-projective membership, Ext^1 in Ch(Z)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import fgmod
from .complex import (ChainComplex, DiskBasis, InvalidComplex, Subcomplex, cycles, cycles_map,
                      disk_decomposition, homology_presentation, is_exact, is_free_complex,
                      sphere, disk, direct_sum)
from .fgmod import FgAbInvariants, ModuleMap, Presentation, ZZ
from .linalg import IntMatrix, block_diag, hstack, vstack
from .maps import ChainMap, compose, is_epi, is_mono, kernel_subcomplex

EXCEEDS = "exceeds"


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# covers

def cover_basis(X: ChainComplex) -> DiskBasis:
    """One disk D^m(R) per generator of X_m, degrees descending."""
    disks = []
    for m in reversed(X.degrees):
        disks += [m] * X.gens(m)
    return DiskBasis(tuple(disks), X.ring)


def projective_cover_complex(X: ChainComplex) -> tuple[ChainComplex, ChainMap, DiskBasis]:
    """Disk sum P with a chain epimorphism P -> X.

    The disk for generator e of X_m sends its top to e and its bottom to d(e).
    """
    if not X.ring.is_integers:
        raise PreconditionError("projective covers of complexes are built over Z")
    basis = cover_basis(X)
    P = basis.complex()
    owner = []   # disk index -> (degree, generator)
    for m in reversed(X.degrees):
        owner += [(m, k) for k in range(X.gens(m))]
    comps = {}
    for m in range(X.min_deg - 1, X.max_deg + 1):
        if not P.gens(m):
            continue
        cols = []
        for i, role in basis.layout(m):
            deg, k = owner[i]
            e = [int(j == k) for j in range(X.gens(deg))]
            cols.append(e if role == "top" else X.d(deg).apply(e))
        comps[m] = IntMatrix.from_columns(cols, X.gens(m))
    return P, ChainMap(P, X, comps, check=False), basis


# ---------------------------------------------------------------------------
# towers

@dataclass
class Stage:
    complex: ChainComplex
    basis: DiskBasis
    map: ChainMap          # to the previous stage (or to the target for stage 0)


@dataclass
class ResolutionTower:
    """0 -> P^n -> ... -> P^0 -> X -> 0 with every P^i a disk sum."""

    target: ChainComplex
    stages: list[Stage]
    complete: bool = True
    residual: Optional[ChainComplex] = None

    @property
    def length(self) -> int:
        return len(self.stages) - 1

    def maps(self) -> list[ChainMap]:
        return [s.map for s in self.stages]


def _kernel_as_sub(f: ChainMap) -> Subcomplex:
    return kernel_subcomplex(f)


def _decomposed_stage(K: Subcomplex) -> Stage:
    dec = disk_decomposition(K.complex)
    to_prev = compose(K.as_chain_map(), dec.iso)
    return Stage(dec.complex, dec.basis, to_prev)


def _cover_stage(K: Subcomplex) -> tuple[Stage, ChainMap]:
    P, eps, basis = projective_cover_complex(K.complex)
    return Stage(P, basis, compose(K.as_chain_map(), eps)), eps


def resolve_complex(X: ChainComplex, max_len: int, cover_first: bool = False) -> ResolutionTower:
    """Iterate covers and kernels; finish as soon as a kernel is a free complex.

    When the length would exceed max_len the tower is returned incomplete,
    with the kernel that is left over as its residual.  With cover_first the
    first stage is always the cover of X, even when X is itself free.
    """
    if not X.ring.is_integers:
        raise PreconditionError("complexes are resolved over Z")
    if not cover_first and is_free_complex(X):
        dec = disk_decomposition(X)
        return ResolutionTower(X, [Stage(dec.complex, dec.basis, dec.iso)])
    if max_len <= 0 and not cover_first:
        return ResolutionTower(X, [], complete=False, residual=X)
    P, eps, basis = projective_cover_complex(X)
    stages = [Stage(P, basis, eps)]
    K = _kernel_as_sub(eps)
    while True:
        if is_free_complex(K.complex):
            stages.append(_decomposed_stage(K))
            return ResolutionTower(X, stages)
        if len(stages) >= max(max_len, 1 if cover_first else 0):
            return ResolutionTower(X, stages, complete=False, residual=K.complex)
        stage, cov = _cover_stage(K)
        stages.append(stage)
        K = _kernel_as_sub(cov)


@dataclass
class TowerCheck:
    ok: bool
    problems: list[str] = field(default_factory=list)


def verify_tower(T: ResolutionTower) -> TowerCheck:
    """Re-check a tower from scratch: free stages, chain maps, degreewise exactness."""
    problems = []
    if not T.complete:
        problems.append("tower is incomplete")
    for i, s in enumerate(T.stages):
        if not is_free_complex(s.complex):
            problems.append(f"stage {i} is not a free complex")
        if not s.map.commutes():
            problems.append(f"map out of stage {i} is not a chain map")
    if T.stages and not is_epi(T.stages[0].map):
        problems.append("P^0 -> X is not surjective")
    if T.stages and not is_mono(T.stages[-1].map):
        problems.append("last map is not injective")
    maps = [s.map for s in T.stages]
    X = T.target
    degs = range(X.min_deg - 1, X.max_deg + 2)
    for i in range(len(maps) - 1):
        g, f = maps[i], maps[i + 1]   # f : P^{i+1} -> P^i, g : P^i -> previous
        for m in degs:
            if not fgmod.exact_at(f.at(m), g.at(m)):
                problems.append(f"not exact at stage {i}, degree {m}")
    return TowerCheck(not problems, problems)


# ---------------------------------------------------------------------------
# membership and dimension

def is_n_projective_complex(X: ChainComplex, n: int) -> bool:
    """Exact, and every cycle module has projective dimension at most n."""
    if not is_exact(X):
        return False
    return all(fgmod.pd(cycles(X, m)) <= n for m in X.degrees)


def pd_complex(X: ChainComplex, max_len: int, method: str = "cycles") -> Union[int, str]:
    """Projective dimension of a complex, or EXCEEDS when above max_len.

    method="cycles" uses exactness plus the cycle modules; method="tower"
    builds the resolution explicitly.
    """
    if method == "tower":
        for n in range(max_len + 1):
            if resolve_complex(X, n).complete:
                return n
        return EXCEEDS
    if not is_exact(X):
        return EXCEEDS
    d = max((fgmod.pd(cycles(X, m)) for m in X.degrees), default=0)
    return d if d <= max_len else EXCEEDS


# ---------------------------------------------------------------------------
# Ext^1 in the category of complexes

def _hom_from_disks(basis: DiskBasis, Y: ChainComplex) -> Presentation:
    """Hom(sum of disks D^{n_i}, Y) = sum of Y_{n_i} (image of each top)."""
    mods = [Y.module(n) for n in basis.disks]
    if not mods:
        return fgmod.zero_module(Y.ring)
    return fgmod.direct_sum(*mods)


def _precompose(g: ChainMap, src: DiskBasis, dst: DiskBasis, Y: ChainComplex) -> IntMatrix:
    """Matrix of Hom(dst-complex, Y) -> Hom(src-complex, Y), phi -> phi o g.

    g goes from the src disk sum to the dst disk sum.
    """
    row_off, col_off = [], []
    acc = 0
    for n in src.disks:
        row_off.append(acc)
        acc += Y.gens(n)
    nrows = acc
    acc = 0
    for n in dst.disks:
        col_off.append(acc)
        acc += Y.gens(n)
    ncols = acc
    out = [[0] * ncols for _ in range(nrows)]
    for j, n in enumerate(src.disks):
        col = g.component(n).column(src.position(j, "top"))
        for k, (i, role) in enumerate(dst.layout(n)):
            c = col[k]
            if not c:
                continue
            block = IntMatrix.identity(Y.gens(n)) if role == "top" else Y.d(n + 1)
            for a in range(block.nrows):
                for b in range(block.ncols):
                    if block.rows[a][b]:
                        out[row_off[j] + a][col_off[i] + b] += c * block.rows[a][b]
    return IntMatrix(out, ncols)


def truncated_cover_resolution(X: ChainComplex, stages: int = 3):
    """P^{stages-1} -> ... -> P^0 -> X built from covers only."""
    P, eps, basis = projective_cover_complex(X)
    out = [(P, basis, eps)]
    K = kernel_subcomplex(eps)
    for _ in range(stages - 1):
        Q, cov, qb = projective_cover_complex(K.complex)
        out.append((Q, qb, compose(K.as_chain_map(), cov)))
        K = kernel_subcomplex(cov)
    return out


def ext1_complex(X: ChainComplex, Y: ChainComplex) -> FgAbInvariants:
    """Ext^1 in Ch(Z) from Hom against a three-stage cover resolution of X."""
    if not (X.ring.is_integers and Y.ring.is_integers):
        raise PreconditionError("Ext of complexes is computed over Z")
    res = truncated_cover_resolution(X, 3)
    (P0, b0, _), (P1, b1, g1), (P2, b2, g2) = res
    H0, H1, H2 = (_hom_from_disks(b, Y) for b in (b0, b1, b2))
    a = ModuleMap(H0, H1, _precompose(g1, b1, b0, Y))
    b = ModuleMap(H1, H2, _precompose(g2, b2, b1, Y))
    return fgmod.invariants(fgmod.subquotient(a, b)[0])


# ---------------------------------------------------------------------------
# right-class semi-decision

def p1_piece(p: int, top: int = 1) -> ChainComplex:
    """Z --p--> Z --> Z/p in degrees top, top-1, top-2."""
    return ChainComplex(ZZ, {top: fgmod.free(1), top - 1: fgmod.free(1), top - 2: fgmod.cyclic(p)},
                        {top: IntMatrix([[p]]), top - 1: IntMatrix([[1]])})


def default_family(n: int, window: Sequence[int], primes: Sequence[int] = (2, 3)) -> list[tuple[str, ChainComplex]]:
    """Small members of the left class used to probe a right-class candidate.

    Rank-one disks over the window, and for n >= 1 the three-term complexes
    Z -> Z -> Z/p placed so that their torsion end falls in the window.
    """
    fam = []
    lo, hi = min(window), max(window)
    for k in range(lo, hi + 2):
        fam.append((f"D^{k}(Z)", disk(k, fgmod.free(1))))
    if n >= 1:
        for p in primes:
            for k in range(lo, hi + 1):
                fam.append((f"[Z -{p}-> Z -> Z/{p}] ending in degree {k}", p1_piece(p, k + 2)))
    return fam


@dataclass
class RightClassReport:
    verdict: str                 # "consistent-with-family" or "no"
    entries: list[tuple[str, FgAbInvariants]]
    note: str = ("semi-decision: only the listed family was tested; membership in the "
                 "right class quantifies over all left-class complexes")


def consistent_with_right_class(Y: ChainComplex, n: int,
                                family: Optional[Sequence[tuple[str, ChainComplex]]] = None) -> RightClassReport:
    if family is None:
        window = list(Y.degrees) or [0]
        family = default_family(n, window)
    entries = [(label, ext1_complex(S, Y)) for label, S in family]
    ok = all(inv.is_zero for _, inv in entries)
    return RightClassReport("consistent-with-family" if ok else "no", entries)


# ---------------------------------------------------------------------------
# exact sequences of complexes

@dataclass
class ComplexSequence:
    """terms[0] <- terms[1] <- ... with maps[i] : terms[i+1] -> terms[i].

    Read as 0 -> terms[-1] -> ... -> terms[0] -> 0.
    """

    terms: list[ChainComplex]
    maps: list[ChainMap]

    def degrees(self) -> range:
        lo = min((T.min_deg for T in self.terms if not T.is_zero_window()), default=0)
        hi = max((T.max_deg for T in self.terms if not T.is_zero_window()), default=-1)
        return range(lo, hi + 1)

    def is_exact(self) -> bool:
        for m in self.degrees():
            chain = [ModuleMap(fgmod.zero_module(self.terms[-1].ring), self.terms[-1].module(m),
                               IntMatrix.zeros(self.terms[-1].gens(m), 0))]
            chain += [f.at(m) for f in reversed(self.maps)]
            last = self.terms[0].module(m)
            chain.append(ModuleMap(last, fgmod.zero_module(last.ring), IntMatrix.zeros(0, last.gens)))
            for a, b in zip(chain, chain[1:]):
                if not fgmod.exact_at(a, b):
                    return False
        return True


def verify_exact_tail(seq: ComplexSequence) -> bool:
    """Given exactness with every term but terms[0] exact, confirm terms[0] is exact."""
    if not seq.is_exact():
        raise PreconditionError("the sequence of complexes is not exact")
    if not all(is_exact(T) for T in seq.terms[1:]):
        raise PreconditionError("some term other than the last is not exact")
    return is_exact(seq.terms[0])


@dataclass
class CycleSequence:
    degree: int
    modules: list[FgAbInvariants]     # Z_m of terms[-1], ..., terms[0]
    exact: bool
    connecting_zero: Optional[bool] = None


def _restricted_to_cycles(f: ChainMap, m: int) -> ModuleMap:
    zs = cycles_map(f.source, m)
    zt = cycles_map(f.target, m)
    img = f.component(m) @ zs.matrix
    C = fgmod.express(zt.target, zt.matrix, img)
    if C is None:
        raise AssertionError("chain map does not preserve cycles")
    return ModuleMap(zs.source, zt.source, C)


def _connecting_map_is_zero(seq: ComplexSequence, m: int) -> bool:
    """For 0 -> A2 -> A1 -> A0 -> 0: the snake map Z_m(A0) -> H_{m-1}(A2) vanishes.

    Lift a cycle z of A0 to A1, take its boundary, pull it back to A2 and
    test whether the result is a boundary there.
    """
    A0, A1, A2 = seq.terms
    f1, f2 = seq.maps[0].at(m), seq.maps[1]
    zs = cycles_map(A0, m)
    for z in zs.matrix.columns():
        y = fgmod.in_submodule(A0.module(m), f1.matrix, z)
        if y is None:
            return False
        w = A1.d(m).apply(y)
        x = fgmod.in_submodule(A1.module(m - 1), f2.component(m - 1), w)
        if x is None:
            return False
        if fgmod.in_submodule(A2.module(m - 1), A2.d(m), x) is None:
            return False
    return True


def verify_cycle_sequences(seq: ComplexSequence) -> list[CycleSequence]:
    """Per degree, the restricted sequence of cycle modules and its exactness."""
    if not seq.is_exact():
        raise PreconditionError("the sequence of complexes is not exact")
    if not all(is_exact(T) for T in seq.terms):
        raise PreconditionError("some term is not exact")
    out = []
    for m in seq.degrees():
        maps = [_restricted_to_cycles(f, m) for f in reversed(seq.maps)]
        mods = [cycles(T, m) for T in reversed(seq.terms)]
        chain = [ModuleMap(fgmod.zero_module(ZZ if not mods else mods[0].ring), mods[0],
                           IntMatrix.zeros(mods[0].gens, 0))] if mods else []
        chain += maps
        chain.append(ModuleMap(mods[-1], fgmod.zero_module(mods[-1].ring), IntMatrix.zeros(0, mods[-1].gens)))
        exact = all(fgmod.exact_at(a, b) for a, b in zip(chain, chain[1:]))
        conn = _connecting_map_is_zero(seq, m) if len(seq.terms) == 3 else None
        out.append(CycleSequence(m, [fgmod.invariants(M) for M in mods], exact, conn))
    return out


def tower_sequence(T: ResolutionTower, include_target: bool = False) -> ComplexSequence:
    """The stages of a tower as a sequence of complexes."""
    terms = [s.complex for s in T.stages]
    maps = [s.map for s in T.stages[1:]]
    if include_target:
        terms = [T.target] + terms
        maps = [T.stages[0].map] + maps
    return ComplexSequence(terms, maps)
