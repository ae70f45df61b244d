"""Classifying chain maps in the n-projective model structure on Ch(Z).

Cofibrations are monos whose cokernel lies in the dg class, trivial
cofibrations are monos whose cokernel is exact with n-projective cycles,
fibrations are epis whose kernel is Ext-orthogonal to those exact complexes,
trivial fibrations are epis whose kernel is exact with cycles orthogonal to
the n-projective modules, and weak equivalences are quasi-isomorphisms.

Several of these classes quantify over infinitely many complexes.  Those
verdicts are reported as "consistent-with-family" together with the family
that was actually tested; "yes" is only given with a decidable reason.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import fgmod
from .complex import ChainComplex, cycles, disk, is_exact, sphere, zero_complex
from .fgmod import FgAbInvariants, Presentation
from .linalg import IntMatrix, solve
from .maps import (ChainMap, cokernel_complex, compose, is_epi, is_mono, is_quasi_iso,
                   kernel_complex, kernel_subcomplex)
from .resolve import (PreconditionError, consistent_with_right_class, ext1_complex,
                      is_n_projective_complex, p1_piece, projective_cover_complex)

YES, NO, CONSISTENT = "yes", "no", "consistent-with-family"


# ---------------------------------------------------------------------------
# the dg class

@dataclass
class DgReport:
    verdict: str
    reason: str
    entries: list[tuple[str, FgAbInvariants]] = field(default_factory=list)


def _degreewise_pd(C: ChainComplex, n: int) -> Optional[int]:
    """First degree whose module has projective dimension above n, if any."""
    for m in C.degrees:
        if fgmod.pd(C.module(m)) > n:
            return m
    return None


def right_exact_family(n: int, window: Sequence[int]) -> list[tuple[str, ChainComplex]]:
    """Finitely generated exact complexes whose cycles are orthogonal to P_n.

    For n = 0 every module qualifies, so any exact complex will do.  For
    n >= 1 the orthogonal modules over Z are the divisible ones, and the
    only finitely generated divisible group is 0: the family is empty.
    """
    if n >= 1:
        return []
    lo, hi = min(window), max(window)
    fam = []
    for k in range(lo, hi + 2):
        fam.append((f"D^{k}(Z)", disk(k, fgmod.free(1))))
        fam.append((f"D^{k}(Z/2)", disk(k, fgmod.cyclic(2))))
    for k in range(lo, hi + 1):
        fam.append((f"[Z -2-> Z -> Z/2] ending in degree {k}", p1_piece(2, k + 2)))
    return fam


def dg_membership(C: ChainComplex, n: int,
                  family: Optional[Sequence[tuple[str, ChainComplex]]] = None) -> DgReport:
    """Degreewise n-projective, and Ext^1(C, E) = 0 for E in a sampled right family."""
    if not C.ring.is_integers:
        raise PreconditionError("membership is decided over Z")
    bad = _degreewise_pd(C, n)
    if bad is not None:
        return DgReport(NO, f"module in degree {bad} has projective dimension above {n}")
    if is_n_projective_complex(C, n):
        return DgReport(YES, "exact with n-projective cycles, and that class lies inside the dg class")
    if family is None:
        family = right_exact_family(n, list(C.degrees) or [0])
    entries = [(label, ext1_complex(C, E)) for label, E in family]
    if any(not e.is_zero for _, e in entries):
        return DgReport(NO, "nonzero Ext^1 into a member of the right family", entries)
    note = "degreewise n-projective; Ext^1 vanished on every tested member"
    if not family:
        note += " (no nonzero finitely generated member exists for this n)"
    return DgReport(CONSISTENT, note, entries)


# ---------------------------------------------------------------------------
# classification

@dataclass
class MapClassification:
    mono: bool
    epi: bool
    weak_equiv: bool
    cofibration: str
    trivial_cofibration: str
    fibration: str
    trivial_fibration: str
    evidence: dict[str, object] = field(default_factory=dict)

    @property
    def cofibration_verdict(self) -> str:
        return self.cofibration

    @property
    def fibration_verdict(self) -> str:
        return self.fibration


def _cycles_orthogonal(K: ChainComplex, n: int) -> Optional[int]:
    """Degree of a cycle module that is not orthogonal to P_n, if any."""
    if n == 0:
        return None
    for m in K.degrees:
        if not cycles(K, m).is_zero():
            return m
    return None


def classify(f: ChainMap, n: int, family: Optional[Sequence[tuple[str, ChainComplex]]] = None,
             dg_family: Optional[Sequence[tuple[str, ChainComplex]]] = None) -> MapClassification:
    if not f.commutes():
        raise PreconditionError("not a chain map")
    if not f.source.ring.is_integers:
        raise PreconditionError("maps are classified over Z")
    mono, epi, qi = is_mono(f), is_epi(f), is_quasi_iso(f)
    ev: dict[str, object] = {}

    if not mono:
        cof = triv_cof = NO
        ev["cofibration"] = "not a monomorphism"
    else:
        C, _ = cokernel_complex(f)
        dg = dg_membership(C, n, dg_family)
        cof = dg.verdict
        ev["cofibration"] = dg.reason
        ev["cofibration family"] = [(label, str(e)) for label, e in dg.entries]
        triv_cof = YES if is_n_projective_complex(C, n) else NO
        ev["trivial cofibration"] = ("cokernel exact with n-projective cycles" if triv_cof == YES
                                     else "cokernel is not exact with n-projective cycles")

    if not epi:
        fib = triv_fib = NO
        ev["fibration"] = "not an epimorphism"
    else:
        K = kernel_complex(f)
        if all(K.module(m).is_zero() for m in K.degrees):
            fib = YES
            ev["fibration"] = "kernel is zero"
        else:
            rep = consistent_with_right_class(K, n, family)
            fib = CONSISTENT if rep.verdict == "consistent-with-family" else NO
            ev["fibration"] = rep.note if fib == CONSISTENT else "nonzero Ext^1 from a tested member"
            ev["fibration family"] = [(label, str(e)) for label, e in rep.entries]
        if not is_exact(K):
            triv_fib = NO
            ev["trivial fibration"] = "kernel is not exact"
        else:
            bad = _cycles_orthogonal(K, n)
            triv_fib = YES if bad is None else NO
            ev["trivial fibration"] = (
                "kernel exact with cycles orthogonal to P_n" if bad is None else
                f"cycles in degree {bad} are a nonzero finitely generated group, hence not divisible")
    return MapClassification(mono, epi, qi, cof, triv_cof, fib, triv_fib, ev)


# ---------------------------------------------------------------------------
# generating monomorphisms

@dataclass
class GeneratingSet:
    label: str
    maps: list[tuple[str, ChainMap]]

    def tags(self) -> list[str]:
        return [t for t, _ in self.maps]

    def __len__(self) -> int:
        return len(self.maps)


def _zero_into(X: ChainComplex) -> ChainMap:
    return ChainMap(zero_complex(X.ring), X, {})


def relation_inclusion(S: Presentation) -> IntMatrix:
    """k_S : Z^r -> Z^g with cokernel S (columns span the relation lattice)."""
    return S.lattice.T


def resolution_piece(S: Presentation, top: int) -> ChainComplex:
    """Z^r --k_S--> Z^g --> S in degrees top, top - 1, top - 2 (exact)."""
    k = relation_inclusion(S)
    mods = {top: fgmod.free(k.ncols), top - 1: fgmod.free(k.nrows), top - 2: S}
    return ChainComplex(fgmod.ZZ, mods, {top: k, top - 1: IntMatrix.identity(S.gens)})


def generating_sets(n: int, window: Sequence[int], samples: Sequence[Presentation] = (),
                    complex_samples: Optional[Sequence[tuple[str, ChainComplex]]] = None
                    ) -> tuple[GeneratingSet, GeneratingSet]:
    """Finite pieces of the generating monomorphisms I and J over a degree window.

    I: 0 -> D^k(Z), S^{k-1}(Z) -> D^k(Z), and S^k(k_S) for each sample S.
    J: 0 -> D^k(Z), and K -> P for a cover P -> E of each small exact
    complex E with n-projective cycles (by default the pieces
    Z^r -> Z^g -> S built from the samples).
    """
    Z = fgmod.free(1)
    for S in samples:
        if not S.ring.is_integers:
            raise PreconditionError("samples must be modules over Z")
        if fgmod.pd(S) > n:
            raise PreconditionError(f"sample {fgmod.invariants(S)} has projective dimension above {n}")
    I, J = [], []
    for k in window:
        D = disk(k, Z)
        I.append((f"0 -> D^{k}(Z)", _zero_into(D)))
        I.append((f"S^{k - 1}(Z) -> D^{k}(Z)",
                  ChainMap(sphere(k - 1, Z), D, {k - 1: IntMatrix.identity(1)})))
        J.append((f"0 -> D^{k}(Z)", _zero_into(D)))
    for S in samples:
        kS = relation_inclusion(S)
        name = str(fgmod.invariants(S))
        for k in window:
            I.append((f"S^{k}(k_S) for S = {name}",
                      ChainMap(sphere(k, fgmod.free(kS.ncols)), sphere(k, fgmod.free(kS.nrows)), {k: kS})))
    if complex_samples is None:
        complex_samples = []
        if n >= 1:
            for S in samples:
                if fgmod.pd(S) >= 1:
                    for k in window:
                        complex_samples.append((f"[{fgmod.invariants(S)} piece, top {k}]",
                                                resolution_piece(S, k)))
    for label, E in complex_samples:
        if not is_n_projective_complex(E, n):
            raise PreconditionError(f"{label} is not exact with n-projective cycles")
        _, eps, _ = projective_cover_complex(E)
        K = kernel_subcomplex(eps)
        J.append((f"K -> P for the cover of {label}",
                  ChainMap(K.complex, eps.source, dict(K.inclusion))))
    out_I, out_J = GeneratingSet("I", I), GeneratingSet("J", J)
    for gs in (out_I, out_J):
        for tag, f in gs.maps:
            if not is_mono(f):
                raise AssertionError(f"{gs.label} member {tag} is not a monomorphism")
    return out_I, out_J


# ---------------------------------------------------------------------------
# lifting

class _System:
    """Integer linear system built row by row; variables are named on demand."""

    def __init__(self):
        self.index: dict[object, int] = {}
        self.rows: list[dict[int, int]] = []
        self.rhs: list[int] = []

    def var(self, key) -> int:
        if key not in self.index:
            self.index[key] = len(self.index)
        return self.index[key]

    def equation(self, coeffs: dict[int, int], value: int) -> None:
        self.rows.append(coeffs)
        self.rhs.append(value)

    def solve(self) -> Optional[dict]:
        n = len(self.index)
        A = IntMatrix([[row.get(j, 0) for j in range(n)] for row in self.rows], n)
        x = solve(A, self.rhs)
        if x is None:
            return None
        return {k: x[i] for k, i in self.index.items()}


def _congruence(sys: _System, M: Presentation, tag, terms: list[dict[int, int]], target: list[int]):
    """sum of variable terms == target in M, with slack for the relations of M."""
    R = M.full_relations
    for i in range(M.gens):
        coeffs = dict(terms[i])
        for s in range(R.nrows):
            if R.rows[s][i]:
                v = sys.var((tag, "slack", s))
                coeffs[v] = coeffs.get(v, 0) - R.rows[s][i]
        sys.equation(coeffs, target[i])


def verify_lifting(i: ChainMap, p: ChainMap, u: ChainMap, v: ChainMap,
                   candidate_class: str = "") -> Optional[ChainMap]:
    """A diagonal d : B -> C with d i = u and p d = v, or None.

    The square is  A --u--> C
                   i|       |p
                   B --v--> D.
    """
    A, B, C, D = i.source, i.target, p.source, p.target
    if not compose(p, u).equals(compose(v, i)):
        raise PreconditionError("square does not commute")
    sys = _System()

    def d(m, r, c):
        return sys.var(("d", m, r, c))

    degs = list(B.degrees)
    for m in degs:
        Cm, Bm = C.module(m), B.module(m)
        # well defined on the relations of B_m
        for s, rel in enumerate(Bm.full_relations.rows):
            terms = [{d(m, r, c): x for c, x in enumerate(rel) if x} for r in range(Cm.gens)]
            _congruence(sys, Cm, ("wd", m, s), terms, [0] * Cm.gens)
        # chain map: dC d_m = d_{m-1} dB
        if C.gens(m - 1):
            dC, dB = C.d(m), B.d(m)
            for c in range(Bm.gens):
                terms = []
                for r in range(C.gens(m - 1)):
                    t: dict[int, int] = {}
                    for k in range(Cm.gens):
                        if dC.rows[r][k]:
                            key = d(m, k, c)
                            t[key] = t.get(key, 0) + dC.rows[r][k]
                    for k in range(B.gens(m - 1)):
                        if dB.rows[k][c]:
                            key = d(m - 1, r, k)
                            t[key] = t.get(key, 0) - dB.rows[k][c]
                    terms.append(t)
                _congruence(sys, C.module(m - 1), ("ch", m, c), terms, [0] * C.gens(m - 1))
        # d i = u
        im, um = i.component(m), u.component(m)
        for c in range(A.gens(m)):
            terms = [{d(m, r, k): im.rows[k][c] for k in range(Bm.gens) if im.rows[k][c]}
                     for r in range(Cm.gens)]
            _congruence(sys, Cm, ("left", m, c), terms, [um.rows[r][c] for r in range(Cm.gens)])
        # p d = v
        pm, vm = p.component(m), v.component(m)
        for c in range(Bm.gens):
            terms = [{d(m, k, c): pm.rows[r][k] for k in range(Cm.gens) if pm.rows[r][k]}
                     for r in range(D.gens(m))]
            _congruence(sys, D.module(m), ("right", m, c), terms, [vm.rows[r][c] for r in range(D.gens(m))])
    for m in degs:
        for r in range(C.gens(m)):
            for c in range(B.gens(m)):
                d(m, r, c)
    sol = sys.solve()
    if sol is None:
        return None
    comps = {m: IntMatrix([[sol[("d", m, r, c)] for c in range(B.gens(m))] for r in range(C.gens(m))],
                          B.gens(m))
             for m in degs}
    diag = ChainMap(B, C, comps)
    if not (compose(diag, i).equals(u) and compose(p, diag).equals(v)):
        raise AssertionError("lifting solution failed its own check")
    return diag
