"""Bounded chain complexes of finitely presented modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import fgmod
from .fgmod import FgAbInvariants, ModuleMap, Presentation, Ring, ZZ
from .linalg import IntMatrix, block_diag, kernel_basis, solve, vstack


class InvalidComplex(ValueError):
    def __init__(self, message: str, degree: Optional[int] = None):
        super().__init__(message)
        self.degree = degree


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[tuple[int, str], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


class ChainComplex:
    """Modules X_m for m in [min_deg, max_deg] with boundaries d_m : X_m -> X_{m-1}.

    Degrees outside the window carry the zero module.  The window of the
    zero complex is empty (min_deg > max_deg).
    """

    def __init__(self, ring: Ring, modules: Mapping[int, Presentation],
                 diffs: Optional[Mapping[int, IntMatrix]] = None, check: bool = True):
        self.ring = ring
        degs = [m for m, M in modules.items() if M.gens]
        if degs:
            self.min_deg, self.max_deg = min(degs), max(degs)
        else:
            self.min_deg, self.max_deg = 0, -1
        self._modules: dict[int, Presentation] = {}
        for m in range(self.min_deg, self.max_deg + 1):
            M = modules.get(m, fgmod.zero_module(ring))
            if M.ring != ring:
                raise InvalidComplex(f"module in degree {m} is over {M.ring}, expected {ring}", m)
            self._modules[m] = M
        self._zero = fgmod.zero_module(ring)
        self._diffs: dict[int, IntMatrix] = {}
        for m, D in (diffs or {}).items():
            if D.shape != (self.module(m - 1).gens, self.module(m).gens):
                raise InvalidComplex(f"boundary in degree {m} has shape {D.shape}, expected "
                                     f"{(self.module(m - 1).gens, self.module(m).gens)}", m)
            if D.nrows and D.ncols:
                self._diffs[m] = D
        if check:
            report = validate(self)
            if not report.ok:
                deg, msg = report.problems[0]
                raise InvalidComplex(msg, deg)

    def module(self, m: int) -> Presentation:
        return self._modules.get(m, self._zero)

    def d(self, m: int) -> IntMatrix:
        D = self._diffs.get(m)
        if D is None:
            return IntMatrix.zeros(self.module(m - 1).gens, self.module(m).gens)
        return D

    def boundary(self, m: int) -> ModuleMap:
        return ModuleMap(self.module(m), self.module(m - 1), self.d(m))

    @property
    def degrees(self) -> range:
        return range(self.min_deg, self.max_deg + 1)

    def gens(self, m: int) -> int:
        return self.module(m).gens

    def is_zero_window(self) -> bool:
        return self.min_deg > self.max_deg

    def modules(self) -> dict[int, Presentation]:
        return dict(self._modules)

    def diffs(self) -> dict[int, IntMatrix]:
        return dict(self._diffs)

    def __repr__(self) -> str:
        parts = [f"{m}: {self.module(m)!r}" for m in reversed(self.degrees)]
        return f"ChainComplex({self.ring}, [{', '.join(parts)}])"


def validate(X: ChainComplex) -> ValidationReport:
    """Check that every boundary is well defined and that d o d = 0."""
    problems = []
    for m in range(X.min_deg, X.max_deg + 1):
        if not X.boundary(m).is_well_defined():
            problems.append((m, f"boundary d_{m} does not respect the relations of X_{m}"))
    for m in range(X.min_deg + 1, X.max_deg + 1):
        comp = X.d(m - 1) @ X.d(m)
        target = X.module(m - 2)
        if not all(target.is_zero_element(c) for c in comp.columns()):
            problems.append((m, f"d_{m - 1} o d_{m} is not zero (boundary squared fails at degree {m})"))
    return ValidationReport(not problems, tuple(problems))


@dataclass(frozen=True)
class Element:
    degree: int
    coords: tuple[int, ...]

    @classmethod
    def of(cls, X: ChainComplex, degree: int, coords: Sequence[int]) -> "Element":
        M = X.module(degree)
        if len(coords) != M.gens:
            raise ValueError(f"element needs {M.gens} coordinates in degree {degree}")
        return cls(degree, tuple(M.reduce(coords)))


def generator(X: ChainComplex, degree: int, index: int) -> Element:
    v = [0] * X.gens(degree)
    v[index] = 1
    return Element.of(X, degree, v)


# ---------------------------------------------------------------------------
# cycles, boundaries, homology

def cycles_map(X: ChainComplex, m: int) -> ModuleMap:
    return fgmod.kernel(X.boundary(m))[1]


def cycles(X: ChainComplex, m: int) -> Presentation:
    return cycles_map(X, m).source


def boundaries_map(X: ChainComplex, m: int) -> ModuleMap:
    return fgmod.image(X.boundary(m + 1))[1]


def boundaries(X: ChainComplex, m: int) -> Presentation:
    return boundaries_map(X, m).source


def homology_presentation(X: ChainComplex, m: int) -> tuple[Presentation, IntMatrix]:
    """H_m as a presentation plus cycle representatives in X_m coordinates."""
    return fgmod.subquotient(X.boundary(m + 1), X.boundary(m))


def homology(X: ChainComplex, m: int) -> FgAbInvariants:
    return fgmod.invariants(homology_presentation(X, m)[0])


def homology_all(X: ChainComplex) -> dict[int, FgAbInvariants]:
    return {m: homology(X, m) for m in X.degrees}


def is_exact(X: ChainComplex) -> bool:
    return all(fgmod.exact_at(X.boundary(m + 1), X.boundary(m)) for m in X.degrees)


def size(X: ChainComplex) -> int:
    return sum(X.gens(m) for m in X.degrees)


# ---------------------------------------------------------------------------
# basic constructions

def zero_complex(ring: Ring = ZZ) -> ChainComplex:
    return ChainComplex(ring, {})


def disk(n: int, M: Presentation) -> ChainComplex:
    """M in degrees n and n-1 with identity boundary."""
    return ChainComplex(M.ring, {n: M, n - 1: M}, {n: IntMatrix.identity(M.gens)})


def sphere(n: int, M: Presentation) -> ChainComplex:
    return ChainComplex(M.ring, {n: M})


def shift(X: ChainComplex, k: int) -> ChainComplex:
    """(X[k])_m = X_{m-k}, boundaries unchanged."""
    return ChainComplex(X.ring, {m + k: X.module(m) for m in X.degrees},
                        {m + k: X.d(m) for m in X.degrees}, check=False)


def direct_sum(*Xs: ChainComplex) -> ChainComplex:
    if not Xs:
        raise ValueError("empty direct sum")
    ring = Xs[0].ring
    lo = min((X.min_deg for X in Xs if not X.is_zero_window()), default=0)
    hi = max((X.max_deg for X in Xs if not X.is_zero_window()), default=-1)
    mods, diffs = {}, {}
    for m in range(lo, hi + 1):
        mods[m] = fgmod.direct_sum(*(X.module(m) for X in Xs))
    for m in range(lo + 1, hi + 1):
        diffs[m] = block_diag(*(X.d(m) for X in Xs))
    return ChainComplex(ring, mods, diffs, check=False)


def sum_offsets(Xs: Sequence[ChainComplex], m: int) -> list[int]:
    """Offsets of each summand's generators inside degree m of the direct sum."""
    out, acc = [], 0
    for X in Xs:
        out.append(acc)
        acc += X.gens(m)
    return out


# ---------------------------------------------------------------------------
# subcomplexes and quotients

@dataclass(frozen=True)
class Subcomplex:
    """A complex S with injective inclusion matrices into an ambient complex."""

    ambient: ChainComplex
    complex: ChainComplex
    inclusion: Mapping[int, IntMatrix]

    def incl(self, m: int) -> IntMatrix:
        M = self.inclusion.get(m)
        if M is None:
            return IntMatrix.zeros(self.ambient.gens(m), self.complex.gens(m))
        return M

    def as_chain_map(self):
        from .maps import ChainMap
        return ChainMap(self.complex, self.ambient, dict(self.inclusion))

    def contains(self, x: Element) -> bool:
        M = self.ambient.module(x.degree)
        return fgmod.in_submodule(M, self.incl(x.degree), x.coords) is not None

    def validate(self) -> ValidationReport:
        problems = []
        f = self.as_chain_map()
        from .maps import is_mono
        if not f.commutes():
            problems.append((0, "inclusion does not commute with boundaries"))
        elif not is_mono(f):
            problems.append((0, "inclusion is not injective"))
        return ValidationReport(not problems, tuple(problems))


def induced_subcomplex(X: ChainComplex, gens: Mapping[int, IntMatrix],
                       simplify_result: bool = True) -> Subcomplex:
    """Subcomplex spanned by the given generator columns in each degree.

    Raises InvalidComplex when the spans are not closed under the boundary.
    """
    mods, incl = {}, {}
    for m in X.degrees:
        G = gens.get(m)
        if G is None:
            G = IntMatrix.zeros(X.gens(m), 0)
        S, inc = fgmod.submodule(X.module(m), G, simplify_result)
        mods[m], incl[m] = S, inc
    diffs = {}
    for m in X.degrees:
        if m - 1 not in incl:
            continue
        image = X.d(m) @ incl[m]
        C = fgmod.express(X.module(m - 1), incl[m - 1], image)
        if C is None:
            raise InvalidComplex(f"span in degree {m} is not mapped into the span in degree {m - 1}", m)
        diffs[m] = C
    sub = ChainComplex(X.ring, mods, {m: D for m, D in diffs.items()
                                     if mods.get(m) and mods.get(m - 1)}, check=False)
    return Subcomplex(X, sub, {m: M for m, M in incl.items() if M.ncols})


def quotient(X: ChainComplex, S: Subcomplex):
    """X / S with its projection (a chain epimorphism)."""
    from .maps import ChainMap
    mods = {}
    for m in X.degrees:
        M = X.module(m)
        mods[m] = Presentation(X.ring, M.gens, vstack(M.relations, S.incl(m).T))
    Q = ChainComplex(X.ring, mods, {m: X.d(m) for m in X.degrees}, check=False)
    proj = ChainMap(X, Q, {m: IntMatrix.identity(X.gens(m)) for m in X.degrees})
    return Q, proj


def simplify_complex(X: ChainComplex):
    """Degreewise simplified presentations; returns (Y, iso X -> Y, iso Y -> X)."""
    from .maps import ChainMap
    sps = {m: fgmod.simplify(X.module(m)) for m in X.degrees}
    mods = {m: sp.module for m, sp in sps.items()}
    diffs = {m: sps[m - 1].to_new @ X.d(m) @ sps[m].from_new for m in X.degrees if m - 1 in sps}
    Y = ChainComplex(X.ring, mods, diffs, check=False)
    to_y = ChainMap(X, Y, {m: sps[m].to_new for m in X.degrees})
    from_y = ChainMap(Y, X, {m: sps[m].from_new for m in X.degrees})
    return Y, to_y, from_y


# ---------------------------------------------------------------------------
# disks, disk sums and decompositions

@dataclass(frozen=True)
class DiskBasis:
    """A direct sum of disks D^{n_i}(R), one rank-one disk per entry.

    In degree m the generators are the disks touching m, in list order:
    disk i contributes its top generator in degree n_i and its bottom
    generator in degree n_i - 1.
    """

    disks: tuple[int, ...]
    ring: Ring = ZZ

    def layout(self, m: int) -> list[tuple[int, str]]:
        return [(i, "top" if n == m else "bottom")
                for i, n in enumerate(self.disks) if n == m or n == m + 1]

    def position(self, i: int, role: str) -> int:
        m = self.disks[i] if role == "top" else self.disks[i] - 1
        return self.layout(m).index((i, role))

    def positions(self, m: int) -> dict[tuple[int, str], int]:
        return {key: k for k, key in enumerate(self.layout(m))}

    def complex(self) -> ChainComplex:
        if not self.disks:
            return zero_complex(self.ring)
        lo, hi = min(self.disks) - 1, max(self.disks)
        mods, diffs = {}, {}
        for m in range(lo, hi + 1):
            mods[m] = fgmod.free(len(self.layout(m)), self.ring)
        for m in range(lo + 1, hi + 1):
            src, dst = self.layout(m), self.positions(m - 1)
            rows = [[0] * len(src) for _ in range(len(dst))]
            for k, (i, role) in enumerate(src):
                if role == "top":
                    rows[dst[(i, "bottom")]][k] = 1
            diffs[m] = IntMatrix(rows, len(src))
        return ChainComplex(self.ring, mods, diffs, check=False)

    def sub_basis(self, chosen: Iterable[int]) -> "DiskBasis":
        return DiskBasis(tuple(self.disks[i] for i in sorted(chosen)), self.ring)

    def span_columns(self, chosen: Iterable[int], m: int) -> IntMatrix:
        """Unit columns in degree m for the generators of the chosen disks."""
        chosen = set(chosen)
        lay = self.layout(m)
        cols = []
        for k, (i, _) in enumerate(lay):
            if i in chosen:
                cols.append([int(r == k) for r in range(len(lay))])
        return IntMatrix.from_columns(cols, len(lay))

    def disk_of_generator(self, m: int, k: int) -> int:
        return self.layout(m)[k][0]


def disk_sum(disks: Sequence[int], ring: Ring = ZZ) -> tuple[ChainComplex, DiskBasis]:
    basis = DiskBasis(tuple(disks), ring)
    return basis.complex(), basis


def is_free_complex(X: ChainComplex) -> bool:
    """Exact with every cycle module projective (free over Z)."""
    if not is_exact(X):
        return False
    return all(fgmod.is_projective(cycles(X, m)) for m in X.degrees)


@dataclass(frozen=True)
class DiskDecomposition:
    disks: tuple[tuple[int, int], ...]   # (n, rank) meaning D^n(R^rank)
    basis: DiskBasis
    complex: ChainComplex
    iso: object                          # ChainMap from the disk sum to X


def disk_decomposition(X: ChainComplex) -> DiskDecomposition:
    """X as a sum of rank-one free disks, with a chain isomorphism certificate.

    Disks are ordered by index descending, then by the order of the cycle
    basis they come from.
    """
    from .maps import ChainMap
    if not X.ring.is_integers:
        raise ValueError("disk decompositions are computed over Z")
    if not is_free_complex(X):
        raise InvalidComplex("not a free complex: it is not exact or has a non-free cycle module")
    sps = {m: fgmod.simplify(X.module(m)) for m in X.degrees}
    lo, hi = X.min_deg, X.max_deg
    dfree = {}
    for m in range(lo, hi + 2):
        src = sps[m].from_new if m in sps else IntMatrix.zeros(0, 0)
        tgt = sps[m - 1].to_new if m - 1 in sps else IntMatrix.zeros(0, X.gens(m - 1))
        if m in sps and m - 1 in sps:
            dfree[m] = tgt @ X.d(m) @ src
    zb = {}
    for m in range(lo, hi + 1):
        r = sps[m].module.gens
        D = dfree.get(m, IntMatrix.zeros(0, r))
        zb[m] = kernel_basis(D)
    lifts = {}
    for m in range(lo + 1, hi + 1):
        D = dfree[m]
        Z = zb[m - 1]
        cols = []
        for z in Z.columns():
            y = solve(D, z)
            if y is None:
                raise InvalidComplex(f"cycle in degree {m - 1} is not a boundary", m - 1)
            cols.append(y)
        lifts[m] = cols
    # disk with index m + 1 for each cycle basis vector in degree m
    order = []
    for m in range(hi, lo - 1, -1):
        for k in range(zb[m].ncols):
            order.append((m + 1, m, k))
    basis = DiskBasis(tuple(n for n, _, _ in order), X.ring)
    D = basis.complex()
    comps = {}
    for m in range(lo, hi + 1):
        cols = []
        for i, role in basis.layout(m):
            n, deg, k = order[i]
            v = zb[deg].column(k) if role == "bottom" else lifts[m][k]
            cols.append(sps[m].from_new.apply(v))
        comps[m] = IntMatrix.from_columns(cols, X.gens(m))
    iso = ChainMap(D, X, comps)
    ranks: dict[int, int] = {}
    for n, _, _ in order:
        ranks[n] = ranks.get(n, 0) + 1
    summary = tuple(sorted(ranks.items(), key=lambda t: -t[0]))
    return DiskDecomposition(summary, basis, D, iso)


def is_contractible(X: ChainComplex) -> bool:
    from .maps import identity, is_nullhomotopic
    return is_nullhomotopic(identity(X)) is not None
