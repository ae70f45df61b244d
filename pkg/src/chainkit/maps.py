"""Chain maps: composition, kernels and cokernels, homotopies, cones."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from . import fgmod
from .complex import (ChainComplex, InvalidComplex, Subcomplex, homology_presentation,
                      induced_subcomplex, is_exact)
from .fgmod import ModuleMap, Presentation
from .linalg import IntMatrix, hstack, solve, vstack


class InvalidChainMap(ValueError):
    def __init__(self, message: str, degree: Optional[int] = None):
        super().__init__(message)
        self.degree = degree


class ChainMap:
    """Components f_m : X_m -> Y_m with f_{m-1} d_m = d_m f_m."""

    def __init__(self, source: ChainComplex, target: ChainComplex,
                 components: Mapping[int, IntMatrix], check: bool = True):
        if source.ring != target.ring:
            raise InvalidChainMap("source and target over different rings")
        self.source, self.target = source, target
        self._comps: dict[int, IntMatrix] = {}
        for m, M in components.items():
            shape = (target.gens(m), source.gens(m))
            if M.shape != shape:
                raise InvalidChainMap(f"component in degree {m} has shape {M.shape}, expected {shape}", m)
            if M.nrows and M.ncols:
                self._comps[m] = M
        if check:
            for m in self.degrees:
                if not self.at(m).is_well_defined():
                    raise InvalidChainMap(f"component in degree {m} does not respect relations", m)
            bad = self.noncommuting_degree()
            if bad is not None:
                raise InvalidChainMap(f"map does not commute with boundaries in degree {bad}", bad)

    @property
    def degrees(self) -> range:
        lo = min(self.source.min_deg, self.target.min_deg)
        hi = max(self.source.max_deg, self.target.max_deg)
        return range(lo, hi + 1)

    def component(self, m: int) -> IntMatrix:
        M = self._comps.get(m)
        if M is None:
            return IntMatrix.zeros(self.target.gens(m), self.source.gens(m))
        return M

    def components(self) -> dict[int, IntMatrix]:
        return dict(self._comps)

    def at(self, m: int) -> ModuleMap:
        return ModuleMap(self.source.module(m), self.target.module(m), self.component(m))

    def noncommuting_degree(self) -> Optional[int]:
        for m in self.degrees:
            lhs = self.component(m - 1) @ self.source.d(m)
            rhs = self.target.d(m) @ self.component(m)
            Y = self.target.module(m - 1)
            if not all(Y.is_zero_element(c) for c in (lhs - rhs).columns()):
                return m
        return None

    def commutes(self) -> bool:
        return self.noncommuting_degree() is None

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return compose(self, other)

    def equals(self, other: "ChainMap") -> bool:
        return all(self.at(m).equals(other.at(m)) for m in self.degrees)

    def is_zero(self) -> bool:
        return all(self.at(m).is_zero() for m in self.degrees)

    def __repr__(self) -> str:
        return f"ChainMap({ {m: M.to_list() for m, M in self._comps.items()} })"


def identity(X: ChainComplex) -> ChainMap:
    return ChainMap(X, X, {m: IntMatrix.identity(X.gens(m)) for m in X.degrees}, check=False)


def zero_map(X: ChainComplex, Y: ChainComplex) -> ChainMap:
    return ChainMap(X, Y, {}, check=False)


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """g o f."""
    degs = set(f.degrees) | set(g.degrees)
    if any(f.target.gens(m) != g.source.gens(m) for m in degs):
        raise InvalidChainMap("maps are not composable")
    comps = {m: g.component(m) @ f.component(m) for m in degs}
    return ChainMap(f.source, g.target, comps, check=False)


def is_mono(f: ChainMap) -> bool:
    return all(fgmod.is_injective(f.at(m)) for m in f.source.degrees)


def is_epi(f: ChainMap) -> bool:
    return all(fgmod.is_surjective(f.at(m)) for m in f.target.degrees)


def is_iso(f: ChainMap) -> bool:
    return is_mono(f) and is_epi(f)


# ---------------------------------------------------------------------------
# kernels, images, cokernels

def kernel_subcomplex(f: ChainMap) -> Subcomplex:
    gens = {m: fgmod._kernel_generators(f.at(m)) for m in f.source.degrees}
    return induced_subcomplex(f.source, gens)


def kernel_complex(f: ChainMap) -> ChainComplex:
    return kernel_subcomplex(f).complex


def image_subcomplex(f: ChainMap) -> Subcomplex:
    return induced_subcomplex(f.target, {m: f.component(m) for m in f.target.degrees})


def image_complex(f: ChainMap) -> ChainComplex:
    return image_subcomplex(f).complex


def cokernel_complex(f: ChainMap) -> tuple[ChainComplex, ChainMap]:
    Y = f.target
    mods = {}
    for m in Y.degrees:
        M = Y.module(m)
        mods[m] = Presentation(Y.ring, M.gens, vstack(M.relations, f.component(m).T))
    C = ChainComplex(Y.ring, mods, {m: Y.d(m) for m in Y.degrees}, check=False)
    proj = ChainMap(Y, C, {m: IntMatrix.identity(Y.gens(m)) for m in Y.degrees}, check=False)
    return C, proj


# ---------------------------------------------------------------------------
# homotopies

@dataclass(frozen=True)
class Homotopy:
    """Maps s_m : X_m -> Y_{m+1} with f = d s + s d."""

    map: ChainMap
    s: Mapping[int, IntMatrix]

    def at(self, m: int) -> IntMatrix:
        f = self.map
        M = self.s.get(m)
        if M is None:
            return IntMatrix.zeros(f.target.gens(m + 1), f.source.gens(m))
        return M

    def verify(self) -> bool:
        f = self.map
        X, Y = f.source, f.target
        for m in X.degrees:
            if not ModuleMap(X.module(m), Y.module(m + 1), self.at(m)).is_well_defined():
                return False
        for m in f.degrees:
            total = Y.d(m + 1) @ self.at(m) + self.at(m - 1) @ X.d(m)
            diff = f.component(m) - total
            if not all(Y.module(m).is_zero_element(c) for c in diff.columns()):
                return False
        return True


def is_nullhomotopic(f: ChainMap) -> Optional[Homotopy]:
    """Solve f = d s + s d as one linear system over all degrees at once."""
    X, Y = f.source, f.target
    # unknown layout: entries of each s_m, then slack for relation lattices
    blocks = {}
    n = 0
    for m in X.degrees:
        r, c = Y.gens(m + 1), X.gens(m)
        if r and c:
            blocks[m] = (n, r, c)
            n += r * c

    def var(m, i, j):
        off, r, c = blocks[m]
        return off + i * c + j

    eq_rows: list[dict] = []
    rhs: list[int] = []
    slack: list[tuple[int, IntMatrix]] = []   # (first equation row, lattice) per block

    # f_m = d_{m+1} s_m + s_{m-1} d_m, column by column
    for m in X.degrees:
        gy, gx = Y.gens(m), X.gens(m)
        if not gy or not gx:
            continue
        dY, dX = Y.d(m + 1), X.d(m)
        F = f.component(m)
        for j in range(gx):
            start = len(eq_rows)
            for i in range(gy):
                row: dict[int, int] = {}
                if m in blocks:
                    for k in range(Y.gens(m + 1)):
                        a = dY.rows[i][k]
                        if a:
                            row[var(m, k, j)] = row.get(var(m, k, j), 0) + a
                if m - 1 in blocks:
                    for k in range(X.gens(m - 1)):
                        a = dX.rows[k][j]
                        if a:
                            row[var(m - 1, i, k)] = row.get(var(m - 1, i, k), 0) + a
                eq_rows.append(row)
                rhs.append(F.rows[i][j])
            lat = Y.module(m).lattice
            if lat.nrows:
                slack.append((start, lat))
    # each s_m must send relations of X_m into relations of Y_{m+1}
    for m, (off, r, c) in blocks.items():
        rels = X.module(m).full_relations
        lat = Y.module(m + 1).lattice
        for rho in rels.rows:
            start = len(eq_rows)
            for i in range(r):
                eq_rows.append({var(m, i, j): x for j, x in enumerate(rho) if x})
                rhs.append(0)
            if lat.nrows:
                slack.append((start, lat))
    total = n + sum(lat.nrows for _, lat in slack)
    dense = [[0] * total for _ in eq_rows]
    for i, row in enumerate(eq_rows):
        for k, a in row.items():
            dense[i][k] = a
    col = n
    for start, lat in slack:
        for l, lrow in enumerate(lat.rows):
            for i, x in enumerate(lrow):
                if x:
                    dense[start + i][col] = x
            col += 1
    if not eq_rows:
        h = Homotopy(f, {})
        return h if h.verify() else None
    x = solve(IntMatrix(dense, total), rhs)
    if x is None:
        return None
    s = {}
    for m, (off, r, c) in blocks.items():
        s[m] = IntMatrix([x[off + i * c: off + (i + 1) * c] for i in range(r)], c)
    h = Homotopy(f, s)
    if not h.verify():
        raise AssertionError("homotopy failed verification")
    return h


def are_homotopic(f: ChainMap, g: ChainMap) -> Optional[Homotopy]:
    diff = ChainMap(f.source, f.target, {m: f.component(m) - g.component(m) for m in f.degrees},
                    check=False)
    return is_nullhomotopic(diff)


# ---------------------------------------------------------------------------
# homology maps and quasi-isomorphisms

def homology_map(f: ChainMap, m: int) -> ModuleMap:
    X, Y = f.source, f.target
    HX, rx = homology_presentation(X, m)
    HY, ry = homology_presentation(Y, m)
    images = f.component(m) @ rx
    gens = hstack(ry, Y.d(m + 1))
    C = fgmod.express(Y.module(m), gens, images)
    if C is None:
        raise InvalidChainMap("image of a cycle is not a cycle", m)
    return ModuleMap(HX, HY, C.select_rows(range(ry.ncols)))


def is_quasi_iso(f: ChainMap) -> bool:
    return all(fgmod.is_isomorphism(homology_map(f, m)) for m in f.degrees)


def cone(f: ChainMap) -> ChainComplex:
    """cone_m = X_{m-1} + Y_m with d(x, y) = (-dx, f(x) + dy)."""
    X, Y = f.source, f.target
    lo = min(X.min_deg + 1, Y.min_deg)
    hi = max(X.max_deg + 1, Y.max_deg)
    mods = {m: fgmod.direct_sum(X.module(m - 1), Y.module(m)) for m in range(lo, hi + 1)}
    diffs = {}
    for m in range(lo + 1, hi + 1):
        top = hstack(-X.d(m - 1), IntMatrix.zeros(X.gens(m - 2), Y.gens(m)))
        bottom = hstack(f.component(m - 1), Y.d(m))
        diffs[m] = vstack(top, bottom)
    return ChainComplex(X.ring, mods, diffs, check=False)


def cone_inclusion(f: ChainMap, C: Optional[ChainComplex] = None) -> ChainMap:
    """Y -> cone(f), y -> (0, y)."""
    C = cone(f) if C is None else C
    X, Y = f.source, f.target
    comps = {m: vstack(IntMatrix.zeros(X.gens(m - 1), Y.gens(m)), IntMatrix.identity(Y.gens(m)))
             for m in Y.degrees}
    return ChainMap(Y, C, comps, check=False)


def mapping_cylinder(f: ChainMap):
    """Cyl(f)_m = X_m + X_{m-1} + Y_m with the maps X -> Cyl -> Y.

    Returns (cyl, inclusion of X, projection to Y); the inclusion is a
    degreewise split monomorphism and the projection a homotopy equivalence.
    """
    X, Y = f.source, f.target
    lo = min(X.min_deg, Y.min_deg)
    hi = max(X.max_deg + 1, Y.max_deg)
    mods = {m: fgmod.direct_sum(X.module(m), X.module(m - 1), Y.module(m)) for m in range(lo, hi + 1)}
    diffs = {}
    for m in range(lo + 1, hi + 1):
        a, b, c = X.gens(m), X.gens(m - 1), Y.gens(m)
        a2, b2, c2 = X.gens(m - 1), X.gens(m - 2), Y.gens(m - 1)
        # (x, x', y) -> (dx - x', -dx', f(x') + dy)
        r1 = hstack(X.d(m), -IntMatrix.identity(a2), IntMatrix.zeros(a2, c))
        r2 = hstack(IntMatrix.zeros(b2, a), -X.d(m - 1), IntMatrix.zeros(b2, c))
        r3 = hstack(IntMatrix.zeros(c2, a), f.component(m - 1), Y.d(m))
        diffs[m] = vstack(r1, r2, r3)
    cyl = ChainComplex(X.ring, mods, diffs)
    inc = ChainMap(X, cyl, {m: vstack(IntMatrix.identity(X.gens(m)),
                                      IntMatrix.zeros(X.gens(m - 1) + Y.gens(m), X.gens(m)))
                            for m in X.degrees})
    proj = ChainMap(cyl, Y, {m: hstack(f.component(m), IntMatrix.zeros(Y.gens(m), X.gens(m - 1)),
                                       IntMatrix.identity(Y.gens(m)))
                             for m in range(lo, hi + 1)})
    return cyl, inc, proj
