"""Tensor products of bounded complexes, and the pushout-product failure."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import fgmod
from .complex import ChainComplex, disk, homology_all, is_exact, sphere, validate, zero_complex
from .fgmod import FgAbInvariants, ModuleMap, Presentation
from .linalg import IntMatrix, kron, vstack
from .maps import ChainMap, is_mono


@dataclass(frozen=True)
class Block:
    left: int        # degree k of the X factor
    right: int       # degree n - k of the Y factor
    offset: int
    size: int


@dataclass
class TensorComplex:
    result: ChainComplex
    summand_index: dict[int, list[Block]]

    def block(self, n: int, k: int) -> Block:
        for b in self.summand_index.get(n, []):
            if b.left == k:
                return b
        raise KeyError((n, k))


def _blocks(X: ChainComplex, Y: ChainComplex, n: int) -> list[Block]:
    out, off = [], 0
    for k in X.degrees:
        if n - k in Y.degrees:
            size = X.gens(k) * Y.gens(n - k)
            out.append(Block(k, n - k, off, size))
            off += size
    return out


def _place(rows: list[list[int]], M: IntMatrix, r0: int, c0: int) -> None:
    for i, row in enumerate(M.rows):
        for j, v in enumerate(row):
            if v:
                rows[r0 + i][c0 + j] += v


def _tensor_parts(X: ChainComplex, Y: ChainComplex, signed_right: bool):
    if X.ring != Y.ring:
        raise fgmod.RingMismatch("tensor of complexes over different rings")
    if X.is_zero_window() or Y.is_zero_window():
        return {}, {}, {}
    lo, hi = X.min_deg + Y.min_deg, X.max_deg + Y.max_deg
    index = {n: _blocks(X, Y, n) for n in range(lo, hi + 1)}
    mods = {}
    for n, blocks in index.items():
        parts = [fgmod.tensor_mod(X.module(b.left), Y.module(b.right)) for b in blocks]
        mods[n] = fgmod.direct_sum(*parts) if parts else fgmod.zero_module(X.ring)
    diffs = {}
    for n in range(lo + 1, hi + 1):
        src, dst = index[n], index[n - 1]
        rows = [[0] * mods[n].gens for _ in range(mods[n - 1].gens)]
        where = {b.left: b for b in dst}
        for b in src:
            k = b.left
            # d(x (x) y) = dx (x) y + (-1)^k x (x) dy
            if k - 1 in where and k - 1 in X.degrees:
                t = where[k - 1]
                _place(rows, kron(X.d(k), IntMatrix.identity(Y.gens(b.right))), t.offset, b.offset)
            if signed_right and k in where:
                t = where[k]
                sign = -1 if k % 2 else 1
                _place(rows, kron(IntMatrix.identity(X.gens(k)), Y.d(b.right)).scale(sign),
                       t.offset, b.offset)
        diffs[n] = IntMatrix(rows, mods[n].gens)
    return index, mods, diffs


def tensor(X: ChainComplex, Y: ChainComplex) -> TensorComplex:
    """(X (x) Y)_n = sum over k of X_k (x) Y_{n-k}, blocks in ascending k."""
    index, mods, diffs = _tensor_parts(X, Y, True)
    if not mods:
        return TensorComplex(zero_complex(X.ring), {})
    T = ChainComplex(X.ring, mods, diffs, check=False)
    rep = validate(T)
    if not rep.ok:
        raise AssertionError(f"tensor boundary does not square to zero: {rep.problems}")
    return TensorComplex(T, index)


def bar_tensor(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """(X (x) Y)_n modulo its boundaries, with boundary induced by d (x) 1."""
    T = tensor(X, Y).result
    if T.is_zero_window():
        return T
    _, mods, diffs = _tensor_parts(X, Y, False)
    quot = {}
    for n in T.degrees:
        M = T.module(n)
        B = T.d(n + 1) if n + 1 in T.degrees else IntMatrix.zeros(M.gens, 0)
        quot[n] = Presentation(T.ring, M.gens, vstack(M.relations, B.T))
    Q = ChainComplex(T.ring, quot, diffs, check=False)
    for n in T.degrees:
        if n - 1 in T.degrees and not ModuleMap(quot[n], quot[n - 1], diffs[n]).is_well_defined():
            raise AssertionError(f"induced boundary is not well defined in degree {n}")
    rep = validate(Q)
    if not rep.ok:
        raise AssertionError(f"induced boundary does not square to zero: {rep.problems}")
    return Q


# ---------------------------------------------------------------------------
# the counterexample

def example_complex() -> ChainComplex:
    """Z --2--> Z --> Z/2 in degrees 1, 0, -1."""
    Z, Z2 = fgmod.free(1), fgmod.cyclic(2)
    return ChainComplex(fgmod.ZZ, {1: Z, 0: Z, -1: Z2},
                        {1: IntMatrix([[2]]), 0: IntMatrix([[1]])})


@dataclass
class ProductReport:
    name: str
    complex: ChainComplex
    homology: dict[int, FgAbInvariants]
    exact: bool


@dataclass
class CounterexampleReport:
    n: int
    cofibration_checks: dict[str, object]
    trivial_cofibration_checks: dict[str, object]
    products: list[ProductReport]
    controls: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def fails(self) -> bool:
        return all(not p.exact for p in self.products)

    def lines(self) -> list[str]:
        out = [f"n = {self.n}",
               "0 -> S^0(Z/2):"]
        out += [f"  {k}: {v}" for k, v in self.cofibration_checks.items()]
        out.append("0 -> X (X = Z -2-> Z -> Z/2 in degrees 1, 0, -1):")
        out += [f"  {k}: {v}" for k, v in self.trivial_cofibration_checks.items()]
        for p in self.products:
            out.append(f"S^0(Z/2) {p.name} X:")
            C = p.complex
            for m in reversed(C.degrees):
                out.append(f"  degree {m}: {fgmod.invariants(C.module(m))}  gens={C.gens(m)}")
            for m in reversed(C.degrees):
                if m - 1 in C.degrees:
                    out.append(f"  boundary {m} -> {m - 1}: {_reduced(C, m)}")
            for m, h in sorted(p.homology.items(), reverse=True):
                out.append(f"  H_{m} = {h}")
            out.append(f"  exact: {p.exact}  (weak equivalence from 0: {p.exact})")
        for label, ok in self.controls:
            out.append(f"control {label}: exact={ok}")
        verdict = "FAILS" if self.fails else "holds on this instance"
        out.append(f"pushout-product axiom: {verdict} for ⊗ and ⊗̄")
        return out

    def text(self) -> str:
        return "\n".join(self.lines())


def _reduced(C: ChainComplex, m: int) -> str:
    """The boundary matrix with columns reduced in the target; 'zero' when it vanishes."""
    M = C.module(m - 1)
    cols = [M.reduce(c) for c in C.d(m).columns()]
    if not any(any(c) for c in cols):
        return "zero"
    return str(IntMatrix.from_columns(cols, M.gens).to_list())


def counterexample_report(n: int = 1) -> CounterexampleReport:
    """0 -> S^0(Z/2) and 0 -> X are a cofibration and a trivial cofibration,
    yet both products of them fail to be exact."""
    from .model import dg_membership
    from .resolve import is_n_projective_complex
    if n < 1:
        raise ValueError("the counterexample needs n >= 1")
    S = sphere(0, fgmod.cyclic(2))
    X = example_complex()
    zero = zero_complex()
    cof = {
        "mono": is_mono(ChainMap(zero, S, {})),
        "cokernel degreewise pd <= n": all(fgmod.pd(S.module(m)) <= n for m in S.degrees),
        "cokernel exact": is_exact(S),
    }
    dg = dg_membership(S, n)
    cof["cokernel in dg class"] = dg.verdict
    triv = {
        "mono": is_mono(ChainMap(zero, X, {})),
        f"X exact with cycles of pd <= {n}": is_n_projective_complex(X, n),
    }
    products = []
    for name, C in (("⊗", tensor(S, X).result), ("⊗̄", bar_tensor(S, X))):
        products.append(ProductReport(name, C, homology_all(C), is_exact(C)))
    controls = []
    D = disk(1, fgmod.free(1))
    for label, Y in (("S^0(Z/2)", S), ("X", X), ("S^0(Z)", sphere(0, fgmod.free(1)))):
        controls.append((f"D^1(Z) ⊗ {label}", is_exact(tensor(D, Y).result)))
    return CounterexampleReport(n, cof, triv, products, controls)
