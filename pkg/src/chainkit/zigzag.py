"""Small subobjects around an element, and filtrations built from them.

Given a resolution by free pieces (free modules, or disk sums for
complexes), a subobject containing x is cut out by choosing basis
elements in every stage so that the chosen spans form a subresolution.
Two conditions are enforced until nothing changes:

* images: each chosen span maps into the chosen span one stage down;
* kernels: whatever the chosen span in stage j kills is hit by the
  chosen span in stage j + 1.

When both hold, the chosen spans resolve the image X' of the bottom span,
and the complementary spans resolve X / X'.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import fgmod
from .complex import ChainComplex, Element, Subcomplex, induced_subcomplex, quotient, validate
from .complex import size as complex_size
from .fgmod import ModuleMap, Presentation
from .linalg import IntMatrix, hstack, kernel_basis, solve, vstack
from .maps import ChainMap
from .resolve import (PreconditionError, ResolutionTower, Stage, is_n_projective_complex, resolve_complex,
                      verify_tower)


@dataclass(frozen=True)
class SweepRecord:
    sweep: int
    direction: str          # "images" or "kernels"
    stage: int
    added: tuple[int, ...]


def _unit_columns(idx: Sequence[int], n: int) -> IntMatrix:
    return IntMatrix.from_columns([[int(r == i) for r in range(n)] for i in idx], n)


def _support(v: Sequence[int]) -> set[int]:
    return {i for i, x in enumerate(v) if x}


def _preferred_solve(a: IntMatrix, b: Sequence[int], prefer: set[int]) -> Optional[list[int]]:
    """Solve a y = b, trying the preferred columns first and then lower indices."""
    order = sorted(range(a.ncols), key=lambda c: (c not in prefer, c))
    y = solve(a.select_cols(order), b)
    if y is None:
        return None
    out = [0] * a.ncols
    for pos, c in enumerate(order):
        out[c] = y[pos]
    return out


# ---------------------------------------------------------------------------
# modules over Z

@dataclass
class ModuleZigzag:
    """Result of the module zigzag.

    The resolution is 0 -> Z^k -> Z^g -> X -> 0 with the columns of
    `relation_map` spanning the relation lattice of X.  `selected0` and
    `selected1` index the chosen basis vectors of Z^g and Z^k.
    """

    module: Presentation
    element: tuple[int, ...]
    budget: Optional[int]
    relation_map: IntMatrix
    selected0: tuple[int, ...]
    selected1: tuple[int, ...]
    sub: Presentation
    inclusion: IntMatrix        # generators of sub in the coordinates of X
    quotient: Presentation
    size: int
    budget_exceeded: bool
    history: list[SweepRecord] = field(default_factory=list)


def zigzag_module(X: Presentation, x: Sequence[int], budget: Optional[int] = None) -> ModuleZigzag:
    if not X.ring.is_integers:
        raise PreconditionError("the module zigzag runs over Z")
    if len(x) != X.gens:
        raise ValueError(f"element needs {X.gens} coordinates")
    g = X.gens
    rel = X.lattice.T           # g x k, injective
    k = rel.ncols
    B0, B1 = set(_support(x)), set()
    history = [SweepRecord(0, "start", 0, tuple(sorted(B0)))]
    sweep = 0
    while True:
        sweep += 1
        changed = False
        # kernels: y with rel * y supported on B0 must be supported on B1
        outside = [i for i in range(g) if i not in B0]
        L = kernel_basis(rel.select_rows(outside)) if outside else IntMatrix.identity(k)
        need = set()
        for y in L.columns():
            need |= _support(y)
        new = need - B1
        if new:
            B1 |= new
            changed = True
            history.append(SweepRecord(sweep, "kernels", 1, tuple(sorted(new))))
        # images: rel(B1) inside span(B0)
        need = set()
        for j in B1:
            need |= _support(rel.column(j))
        new = need - B0
        if new:
            B0 |= new
            changed = True
            history.append(SweepRecord(sweep, "images", 0, tuple(sorted(new))))
        if not changed:
            break
    s0, s1 = tuple(sorted(B0)), tuple(sorted(B1))
    G = _unit_columns(s0, g)
    sub, inc = fgmod.submodule(X, G, True)
    Q = Presentation(X.ring, g, vstack(X.relations, G.T))
    sz = sub.gens
    return ModuleZigzag(X, tuple(x), budget, rel, s0, s1, sub, inc, Q, sz,
                        budget is not None and sz > budget, history)


def verify_module_zigzag(z: ModuleZigzag) -> list[str]:
    """Independent re-check; returns a list of problems (empty when fine)."""
    problems = []
    X, rel = z.module, z.relation_map
    g = X.gens
    if fgmod.in_submodule(X, z.inclusion, list(z.element)) is None:
        problems.append("element is not in the submodule")
    comp0 = [i for i in range(g) if i not in z.selected0]
    comp1 = [j for j in range(rel.ncols) if j not in z.selected1]
    if any(rel.rows[i][j] for i in comp0 for j in z.selected1):
        problems.append("chosen relations leave the chosen generators")
    sub_res = Presentation(X.ring, len(z.selected0), rel.select_rows(z.selected0).select_cols(z.selected1).T)
    if not fgmod.isomorphic(sub_res, z.sub):
        problems.append("chosen pieces do not present the submodule")
    q_res = Presentation(X.ring, len(comp0), rel.select_rows(comp0).select_cols(comp1).T)
    if not fgmod.isomorphic(q_res, z.quotient):
        problems.append("complementary pieces do not present the quotient")
    if not fgmod.is_injective(ModuleMap(z.sub, X, z.inclusion)):
        problems.append("inclusion is not injective")
    return problems


# ---------------------------------------------------------------------------
# complexes over Z

@dataclass
class ZigzagCertificate:
    """Everything needed to re-check a zigzag extraction from scratch.

    `selected[j]` holds disk indices of stage j of `tower`; the generators
    they contribute in each degree come from `selected_generators`.
    """

    ambient: ChainComplex
    element: Element
    n: int
    budget: Optional[int]
    tower: ResolutionTower
    selected: list[tuple[int, ...]]
    sub: Subcomplex
    quotient: ChainComplex
    sub_tower: ResolutionTower
    quotient_tower: ResolutionTower
    size: int
    budget_exceeded: bool
    history: list[SweepRecord] = field(default_factory=list)

    def selected_generators(self, j: int, m: int) -> list[int]:
        chosen = set(self.selected[j])
        lay = self.tower.stages[j].basis.layout(m)
        return [k for k, (i, _) in enumerate(lay) if i in chosen]


def _stage_target(tower: ResolutionTower, j: int) -> ChainComplex:
    return tower.target if j == 0 else tower.stages[j - 1].complex


def _restricted_kernel(f: ChainMap, S: IntMatrix, m: int) -> list[list[int]]:
    """Generators of ker(f_m) on the span of the columns of S, in source coordinates."""
    target = f.target.module(m)
    src = fgmod.free(S.ncols, f.source.ring)
    K = fgmod._kernel_generators(ModuleMap(src, target, f.component(m) @ S))
    return [S.apply(c) for c in K.columns()]


def _closure(tower: ResolutionTower, x: Element) -> tuple[list[set[int]], list[SweepRecord]]:
    stages = tower.stages
    L = len(stages) - 1
    basis0 = stages[0].basis
    f0 = stages[0].map
    y = solve(vstack(f0.component(x.degree).T, tower.target.module(x.degree).full_relations).T,
              list(x.coords))
    if y is None:
        raise PreconditionError("element is not hit by the first stage of the tower")
    n0 = stages[0].complex.gens(x.degree)
    sel = [set() for _ in stages]
    sel[0] = {basis0.disk_of_generator(x.degree, k) for k in _support(y[:n0])}
    history = [SweepRecord(0, "start", 0, tuple(sorted(sel[0])))]
    sweep = 0
    while True:
        sweep += 1
        changed = False
        for j in range(L, 0, -1):
            P, f = stages[j], stages[j].map
            prev = stages[j - 1].basis
            need = set()
            for i in sel[j]:
                n = P.basis.disks[i]
                for m, role in ((n, "top"), (n - 1, "bottom")):
                    col = f.component(m).column(P.basis.position(i, role))
                    need |= {prev.disk_of_generator(m, k) for k in _support(col)}
            new = need - sel[j - 1]
            if new:
                sel[j - 1] |= new
                changed = True
                history.append(SweepRecord(sweep, "images", j - 1, tuple(sorted(new))))
        for j in range(L):
            P, f = stages[j], stages[j].map
            nxt = stages[j + 1]
            g = nxt.map
            need = set()
            for m in P.complex.degrees:
                S = P.basis.span_columns(sel[j], m)
                if not S.ncols:
                    continue
                prefer = {k for k, (i, _) in enumerate(nxt.basis.layout(m)) if i in sel[j + 1]}
                for w in _restricted_kernel(f, S, m):
                    pre = _preferred_solve(g.component(m), w, prefer)
                    if pre is None:
                        raise AssertionError("tower is not exact; kernel element has no preimage")
                    need |= {nxt.basis.disk_of_generator(m, k) for k in _support(pre)}
            new = need - sel[j + 1]
            if new:
                sel[j + 1] |= new
                changed = True
                history.append(SweepRecord(sweep, "kernels", j + 1, tuple(sorted(new))))
        if not changed:
            return sel, history


def _restrict(f: ChainMap, src: ChainComplex, dst: ChainComplex, rows_of, cols_of) -> ChainMap:
    comps = {}
    for m in src.degrees:
        comps[m] = f.component(m).select_rows(rows_of(m)).select_cols(cols_of(m))
    return ChainMap(src, dst, comps, check=False)


def _chosen(basis, chosen: set[int], m: int, keep: bool) -> list[int]:
    return [k for k, (i, _) in enumerate(basis.layout(m)) if (i in chosen) == keep]


def _split_towers(tower: ResolutionTower, sel: list[set[int]], sub: Subcomplex,
                  Q: ChainComplex) -> tuple[ResolutionTower, ResolutionTower]:
    """The chosen spans as a tower over X', the complements as a tower over X / X'."""
    X = tower.target
    sub_stages, q_stages = [], []
    for j, st in enumerate(tower.stages):
        b = st.basis
        inner = sorted(sel[j])
        outer = [i for i in range(len(b.disks)) if i not in sel[j]]
        sb, qb = b.sub_basis(inner), b.sub_basis(outer)
        sc, qc = sb.complex(), qb.complex()
        if j == 0:
            comps = {}
            for m in sc.degrees:
                image = st.map.component(m).select_cols(_chosen(b, sel[0], m, True))
                C = fgmod.express(X.module(m), sub.incl(m), image)
                if C is None:
                    raise AssertionError("bottom span does not land in X'")
                comps[m] = C
            sub_map = ChainMap(sc, sub.complex, comps, check=False)
            q_map = _restrict(st.map, qc, Q, lambda m: range(X.gens(m)),
                              lambda m, b=b: _chosen(b, sel[0], m, False))
        else:
            pb = tower.stages[j - 1].basis
            psc, pqc = sub_stages[-1].complex, q_stages[-1].complex
            sub_map = _restrict(st.map, sc, psc, lambda m, pb=pb, s=sel[j - 1]: _chosen(pb, s, m, True),
                                lambda m, b=b, s=sel[j]: _chosen(b, s, m, True))
            q_map = _restrict(st.map, qc, pqc, lambda m, pb=pb, s=sel[j - 1]: _chosen(pb, s, m, False),
                              lambda m, b=b, s=sel[j]: _chosen(b, s, m, False))
        sub_stages.append(Stage(sc, sb, sub_map))
        q_stages.append(Stage(qc, qb, q_map))
    return ResolutionTower(sub.complex, sub_stages), ResolutionTower(Q, q_stages)


def zigzag_complex(X: ChainComplex, x: Element, n: int, budget: Optional[int] = None,
                   tower: Optional[ResolutionTower] = None) -> ZigzagCertificate:
    """Extract a subcomplex X' containing x with X' and X / X' both n-projective.

    The budget is soft: the closure is always returned, flagged when its
    size (minimal generator count) goes over the budget.
    """
    if not is_n_projective_complex(X, n):
        raise PreconditionError(f"complex is not exact with cycles of projective dimension <= {n}")
    if tower is None:
        tower = resolve_complex(X, max(n, 1), cover_first=True)
    if not tower.complete:
        raise PreconditionError("resolution tower did not terminate")
    sel, history = _closure(tower, x)
    f0, b0 = tower.stages[0].map, tower.stages[0].basis
    gens = {m: f0.component(m) @ b0.span_columns(sel[0], m) for m in X.degrees}
    sub = induced_subcomplex(X, gens, simplify_result=True)
    Q, _ = quotient(X, sub)
    sub_tower, q_tower = _split_towers(tower, sel, sub, Q)
    sz = complex_size(sub.complex)
    return ZigzagCertificate(X, x, n, budget, tower, [tuple(sorted(s)) for s in sel], sub, Q,
                             sub_tower, q_tower, sz, budget is not None and sz > budget, history)


def verify_certificate(cert: ZigzagCertificate) -> list[str]:
    """Re-check a certificate without trusting any of its derived fields."""
    problems = []
    X, tower = cert.ambient, cert.tower
    if not cert.sub.contains(cert.element):
        problems.append("element is not in X'")
    if not validate(cert.sub.complex).ok or not cert.sub.validate().ok:
        problems.append("X' is not a subcomplex")
    for j, chosen in enumerate(cert.selected):
        if not set(chosen) <= set(range(len(tower.stages[j].basis.disks))):
            problems.append(f"stage {j}: selection out of range")
    for j in range(1, len(tower.stages)):
        st, prev = tower.stages[j], tower.stages[j - 1]
        inside = set(cert.selected[j - 1])
        for m in st.complex.degrees:
            S = st.basis.span_columns(cert.selected[j], m)
            img = st.map.component(m) @ S
            for r in range(img.nrows):
                if any(img.rows[r]) and prev.basis.disk_of_generator(m, r) not in inside:
                    problems.append(f"stage {j}, degree {m}: chosen span leaves the chosen span below")
                    break
    for label, T in (("X'", cert.sub_tower), ("X/X'", cert.quotient_tower)):
        chk = verify_tower(T)
        problems += [f"{label} tower: {p}" for p in chk.problems]
    Q, _ = quotient(X, cert.sub)
    if not _same_presentations(Q, cert.quotient):
        problems.append("stored quotient differs from X / X'")
    if not is_n_projective_complex(cert.sub.complex, cert.n):
        problems.append(f"X' is not exact with cycles of projective dimension <= {cert.n}")
    if not is_n_projective_complex(Q, cert.n):
        problems.append(f"X/X' is not exact with cycles of projective dimension <= {cert.n}")
    sz = complex_size(cert.sub.complex)
    if sz != cert.size:
        problems.append("recorded size is wrong")
    if cert.budget is not None and (sz > cert.budget) != cert.budget_exceeded:
        problems.append("budget flag is wrong")
    return problems


def _same_presentations(A: ChainComplex, B: ChainComplex) -> bool:
    """Same generators, same boundaries, same relation lattices."""
    if A.degrees != B.degrees:
        return False
    for m in A.degrees:
        if A.gens(m) != B.gens(m) or A.module(m).lattice != B.module(m).lattice:
            return False
        if A.d(m) != B.d(m):
            return False
    return True


# ---------------------------------------------------------------------------
# filtrations

@dataclass
class FiltrationStep:
    """X_{a+1} inside X, the factor X_{a+1}/X_a, and the extractions that built it."""

    stage: Subcomplex
    factor: ChainComplex
    pieces: list[ZigzagCertificate]
    size: int
    budget_exceeded: bool


@dataclass
class Filtration:
    """0 = X_0 < X_1 < ... < X_t = X with every factor n-projective."""

    ambient: ChainComplex
    n: int
    budget: Optional[int]
    steps: list[FiltrationStep]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def stages(self) -> list[Subcomplex]:
        return [s.stage for s in self.steps]

    def factor_sizes(self) -> list[int]:
        return [s.size for s in self.steps]

    @property
    def budget_exceeded(self) -> bool:
        return any(s.budget_exceeded for s in self.steps)


def _live_generators(Q: ChainComplex) -> list[Element]:
    """Generators nonzero in Q, ordered by degree descending, then index."""
    out = []
    for m in reversed(Q.degrees):
        M = Q.module(m)
        for k in range(M.gens):
            e = [int(i == k) for i in range(M.gens)]
            if not M.is_zero_element(e):
                out.append(Element(m, tuple(M.reduce(e))))
    return out


def _factor(X: ChainComplex, lower: Optional[Subcomplex], gens: dict) -> ChainComplex:
    Qa = X if lower is None else quotient(X, lower)[0]
    return induced_subcomplex(Qa, gens, simplify_result=True).complex


def coordinate_blocks(X: ChainComplex) -> list[dict[int, list[int]]]:
    """Split the generators of X into blocks no boundary entry or relation crosses.

    Each block spans a direct summand of X as presented.  Blocks are listed
    in order of their lowest generator (degree descending, then index).
    """
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb, key=_order_key)] = min(ra, rb, key=_order_key)

    for m in X.degrees:
        for i in range(X.gens(m)):
            parent[(m, i)] = (m, i)
    for m in X.degrees:
        for row in X.module(m).relations.rows:
            support = [i for i, v in enumerate(row) if v]
            for i in support[1:]:
                union((m, support[0]), (m, i))
        if m - 1 in X.degrees:
            for r, row in enumerate(X.d(m).rows):
                for c, v in enumerate(row):
                    if v:
                        union((m - 1, r), (m, c))
    groups: dict[tuple[int, int], dict[int, list[int]]] = {}
    for key in sorted(parent, key=_order_key):
        groups.setdefault(find(key), {}).setdefault(key[0], []).append(key[1])
    return [groups[r] for r in sorted(groups, key=_order_key)]


def _order_key(key: tuple[int, int]) -> tuple[int, int]:
    return (-key[0], key[1])


def _block_size(X: ChainComplex, block: dict[int, list[int]]) -> int:
    gens = {m: IntMatrix.from_columns([[int(r == i) for r in range(X.gens(m))] for i in idx], X.gens(m))
            for m, idx in block.items()}
    return complex_size(induced_subcomplex(X, gens, simplify_result=True).complex)


def _plan(X: ChainComplex, budget: Optional[int]) -> list[list[dict[int, list[int]]]]:
    """Group blocks into units; each unit is filled by one or more steps.

    Blocks within the budget are packed first-fit by decreasing size; a
    block over the budget is a unit of its own and is split by extraction.
    """
    blocks = [b for b in coordinate_blocks(X)
              if any(not X.module(m).is_zero_element([int(r == i) for r in range(X.gens(m))])
                     for m, idx in b.items() for i in idx)]
    if budget is None:
        return [blocks] if blocks else []
    sizes = [_block_size(X, b) for b in blocks]
    units: list[list[int]] = []
    room: list[int] = []
    for i in sorted(range(len(blocks)), key=lambda i: -sizes[i]):
        if sizes[i] > budget:
            units.append([i])
            room.append(-1)
            continue
        for u, r in enumerate(room):
            if sizes[i] <= r:
                units[u].append(i)
                room[u] -= sizes[i]
                break
        else:
            units.append([i])
            room.append(budget - sizes[i])
    units.sort(key=min)
    return [[blocks[i] for i in sorted(u)] for u in units]


def build_filtration(X: ChainComplex, n: int, budget: Optional[int] = None,
                     pack: bool = True) -> Filtration:
    """Grow X_1, X_2, ... by extracting from the running quotient and lifting back.

    Each step starts from the lowest live generator of X / X_a.  With pack
    (and a budget) further extractions are merged into the same step as long
    as the factor X_{a+1}/X_a stays within the budget; a single extraction
    over budget still forms a step, flagged.  Packing is planned on the
    direct-summand blocks of X so that a step does not split a block it
    could have taken whole.
    """
    if not is_n_projective_complex(X, n):
        raise PreconditionError(f"complex is not exact with cycles of projective dimension <= {n}")
    steps: list[FiltrationStep] = []
    acc = {m: IntMatrix.zeros(X.gens(m), 0) for m in X.degrees}
    lower: Optional[Subcomplex] = None
    limit = complex_size(X) + 1
    packing = pack and budget is not None
    units = _plan(X, budget) if packing else [None]
    for unit in units:
        allowed = None if unit is None else {(m, i) for b in unit for m, idx in b.items() for i in idx}

        def live(Q):
            return [x for x in _live_generators(Q)
                    if allowed is None or all((x.degree, i) in allowed for i, c in enumerate(x.coords) if c)]

        while True:
            Q = X if lower is None else quotient(X, lower)[0]
            if not live(Q):
                break
            if len(steps) >= limit:
                raise AssertionError("filtration did not terminate")
            pieces: list[ZigzagCertificate] = []
            cur, factor = dict(acc), None
            rejected: set[Element] = set()
            while True:
                Qc = X if not any(M.ncols for M in cur.values()) else \
                    quotient(X, induced_subcomplex(X, cur, simplify_result=False))[0]
                cands = [x for x in live(Qc) if x not in rejected]
                if not cands:
                    break
                x = cands[0]
                cert = zigzag_complex(Qc, x, n, budget)
                trial = {m: hstack(cur[m], cert.sub.incl(m)) for m in X.degrees}
                fac = _factor(X, lower, trial)
                if pieces and complex_size(fac) > budget:
                    rejected.add(x)
                    continue
                pieces.append(cert)
                cur, factor = trial, fac
                if not packing:
                    break
            acc = cur
            lower = induced_subcomplex(X, acc, simplify_result=False)
            sz = complex_size(factor)
            steps.append(FiltrationStep(lower, factor, pieces, sz, budget is not None and sz > budget))
    if lower is not None and _live_generators(quotient(X, lower)[0]):
        raise AssertionError("filtration stopped before exhausting X")
    return Filtration(X, n, budget, steps)


def verify_filtration(F: Filtration) -> list[str]:
    """Nesting, membership and budget of every factor, and X_t = X."""
    problems = []
    X = F.ambient
    prev: Optional[Subcomplex] = None
    for a, step in enumerate(F.steps):
        S = step.stage
        if not S.validate().ok:
            problems.append(f"X_{a + 1} is not a subcomplex")
        if prev is not None:
            for m in X.degrees:
                if fgmod.express(X.module(m), S.incl(m), prev.incl(m)) is None:
                    problems.append(f"X_{a} is not inside X_{a + 1}")
                    break
        piece = _factor(X, prev, {m: S.incl(m) for m in X.degrees})
        if not is_n_projective_complex(piece, F.n):
            problems.append(f"factor {a + 1} is not exact with cycles of projective dimension <= {F.n}")
        sz = complex_size(piece)
        if F.budget is not None and sz > F.budget and not step.budget_exceeded:
            problems.append(f"factor {a + 1} is over budget without a flag")
        prev = S
    if prev is None:
        if any(not X.module(m).is_zero() for m in X.degrees):
            problems.append("empty filtration of a nonzero complex")
    else:
        for m in X.degrees:
            if fgmod.express(X.module(m), prev.incl(m), IntMatrix.identity(X.gens(m))) is None:
                problems.append(f"last stage misses degree {m}")
                break
    return problems
