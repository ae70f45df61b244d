"""Command-line front end.

Exit codes: 0 ok, 1 mathematical "no", 2 input error, 3 precondition
violated, 4 result flagged as over budget.
"""
from __future__ import annotations

import argparse
import sys
from typing import Callable, Optional, Sequence

from . import fgmod, io
from .complex import Element, InvalidComplex, homology_all, is_exact, validate
from .fgmod import Presentation
from .linalg import IntMatrix
from .maps import InvalidChainMap

OK, NO, INPUT, PRECONDITION, BUDGET = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _complex(path: str, with_elements: bool = False):
    return io.complex_from_obj(io.read_file(path), with_elements)


def _module_or_complex(path: str):
    obj = io.read_file(path)
    if obj.get("kind") == "module":
        return io.module_from_obj(obj)
    return io.complex_from_obj(obj)


def _fmt_matrix(M: IntMatrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in M.rows) + "]"


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report lines)

def cmd_validate(a) -> tuple[int, list[str]]:
    obj = io.read_file(a.file)
    X = io.complex_from_obj(obj)   # raises InvalidComplex on d o d != 0
    rep = validate(X)
    lines = [f"ring: {X.ring}", f"degrees: {X.max_deg} .. {X.min_deg}"]
    for m in reversed(X.degrees):
        lines.append(f"  degree {m}: {fgmod.invariants(X.module(m))}  gens={X.gens(m)}")
    lines.append("valid" if rep.ok else "invalid")
    return (OK if rep.ok else INPUT), lines


def cmd_homology(a):
    X = _complex(a.file)
    H = homology_all(X)
    lines = [f"H_{m} = {H[m]}" for m in sorted(H, reverse=True)]
    lines.append("all homology vanishes" if all(h.is_zero for h in H.values()) else "nonzero homology")
    return OK, lines


def cmd_exact(a):
    X = _complex(a.file)
    ok = is_exact(X)
    return (OK if ok else NO), [f"exact: {'yes' if ok else 'no'}"]


def cmd_pd(a):
    from .resolve import EXCEEDS, pd_complex
    obj = _module_or_complex(a.file)
    if isinstance(obj, Presentation):
        d = fgmod.pd(obj)
        return OK, [f"module {fgmod.invariants(obj)} over {obj.ring}", f"pd = {'inf' if d == fgmod.INFINITY else d}"]
    d = pd_complex(obj, a.max_len, method=a.method)
    if d == EXCEEDS:
        return NO, [f"pd exceeds {a.max_len}"]
    return OK, [f"pd = {d}"]


def cmd_membership(a):
    from .complex import cycles
    from .resolve import is_n_projective_complex
    X = _complex(a.file)
    exact = is_exact(X)
    lines = [f"exact: {'yes' if exact else 'no'}"]
    for m in reversed(X.degrees):
        Z = cycles(X, m)
        d = fgmod.pd(Z)
        lines.append(f"  Z_{m} = {fgmod.invariants(Z)}  pd = {'inf' if d == fgmod.INFINITY else d}")
    ok = is_n_projective_complex(X, a.n)
    lines.append(f"exact with cycles of pd <= {a.n}: {'yes' if ok else 'no'}")
    return (OK if ok else NO), lines


def _tower_lines(T) -> list[str]:
    lines = [f"length: {T.length}", f"complete: {'yes' if T.complete else 'no'}"]
    for j, st in enumerate(T.stages):
        lines.append(f"stage {j}: disks (top degrees) {list(st.basis.disks)}")
        for m in sorted(st.map.degrees, reverse=True):
            if st.complex.gens(m) and st.map.target.gens(m):
                lines.append(f"  map degree {m}: {_fmt_matrix(st.map.component(m))}")
    return lines


def cmd_resolve(a):
    from .resolve import resolve_complex, verify_tower
    X = _complex(a.file)
    T = resolve_complex(X, a.max_len)
    lines = _tower_lines(T)
    if T.complete:
        chk = verify_tower(T)
        lines.append("tower re-check: " + ("ok" if chk.ok else "; ".join(chk.problems)))
        return (OK if chk.ok else NO), lines
    lines.append(f"no resolution of length <= {a.max_len}")
    return NO, lines


def cmd_ext1(a):
    from .resolve import ext1_complex
    A, B = _module_or_complex(a.first), _module_or_complex(a.second)
    if isinstance(A, Presentation) != isinstance(B, Presentation):
        raise CliError("ext1 needs two modules or two complexes", INPUT)
    E = fgmod.ext1(A, B) if isinstance(A, Presentation) else ext1_complex(A, B)
    return OK, [f"Ext^1 = {E}"]


def _parse_element(X, elements: dict, text: str) -> Element:
    if text in elements:
        return elements[text]
    try:
        deg, coords = text.split(":")
        vals = [int(c) for c in coords.split(",") if c.strip()]
        return Element.of(X, int(deg), vals)
    except ValueError as e:
        raise CliError(f"element {text!r}: give a name from the file or degree:c1,c2,...", INPUT) from e


def cmd_zigzag(a):
    from .zigzag import verify_certificate, zigzag_complex
    X, elements = _complex(a.file, with_elements=True)
    x = _parse_element(X, elements, a.element)
    cert = zigzag_complex(X, x, a.n, a.budget)
    lines = [f"element: degree {x.degree}, coords {list(x.coords)}"]
    for j, sel in enumerate(cert.selected):
        lines.append(f"stage {j}: selected disks {list(sel)} of {len(cert.tower.stages[j].basis.disks)}")
        for m in sorted(cert.tower.stages[j].complex.degrees, reverse=True):
            g = cert.selected_generators(j, m)
            if g:
                lines.append(f"  degree {m}: generators {g}")
    S = cert.sub
    lines.append(f"subcomplex size: {cert.size} (ambient {sum(X.gens(m) for m in X.degrees)})")
    for m in sorted(S.inclusion, reverse=True):
        lines.append(f"  degree {m}: {fgmod.invariants(S.complex.module(m))}  inclusion {_fmt_matrix(S.incl(m))}")
    lines.append("quotient:")
    for m in reversed(cert.quotient.degrees):
        lines.append(f"  degree {m}: {fgmod.invariants(cert.quotient.module(m))}")
    if a.audit:
        lines.append("audit:")
        for h in cert.history:
            lines.append(f"  sweep {h.sweep} {h.direction} stage {h.stage}: added {list(h.added)}")
    problems = verify_certificate(cert)
    lines.append("certificate re-check: " + ("ok" if not problems else "; ".join(problems)))
    if cert.budget_exceeded:
        lines.append(f"budget {a.budget} exceeded by the minimal closure")
        return BUDGET, lines
    return (OK if not problems else NO), lines


def cmd_filtrate(a):
    from .zigzag import build_filtration, verify_filtration
    X = _complex(a.file)
    F = build_filtration(X, a.n, a.budget)
    lines = [f"length: {F.length}"]
    for i, st in enumerate(F.steps, 1):
        fac = st.factor
        groups = ", ".join(f"{m}: {fgmod.invariants(fac.module(m))}" for m in reversed(fac.degrees))
        flag = "  OVER BUDGET" if st.budget_exceeded else ""
        lines.append(f"factor {i}: size {st.size}  [{groups}]{flag}")
        for m in sorted(st.stage.inclusion, reverse=True):
            lines.append(f"  X_{i} degree {m}: {_fmt_matrix(st.stage.incl(m))}")
    problems = verify_filtration(F)
    lines.append("filtration re-check: " + ("ok" if not problems else "; ".join(problems)))
    if problems:
        return NO, lines
    return (BUDGET if F.budget_exceeded else OK), lines


def cmd_tensor(a):
    from .tensorx import bar_tensor, tensor
    X, Y = _complex(a.first), _complex(a.second)
    if a.bar:
        T, index = bar_tensor(X, Y), None
    else:
        tc = tensor(X, Y)
        T, index = tc.result, tc.summand_index
    lines = []
    for m in reversed(T.degrees):
        blocks = ""
        if index is not None:
            blocks = "  blocks " + " ".join(f"({b.left},{b.right})" for b in index[m])
        lines.append(f"degree {m}: {fgmod.invariants(T.module(m))}  gens={T.gens(m)}{blocks}")
    for m in reversed(T.degrees):
        if m - 1 in T.degrees:
            lines.append(f"boundary {m} -> {m - 1}: {_fmt_matrix(T.d(m))}")
    H = homology_all(T)
    lines += [f"H_{m} = {H[m]}" for m in sorted(H, reverse=True)]
    lines.append(f"exact: {'yes' if is_exact(T) else 'no'}")
    return OK, lines


def cmd_classify(a):
    from .model import classify
    f = io.map_from_obj(io.read_file(a.file))
    c = classify(f, a.n)
    lines = [f"mono: {c.mono}", f"epi: {c.epi}", f"weak equivalence: {c.weak_equiv}",
             f"cofibration: {c.cofibration}", f"trivial cofibration: {c.trivial_cofibration}",
             f"fibration: {c.fibration}", f"trivial fibration: {c.trivial_fibration}"]
    for k, v in c.evidence.items():
        lines.append(f"  {k}: {v}")
    return OK, lines


def _window(s: str) -> range:
    try:
        lo, hi = (int(t) for t in s.split(":"))
    except ValueError as e:
        raise CliError("window must look like lo:hi", INPUT) from e
    return range(lo, hi + 1)


def cmd_gensets(a):
    from .model import generating_sets
    samples = [fgmod.cyclic(int(d)) for d in a.samples.split(",") if d.strip()] if a.samples else []
    I, J = generating_sets(a.n, _window(a.window), samples)
    lines = []
    for gs in (I, J):
        lines.append(f"{gs.label}: {len(gs)} maps")
        for tag, f in gs.maps:
            comps = "; ".join(f"{m}: {_fmt_matrix(f.component(m))}" for m in sorted(f.degrees, reverse=True)
                              if f.source.gens(m) and f.target.gens(m))
            lines.append(f"  {tag}" + (f"  [{comps}]" if comps else ""))
    return OK, lines


def cmd_counterexample(a):
    from .tensorx import counterexample_report
    rep = counterexample_report(a.n)
    return (OK if rep.fails else NO), rep.lines()


def cmd_oracle_ext(a):
    from .oracle import ext1_bruteforce
    A, B = (io.module_from_obj(io.read_file(p)) for p in (a.first, a.second))
    if A.ring.is_integers or B.ring.is_integers:
        raise CliError("enumeration needs finite modules over Z/m", INPUT)
    rep = ext1_bruteforce(A, B, cap=a.cap)
    lines = [f"classes: {rep.count}", f"structures enumerated: {rep.structures}",
             f"split class size: {rep.split_class_size}", "representatives (relation values):"]
    lines += [f"  {list(beta)}" for beta in rep.representatives]
    E = fgmod.ext1(A, B)
    order = E.order()
    lines.append(f"resolution method: Ext^1 = {E} (order {order})")
    return (OK if order == rep.count else NO), lines


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chainkit", description="Exact homological algebra over Z and Z/m.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "parse and validate a complex").add_argument("file")
    add("homology", cmd_homology, "homology in every degree").add_argument("file")
    add("exact", cmd_exact, "is the complex exact").add_argument("file")
    sp = add("pd", cmd_pd, "projective dimension of a module or complex")
    sp.add_argument("file")
    sp.add_argument("--max-len", type=int, default=3)
    sp.add_argument("--method", choices=["cycles", "tower"], default="cycles")
    sp = add("membership", cmd_membership, "exact with cycles of pd <= n")
    sp.add_argument("file")
    sp.add_argument("--n", type=int, required=True)
    sp = add("resolve", cmd_resolve, "resolution by disk sums")
    sp.add_argument("file")
    sp.add_argument("--max-len", type=int, default=3)
    sp = add("ext1", cmd_ext1, "Ext^1 of two modules or two complexes")
    sp.add_argument("first")
    sp.add_argument("second")
    sp = add("zigzag", cmd_zigzag, "extract a small subcomplex around an element")
    sp.add_argument("file")
    sp.add_argument("--element", required=True)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--audit", action="store_true")
    sp = add("filtrate", cmd_filtrate, "filtration with n-projective factors")
    sp.add_argument("file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=int, default=None)
    sp = add("tensor", cmd_tensor, "tensor product of two complexes")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--bar", action="store_true")
    sp = add("classify", cmd_classify, "classify a chain map")
    sp.add_argument("file")
    sp.add_argument("--n", type=int, required=True)
    sp = add("gensets", cmd_gensets, "generating monomorphisms over a window")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--window", required=True)
    sp.add_argument("--samples", default="", help="comma-separated cyclic orders, e.g. 2,3")
    sp = add("counterexample", cmd_counterexample, "products of a cofibration and a trivial cofibration")
    sp.add_argument("--n", type=int, default=1)
    sp = add("oracle-ext", cmd_oracle_ext, "count extensions by enumeration")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--cap", type=int, default=256)
    return p


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str]:
    from .oracle import OracleRefused
    from .resolve import PreconditionError
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return (OK if e.code == 0 else INPUT), ""
    try:
        code, lines = args.fn(args)
    except CliError as e:
        return e.code, f"error: {e}\n"
    except InvalidComplex as e:
        where = f" (degree {e.degree})" if e.degree is not None else ""
        return INPUT, f"invalid complex{where}: {e}\n"
    except (io.FormatError, InvalidChainMap, fgmod.InvalidMap, fgmod.RingMismatch) as e:
        return INPUT, f"input error: {e}\n"
    except (PreconditionError, OracleRefused) as e:
        return PRECONDITION, f"precondition: {e}\n"
    return code, "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run(argv)
    stream = sys.stdout if code in (OK, NO, BUDGET) else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
