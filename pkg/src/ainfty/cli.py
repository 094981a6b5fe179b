"""Command line driver: ``python -m ainfty <command> ...``.

Exit codes: 0 when every check passes, 1 when a mathematical invariant fails
(the first witness is printed), 2 for unusable input.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Sequence, TextIO

from . import ais
from .algebra import (
    AInfinity,
    Report,
    stasheff_defect,
    verify_ainfty,
    verify_cyclic_morphism,
    verify_cyclicity,
    verify_morphism,
)
from .maurer_cartan import mc_solve
from .ncgeom import (
    CovariantSymplectic,
    NCGeometryError,
    const_bracket,
    cov_bracket,
    darboux,
    pullback_form,
)
from .poly import NCPoly
from .scalars import format_scalar
from .splitting import SplittingError, build_splitting, omega_compatible_splitting, verify_split
from .transfer import TransferError, amplitude, cyclic_transfer, transfer
from .trees import cyclic_classes, enumerate_trees

__all__ = ["main", "run"]

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Usable-input problem discovered after parsing (missing section, bad flag value)."""


class _Out:
    def __init__(self, stream: TextIO, verbose: bool) -> None:
        self.stream = stream
        self.verbose = verbose
        self.failed = False

    def line(self, text: str = "") -> None:
        self.stream.write(text + "\n")

    def check(self, label: str, report: Report, detail: Callable[[], str] | None = None) -> None:
        self.line(f"{label}: {report.summary()}")
        if not report.passed:
            self.failed = True
            if self.verbose and detail is not None:
                self.line(detail())

    def flag(self, label: str, ok: bool, witness: str = "") -> None:
        self.line(f"{label}: {'PASS' if ok else 'FAIL'}" + (f"; {witness}" if witness and not ok else ""))
        if not ok:
            self.failed = True


def _load(path: str) -> ais.SpecFile:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return ais.loads(data)


def _words(p: NCPoly) -> list[str]:
    return [f"{e['coeff']} [{' '.join(e['word'])}]" for e in ais._poly_entries(p)]


def _stasheff_detail(A: AInfinity, n_max: int) -> Callable[[], str]:
    def go() -> str:
        return "\n".join(f"  defect n={n}: {stasheff_defect(A, n)!r}" for n in range(1, n_max + 1))
    return go


def _splitting_for(spec: ais.SpecFile, cyclic: bool, out: _Out):
    A = spec.algebra
    omega = spec.omega if cyclic else None
    supplied = spec.splitting()
    if supplied is not None:
        rep = verify_split(supplied, A, omega)
        out.check("splitting (supplied)", rep)
        if not rep.passed:
            return None
        if cyclic:
            from dataclasses import replace
            supplied = replace(supplied, omega_compatible=True)
        return supplied
    try:
        split = omega_compatible_splitting(A, spec.omega) if cyclic else build_splitting(A)
    except SplittingError as exc:
        out.flag("splitting (computed)", False, str(exc))
        return None
    out.check("splitting (computed)", verify_split(split, A, omega))
    return split


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args, out: _Out) -> None:
    spec = _load(args.file)
    A = spec.algebra
    n_max = args.max_arity or A.max_arity
    out.line(f"file: {os.path.basename(args.file)} ({A.basis.dim} basis elements, {spec.field}, max arity {A.max_arity})")
    if args.cyclic and spec.omega is None:
        raise InputError("--cyclic needs an omega section")
    out.check(f"stasheff n<={n_max}", verify_ainfty(A, n_max), _stasheff_detail(A, n_max))
    if spec.omega is not None:
        out.check(f"cyclicity n<={n_max}", verify_cyclicity(spec.omega, A, n_max))
    if spec.qplus is not None:
        out.check("splitting", verify_split(spec.splitting(), A, spec.omega if args.cyclic else None))
    if spec.morphism is not None:
        tgt = spec.target
        k = n_max
        out.check(f"target stasheff n<={k}", verify_ainfty(tgt.algebra, k))
        out.check(f"morphism n<={k}", verify_morphism(spec.morphism, A, tgt.algebra, k))
        if spec.omega is not None and tgt.omega is not None:
            out.check(f"cyclic morphism n<={k}", verify_cyclic_morphism(spec.morphism, spec.omega, tgt.omega, k))
    for name, p in sorted(spec.polys.items()):
        out.flag(f"poly {name} cyclic", p.is_cyclic())
    if spec.two_form is not None:
        try:
            form = CovariantSymplectic(spec.two_form)
            out.line(f"two-form closed: {'yes' if form.is_closed() else 'no'}")
        except (NCGeometryError, ValueError) as exc:
            out.flag("two-form", False, str(exc))


def cmd_transfer(args, out: _Out) -> None:
    spec = _load(args.file)
    A = spec.algebra
    K = args.max_arity or 4
    if args.cyclic and spec.omega is None:
        raise InputError("--cyclic needs an omega section")
    report = out if args.out else _Out(args.stderr, args.verbose)
    split = _splitting_for(spec, args.cyclic, report)
    if split is None:
        out.failed = True
        return
    A = A if A.max_arity >= K else A.with_maps(A.maps, K)
    try:
        res = cyclic_transfer(A, spec.omega, split, K) if args.cyclic else transfer(A, split, K)
    except TransferError as exc:
        report.flag("transfer", False, str(exc))
        out.failed = True
        return
    report.line("H^p: " + ", ".join(res.minimal.basis.names))
    report.flag("recursion = tree sum", all(res.checks.values()) if res.checks else True)
    report.check(f"minimal stasheff n<={K}", verify_ainfty(res.minimal, K))
    report.check(f"morphism n<={K}", verify_morphism(res.morphism, res.minimal, A, K))
    if args.cyclic:
        report.check(f"minimal cyclicity n<={K}", verify_cyclicity(res.omega_p, res.minimal, K))
        report.check(f"cyclic morphism n<={K}", verify_cyclic_morphism(res.morphism, res.omega_p, spec.omega, K))
    out.failed = out.failed or report.failed
    target = ais.SpecFile(A, spec.field, spec.name, omega=spec.omega if args.cyclic else None)
    name = f"{spec.name}-minimal" if spec.name else None
    result = ais.SpecFile(res.minimal, spec.field, name, omega=res.omega_p, morphism=res.morphism, target=target)
    text = ais.dumps(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        out.line(f"wrote {os.path.basename(args.out)}")
    else:
        out.stream.write(text)


def cmd_amplitude(args, out: _Out) -> None:
    spec = _load(args.file)
    if spec.omega is None:
        raise InputError("amplitudes need an omega section")
    if args.n is None or args.n < 3:
        raise InputError("--n must be at least 3")
    A = spec.algebra
    if A.max_arity < args.n - 1:
        A = A.with_maps(A.maps, args.n - 1)
    split = _splitting_for(spec, True, out)
    if split is None:
        return
    try:
        rep = amplitude(A, spec.omega, split, args.n)
    except TransferError as exc:
        raise InputError(str(exc)) from None
    out.line(f"amplitude n={args.n} on H^p ({', '.join(split.harmonic.basis.names)}), one line per rotation class:")
    for line in _words(rep.minimal_vertex) or ["0"]:
        out.line("  " + line)
    out.flag("tree sum = cyclic class sum", rep.restricted_equal)
    out.flag("tree sum = omega(1 (x) m_p)", rep.minimal_equal)


def cmd_mc(args, out: _Out) -> None:
    spec = _load(args.file)
    if spec.mc_seed is None:
        raise InputError("mc needs an mc-seed section")
    N = args.order or 5
    A = spec.algebra
    split = _splitting_for(spec, False, out)
    if split is None:
        return
    try:
        phi, obstruction = mc_solve(A, split, spec.mc_seed.truncate(N), N)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    names = A.basis.names

    def fmt(e) -> str:
        return " + ".join(f"{format_scalar(c)}*{names[i]}" for i, c in sorted(e.coeffs.items())) or "0"

    for n in range(1, N + 1):
        out.line(f"hbar^{n}: Phi = {fmt(phi[n])}; obstruction = {fmt(obstruction[n])}")
    first = obstruction.first_nonzero()
    out.flag(f"unobstructed through hbar^{N}", first is None, f"first obstruction at hbar^{first}")


def cmd_darboux(args, out: _Out) -> None:
    spec = _load(args.file)
    if spec.two_form is None:
        raise InputError("darboux needs a two-form section")
    N = args.order or 4
    try:
        form = CovariantSymplectic(spec.two_form)
    except (NCGeometryError, ValueError) as exc:
        raise InputError(f"two-form: {exc}") from None
    if not form.is_closed():
        word = form.closedness_witness()
        names = " ".join(("d(" + spec.basis.names[i] + ")") if s else spec.basis.names[i] for i, s in word)
        out.flag("two-form closed", False, f"d Omega contains [{names}] at word length {len(word)}")
        return
    res = darboux(form, N)
    names = spec.basis.names
    for i in range(spec.basis.dim):
        terms = sorted(res.substitution.f.get(i, {}).items())
        body = "".join(f" + {format_scalar(c)}*{'.'.join(names[k] for k in w)}" for w, c in terms)
        out.line(f"{names[i]} -> {names[i]}{body}")
    pulled = pullback_form(res.substitution, form.form, N)
    out.flag(f"pullback constant through length {N}", all(len(w) == 2 for w in pulled.terms))


def cmd_bracket(args, out: _Out) -> None:
    spec = _load(args.file)
    left, right = args.pair or ("A", "B")
    for nm in (left, right):
        if nm not in spec.polys:
            raise InputError(f"no polynomial named {nm!r}")
    a, b = spec.polys[left], spec.polys[right]
    for nm, p in ((left, a), (right, b)):
        if not p.is_cyclic():  # pragma: no cover - parsed polys are cyclic by construction
            raise InputError(f"{nm} is not cyclic")
    if spec.two_form is not None:
        try:
            form = CovariantSymplectic(spec.two_form)
        except (NCGeometryError, ValueError) as exc:
            raise InputError(f"two-form: {exc}") from None
        N = args.order or 5
        result = cov_bracket(form, a, b, N)
        out.line(f"({left}, {right}) with the covariant form through length {N}:")
    elif spec.omega is not None:
        result = const_bracket(spec.omega, a, b)
        out.line(f"({left}, {right}) with the constant form:")
    else:
        raise InputError("bracket needs an omega or two-form section")
    for line in _words(result) or ["0"]:
        out.line("  " + line)


def cmd_trees(args, out: _Out) -> None:
    if args.n is not None:
        if args.n < 3:
            raise InputError("--n must be at least 3")
        classes = cyclic_classes(args.n)
        for c in classes:
            out.line(f"{c.representative.bracket()}  fiber {len(c.fiber)}  symmetric factor {format_scalar(c.symmetric_factor)}")
        out.line(f"{len(classes)} cyclic classes with {args.n} legs")
        return
    if args.k is None or args.k < 1:
        raise InputError("give --k K (rooted trees) or --n N (cyclic classes)")
    trees = enumerate_trees(args.k)
    for t in trees:
        out.line(t.bracket())
    out.line(f"{len(trees)} trees with {args.k} leaves")


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ainfty", description="Exact A-infinity algebra toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, file: bool = True) -> None:
        if file:
            p.add_argument("file", help="input .ais file")
        p.add_argument("--verbose", action="store_true", help="dump full defect tensors on failure")

    p = sub.add_parser("validate", help="check the Stasheff identities and every optional section")
    common(p)
    p.add_argument("--max-arity", type=int, help="check identities up to this arity (default: file max-arity)")
    p.add_argument("--cyclic", action="store_true", help="require omega and check compatibility")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("transfer", help="minimal model on the harmonic part")
    common(p)
    p.add_argument("--max-arity", type=int, help="highest transferred arity (default 4)")
    p.add_argument("--cyclic", action="store_true", help="use an omega-compatible splitting")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("amplitude", help="tree amplitude with n legs, three ways")
    common(p)
    p.add_argument("--n", type=int, required=True, help="number of external legs")
    p.set_defaults(func=cmd_amplitude)

    p = sub.add_parser("mc", help="solve the Maurer-Cartan equation from the file's seed")
    common(p)
    p.add_argument("--order", type=int, help="hbar order (default 5)")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("darboux", help="Darboux coordinates for the file's two-form")
    common(p)
    p.add_argument("--order", type=int, help="word length to normalize through (default 4)")
    p.set_defaults(func=cmd_darboux)

    p = sub.add_parser("bracket", help="bracket of two named polynomials")
    common(p)
    p.add_argument("--pair", nargs=2, metavar=("LEFT", "RIGHT"), help="polynomial names (default A B)")
    p.add_argument("--order", type=int, help="truncation for the covariant bracket (default 5)")
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("trees", help="list planar rooted trees or cyclic classes")
    common(p, file=False)
    p.add_argument("--k", type=int, help="number of leaves")
    p.add_argument("--n", type=int, help="number of legs of cyclic classes")
    p.set_defaults(func=cmd_trees)
    return parser


def run(argv: Sequence[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.stderr = stderr
    out = _Out(stdout, args.verbose)
    try:
        args.func(args, out)
    except ais.SpecError as exc:
        stderr.write(f"error: {os.path.basename(getattr(args, 'file', '') or '')}: {exc}\n")
        return EXIT_INPUT
    except InputError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    return EXIT_FAIL if out.failed else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)
