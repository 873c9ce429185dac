"""Command line interface: construct, verify, scan and regress with JSON certificates.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error, 3 a
resource cap was hit.  All results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from contextlib import contextmanager

from . import __version__
from .data import (
    BUNDLED_2A5_PRIMES,
    STABILIZER_ORDERS,
    ParseError,
    bundled_2a5,
    bundled_group_path,
    load_group,
    load_perm_group,
    min_stabilizer_scan,
    parse_vectors,
    table1_rows,
    table2_rows,
)
from .field import FieldError, field_of_order, primitive_element
from .group import (
    CapExceeded,
    GroupError,
    MatrixGroup,
    NoBaseWithin,
    SearchSpaceTooLarge,
    default_cap,
    minimal_base_size,
    minimal_strong_base_size,
    verify_base,
)
from .matrix import SquareMatrix, VectorQ
from .perm import PermError, PreconditionViolated, cyclic_group, is_regular_partition, regular_orbit_count
from .perm import SearchSpaceTooLarge as PermSearchTooLarge
from .perm import regular_partition_coprime, table1_groups

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
RECIPES = ("imprimitive", "tensor", "symplectic", "deleted-perm", "semilinear")


class UsageError(Exception):
    pass


class Run:
    """Collects certificates, extra fields and phase timings for one command."""

    def __init__(self, args):
        self.args = args
        self.certificates = []
        self.results: dict = {}
        self.timings: dict[str, float] = {}
        self.ok = True
        self.group: MatrixGroup | None = None

    @contextmanager
    def phase(self, name: str):
        t = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - t, 3)

    def add(self, cert, label: str | None = None):
        d = cert.to_dict()
        if label:
            d["label"] = label
        self.certificates.append(d)
        self.ok &= bool(cert.verified)

    def report(self) -> dict:
        a = self.args
        config = {"cap": default_cap(), "seed": a.seed, "threads": a.threads}
        out = {
            "command": _echo(a),
            "config": config,
            "certificates": self.certificates,
            "results": self.results,
            "status": "ok" if self.ok else "fail",
        }
        if a.timings:
            out["timings"] = self.timings
        return out


def _echo(args) -> list[str]:
    """The command as given, minus flags that do not change results."""
    skip = {"--json", "--timings"}
    out = []
    it = iter(args.argv)
    for tok in it:
        if tok in skip:
            continue
        if tok == "--threads":
            next(it, None)
            continue
        if tok.startswith("--threads="):
            continue
        out.append(tok)
    return out


def _emit(run: Run) -> None:
    rep = run.report()
    if run.args.json:
        print(json.dumps(rep, sort_keys=True))
        return
    for c in rep["certificates"]:
        label = f"[{c['label']}] " if "label" in c else ""
        print(f"{label}{c['group']}: verified={c['verified']} method={c['method']} chain={c['order_chain']}")
        print(f"  vectors: {' ; '.join(c['vectors'])}")
        for k, v in sorted(c.get("meta", {}).items()):
            print(f"  {k}: {v}")
    for k, v in sorted(rep["results"].items()):
        print(f"{k}: {json.dumps(v, sort_keys=True)}")
    if "timings" in rep:
        print("timings: " + ", ".join(f"{k}={v}s" for k, v in rep["timings"].items()))
    print(f"status: {rep['status']}")


# --- helpers --------------------------------------------------------------------


def _group_path(text: str):
    if text.startswith("bundled:"):
        name = text.split(":", 1)[1]
        if not name.endswith(".grp"):
            name += ".grp"
        return bundled_group_path(name)
    return text


def _load(text: str) -> MatrixGroup:
    rec = load_group(_group_path(text))
    return rec.group(check=True)


def _quaternion_scalars(q: int) -> MatrixGroup:
    """Q8 times the scalars in GL(2,q), q odd: the default factor group."""
    from .symplectic import quaternion_pair

    spec = field_of_order(q)
    if spec.p == 2:
        raise UsageError("the default factor group needs odd q")
    i, j = quaternion_pair(spec)
    Z = SquareMatrix.scalar(spec, 2, primitive_element(spec).code)
    return MatrixGroup.from_matrices([i, j, Z], name=f"Q8.Z<=GL(2,{q})").enumerate()


def _first_outside(spec, n: int, vecs) -> VectorQ:
    from . import linalg

    rows = [v.codes for v in vecs]
    for j in range(n):
        e = VectorQ.unit(spec, n, n - 1 - j)
        if not linalg.span_contains(spec, rows, e.codes):
            return e
    raise UsageError("vectors span the whole space")


# --- commands ---------------------------------------------------------------------


def cmd_verify_base(run: Run) -> None:
    a = run.args
    with run.phase("load"):
        G = _load(a.group)
        vecs = parse_vectors(G.spec, G.n, a.vectors)
    with run.phase("verify"):
        run.add(verify_base(G, vecs, method=a.method, group_ref=G.name or a.group))


def cmd_find_base(run: Run) -> None:
    a = run.args
    with run.phase("load"):
        G = _load(a.group)
    with run.phase("search"):
        try:
            size, witness = minimal_base_size(G, max_size=a.max_size)
        except NoBaseWithin:
            run.results["base_size"] = f">{a.max_size}"
            run.ok = False
            return
        run.results["base_size"] = size
        if a.strong:
            ssize, _ = minimal_strong_base_size(G, max_size=a.max_size + 1)
            run.results["strong_base_size"] = ssize
    with run.phase("verify"):
        run.add(verify_base(G, witness, group_ref=G.name or a.group), "witness")


def _construct_symplectic(run: Run) -> None:
    from .symplectic import run_symplectic

    a = run.args
    for flag in ("r", "k", "q"):
        if getattr(a, flag) is None:
            raise UsageError(f"symplectic needs --{flag}")
    with run.phase("construct+verify"):
        R = run_symplectic(a.r, a.k, a.q, nonmonomial=a.nonmonomial, acting=a.acting, seed=a.seed, method=a.method)
    if R.full_certificate is not None and R.full_certificate is not R.certificate:
        d = R.full_certificate.to_dict()
        d["label"] = "full normalizer"
        run.certificates.append(d)
    run.add(R.certificate, "acting group")
    run.group = R.acting
    run.results["branch"] = R.branch
    run.results["dimension"] = R.struct.n
    run.results["supports"] = R.supports()
    run.results["conjugate_attempts"] = R.attempts


def _construct_tensor(run: Run) -> None:
    from .construct import TensorShape, central_wreath, strong_base_from_base, tensor_22_search, tensor_power_vectors

    a = run.args
    with run.phase("load"):
        G1 = _load(a.group) if a.group else _quaternion_scalars(a.q or 5)
        G1.enumerate()
    t = a.t
    with run.phase("construct"):
        if G1.n == 2 and t == 2:
            x, y, branch, G = tensor_22_search(G1, *_unit_pair(G1))
        else:
            _, w = minimal_base_size(G1, max_size=2)
            u1 = w[0]
            u2 = w[1] if len(w) > 1 else _first_outside(G1.spec, G1.n, [u1])
            x1, y1, gamma = strong_base_from_base(G1, u1, u2)
            if x1 == y1:
                y1 = _first_outside(G1.spec, G1.n, [x1])
            z1 = _first_outside(G1.spec, G1.n, [x1, y1]) if t == 2 else None
            x, y = tensor_power_vectors(TensorShape(G1.n, t), x1, y1, z1)
            G = central_wreath(G1, t, name=f"{G1.name} wr_c S{t}")
            branch = "tensor-power"
    with run.phase("verify"):
        run.add(verify_base(G, [x, y], method=a.method))
    run.group = G
    run.results["branch"] = branch


def _unit_pair(G1: MatrixGroup):
    spec = G1.spec
    return VectorQ.unit(spec, 2, 0), VectorQ.unit(spec, 2, 1)


def _construct_deleted(run: Run) -> None:
    from .construct import deleted_module_group, deleted_permutation_vector

    a = run.args
    c, p = a.c or 4, a.p or 5
    with run.phase("construct"):
        G = deleted_module_group(c, p)
        x, y, info = deleted_permutation_vector(c, p, G)
    with run.phase("verify"):
        run.add(verify_base(G, [x, y], method=a.method))
    run.group = G
    run.results["stabilizer"] = info


def _construct_semilinear(run: Run) -> None:
    from .construct import semilinear_group, semilinear_lift

    a = run.args
    spec = field_of_order(a.q or 4)
    if spec.f == 1:
        raise UsageError("semilinear needs a non-prime field")
    alpha = primitive_element(spec).code
    with run.phase("construct"):
        Gamma = semilinear_group(
            spec, 1, [(SquareMatrix.scalar(spec, 1, alpha), 0), (SquareMatrix.identity(spec, 1), 1)],
            name=f"GammaL(1,{spec.q})",
        )
        one = VectorQ.unit(spec, 1, 0)
        # the full semilinear group of a line is not coprime; the lift is still exact
        u1, v, gamma = semilinear_lift(Gamma, one, one, check_coprime=False)
    with run.phase("verify"):
        run.add(verify_base(Gamma, [u1, v], method="enum"))
    run.results["gamma"] = int(gamma)


def _construct_imprimitive(run: Run) -> None:
    from .construct import embed_block, imprimitive_glue, imprimitive_wreath

    a = run.args
    k = a.blocks
    with run.phase("construct"):
        G1 = _load(a.group) if a.group else _quaternion_scalars(a.q or 5)
        G1.enumerate()
        _, w = minimal_base_size(G1, max_size=G1.n)
        x1 = w[0]
        y1 = w[1] if len(w) > 1 else VectorQ.zero(G1.spec, G1.n)
        top = cyclic_group(k).enumerate()
        labels = regular_partition_coprime(top, G1.spec.p)
        G, blocks = imprimitive_wreath(G1, top)
        x, y = imprimitive_glue(blocks, embed_block(x1, k), embed_block(y1, k), labels)
    with run.phase("verify"):
        run.add(verify_base(G, [x, y], method=a.method))
    run.group = G
    run.results["labels"] = list(labels.labels)


def cmd_construct(run: Run) -> None:
    a = run.args
    recipe = a.recipe_opt or a.recipe
    if recipe is None:
        raise UsageError("construct needs a recipe")
    if a.recipe and a.recipe_opt and a.recipe != a.recipe_opt:
        raise UsageError("conflicting recipes")
    run.results["recipe"] = recipe
    {
        "symplectic": _construct_symplectic,
        "tensor": _construct_tensor,
        "deleted-perm": _construct_deleted,
        "semilinear": _construct_semilinear,
        "imprimitive": _construct_imprimitive,
    }[recipe](run)
    if a.save_group:
        _save_group(run.group, a.save_group)


def _save_group(G: MatrixGroup | None, path: str) -> None:
    from .data import GroupRecord, dump_group

    if G is None or G.semilinear:
        raise UsageError("this recipe has no linear group to save")
    rec = GroupRecord(G.name, G.spec, G.n, G.square_matrices(G.gens), expected_order=G.order)
    with open(path, "w") as fh:
        fh.write(dump_group(rec))


def cmd_partition(run: Run) -> None:
    a = run.args
    with run.phase("load"):
        P = load_perm_group(a.perm_group).enumerate()
    with run.phase("search"):
        try:
            part = regular_partition_coprime(P, a.parts)
        except PreconditionViolated as exc:
            run.results["error"] = str(exc)
            run.ok = False
            return
        ok = is_regular_partition(P, part)
    run.results["partition"] = {"labels": list(part.labels), "parts": part.parts(), "regular": ok, "order": P.order}
    run.ok &= ok


def _regress_table1(run: Run) -> None:
    groups = table1_groups()
    rows = []
    for row in table1_rows():
        G = groups[row.group].enumerate()
        c3 = regular_orbit_count(G, 3)
        c4 = regular_orbit_count(G, 4)
        ok = c3 == row.p3_count() and (c4 >= 4 if row.regular_p4 == ">=4" else c4 == int(row.regular_p4))
        rows.append(
            {"group": row.group, "degree": row.degree, "order": G.order, "regular_3": c3, "regular_4": c4,
             "expected_3": row.p3_count(), "expected_4": row.regular_p4, "match": ok}
        )
        run.ok &= ok
    run.results["table1"] = rows


def _regress_table2(run: Run) -> None:
    from .construct import quasisimple_search

    rows = []
    for row in table2_rows():
        for p, stab in row.entries():
            entry = {"group": row.group, "n": row.n, "p": p, "expected": stab}
            if row.group == "2.A5*Z" and p in BUNDLED_2A5_PRIMES:
                G = bundled_2a5(p).group()
                order, x = min_stabilizer_scan(G)
                y, _ = quasisimple_search(G, x)
                cert = verify_base(G, [x, y])
                run.add(cert, f"2.A5*Z p={p}")
                entry.update(status="computed", min_stabilizer=order, match=order == STABILIZER_ORDERS[stab])
                run.ok &= entry["match"]
            else:
                entry["status"] = "data-only"
            rows.append(entry)
    run.results["table2"] = rows


def cmd_regress(run: Run) -> None:
    with run.phase(f"table{run.args.table}"):
        (_regress_table1 if run.args.table == 1 else _regress_table2)(run)


def cmd_scan(run: Run) -> None:
    from .construct import quasisimple_search

    a = run.args
    with run.phase("load"):
        G = _load(a.group)
    with run.phase("scan"):
        order, x = min_stabilizer_scan(G)
    run.results["min_stabilizer"] = {"order": order, "witness": x.to_text()}
    if a.pair:
        with run.phase("pair"):
            y, rep = quasisimple_search(G, x)
            run.add(verify_base(G, [x, y], group_ref=G.name or a.group))
        run.results["cover"] = {"minimal_subgroups": rep.minimal_subgroups, "union": rep.union_size,
                                "part1": rep.part1, "part2": rep.part2}


# --- parser -------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--json", action="store_true", help="print the run report as JSON")
    c.add_argument("--seed", type=int, default=0, help="seed for random normalizer generation")
    c.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads (BLAS)")
    c.add_argument("--timings", action="store_true", help="include phase timings (not deterministic)")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="cobase", description="Two-element bases for coprime linear groups.")
    ap.add_argument("--version", action="version", version=f"cobase {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    method = {"choices": ["auto", "enum", "schreier"], "default": "auto"}

    p = sub.add_parser("verify-base", parents=[common], help="check that vectors form a base")
    p.add_argument("--group", required=True, help="group file, or bundled:NAME")
    p.add_argument("--vectors", required=True, help='"v1;v2", coefficients comma separated')
    p.add_argument("--method", **method)
    p.set_defaults(func=cmd_verify_base)

    p = sub.add_parser("find-base", parents=[common], help="exhaustive minimal base with witness")
    p.add_argument("--group", required=True)
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--strong", action="store_true", help="also compute the minimal strong base size")
    p.set_defaults(func=cmd_find_base)

    p = sub.add_parser("construct", parents=[common], help="run a construction and verify it")
    p.add_argument("recipe", nargs="?", choices=RECIPES)
    p.add_argument("--recipe", dest="recipe_opt", choices=RECIPES)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--nonmonomial", action="store_true")
    p.add_argument("--acting", choices=["auto", "full", "sylow"], default="auto")
    p.add_argument("--c", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--t", type=int, default=2, help="tensor factor count")
    p.add_argument("--blocks", type=int, default=3, help="number of blocks for imprimitive")
    p.add_argument("--group", help="factor group file for tensor or imprimitive")
    p.add_argument("--method", **method)
    p.add_argument("--save-group", metavar="FILE", help="write the certified group in group-file format")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("partition", parents=[common], help="regular partition of a permutation group")
    p.add_argument("--perm-group", required=True)
    p.add_argument("--parts", type=int, required=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("regress", parents=[common], help="rerun the bundled regression tables")
    p.add_argument("--table", type=int, choices=[1, 2], required=True)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("scan", parents=[common], help="minimal vector stabilizer over all of V")
    p.add_argument("--group", required=True)
    p.add_argument("--pair", action="store_true", help="complete the witness to a verified base")
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    run = Run(args)
    try:
        args.func(run)
    except (CapExceeded, SearchSpaceTooLarge, PermSearchTooLarge) as exc:
        print(f"cobase: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ParseError, FieldError, OSError, PermError) as exc:
        print(f"cobase: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GroupError, ValueError) as exc:
        print(f"cobase: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(run)
    return EXIT_OK if run.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
