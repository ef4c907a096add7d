"""Command-line entry point.

Exit status: 0 when every per-rung invariant flag passes, 1 when some flag
fails, 2 for configuration errors and 3 when a resource guard trips.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import entropy as ent
from . import oracle
from .expr import (
    format_group,
    format_matrix,
    parse_element,
    parse_group,
    parse_int_list,
    parse_ladder_spec,
    parse_matrix,
    parse_ring_expression,
)
from .field import FieldSpec, FqMatrix, ResourceError, echelon_rank_kernel
from .group import FinitePermGroup, FreeGroup, Group, GroupMismatchError, IntegerLattice
from .report import format_rows, make_row
from .sofic import (
    EXACT,
    RNG_NAME,
    Ladder,
    build_finite_regular,
    defect_report,
    finite_ladder,
    free_ladder,
    good_set,
    lattice_ladder,
)


class ConfigError(ValueError):
    pass


def build_ladder(group: Group, spec: str | None, seed: int) -> Ladder:
    if isinstance(group, FinitePermGroup):
        if spec not in (None, "", "regular"):
            raise ConfigError("finite groups use their regular representation; omit --ladder")
        return finite_ladder(group)
    if spec is None:
        raise ConfigError("--ladder is required for infinite groups")
    key, values = parse_ladder_spec(spec)
    if isinstance(group, IntegerLattice):
        if key != "N":
            raise ConfigError("lattice ladders are given by torus sides: N=...")
        return lattice_ladder(group.rank, values)
    if isinstance(group, FreeGroup):
        if key != "d":
            raise ConfigError("free-group ladders are given by degrees: d=...")
        return free_ladder(group.rank, values, seed)
    raise ConfigError(f"unsupported group {group}")


def _common(ns: argparse.Namespace) -> tuple[Group, FieldSpec]:
    return parse_group(ns.group), FieldSpec(ns.q)


def _record_fields(r: ent.EntropyRecord) -> dict[str, Any]:
    return {
        "d": r.d,
        "q": r.q,
        "n": r.n,
        "m": r.m,
        "dim_ker_sigma_f": r.dim_ker_sigma_f,
        "dim_ker_sigma_bar_fstar": r.dim_ker_sigma_bar_fstar,
        "rank_sigma_bar_f": r.rank_sigma_bar_f,
        "coker_dim": r.coker_dim,
        "good_set_complement": r.good_set_complement,
        "h_top_est": r.h_top_est,
        "h_alg_est": r.h_alg_est,
        "gap_bound": r.gap_bound,
        "gap_ok": r.gap_ok,
        "duality_ok": r.duality_ok,
        "range_ok": r.range_ok,
    }


def cmd_entropy_principal(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    f = parse_matrix(ns.f, group, field, ns.n if not ns.f.strip() else None)
    pres = ent.PrincipalPresentation(f)
    ladder = build_ladder(group, ns.ladder, ns.seed)
    est = ent.principal_estimates(pres, ladder, threads=ns.threads)
    rows = []
    for r in est.records:
        rows.append(make_row("entropy principal", {"group": format_group(group), "f": format_matrix(f), **_record_fields(r)}))
    return rows, est.ok


def cmd_verify_peters(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    f = parse_matrix(ns.f, group, field, ns.n if not ns.f.strip() else None)
    pres = ent.PrincipalPresentation(f)
    ladder = build_ladder(group, ns.ladder, ns.seed)
    est = ent.principal_estimates(pres, ladder, threads=ns.threads)
    verdict = None
    if isinstance(group, FinitePermGroup):
        verdict = oracle.pairing_check(f)
    rows, ok = [], est.ok
    for r in est.records:
        row = {"group": format_group(group), "f": format_matrix(f), **_record_fields(r), "peters_equal": r.peters_equal}
        if verdict is not None:
            row["pairing_kernel_count"] = verdict.kernel_count
            row["module_size"] = verdict.module_size
            row["h_finite_module"] = math.log(verdict.module_size) / group.order
            row["finite_match"] = (
                verdict.ok and verdict.module_size == r.q ** r.coker_dim and r.d == group.order
            )
            ok = ok and row["finite_match"]
        else:
            row["pairing_kernel_count"] = ""
            row["module_size"] = ""
            row["h_finite_module"] = ""
            row["finite_match"] = ""
        ok = ok and r.peters_equal
        rows.append(make_row("verify peters", row))
    return rows, ok


def load_patch(spec: str, group: Group, field: FieldSpec) -> ent.PartialModulePatch:
    """``free:R`` (box of radius R in the free module), ``quotient:<f>`` or a JSON file."""
    if spec.startswith("free:"):
        if not isinstance(group, IntegerLattice):
            raise ConfigError("free-module patches are built for lattice groups")
        return ent.free_module_patch(field, group, int(spec[5:]))
    if spec.startswith("quotient:"):
        return ent.quotient_patch(parse_ring_expression(spec[9:], group, field))
    data = json.loads(Path(spec).read_text())
    return patch_from_json(data, group, field)


def patch_from_json(data: dict, group: Group, field: FieldSpec) -> ent.PartialModulePatch:
    if "q" in data and int(data["q"]) != field.p:
        raise ConfigError(f"patch field q={data['q']} differs from --q {field.p}")
    if "group" in data and parse_group(data["group"]) != group:
        raise ConfigError(f"patch group {data['group']} differs from --group")
    basis = tuple(data["basis"])
    D = len(basis)
    actions = {parse_element(k, group): np.array(v, dtype=np.int64) for k, v in data["actions"].items()}
    domains = {parse_element(k, group): np.array(v, dtype=bool) for k, v in data.get("domains", {}).items()}
    a = np.array(data.get("A", []), dtype=np.int64).reshape(-1, D)
    b = np.array(data.get("B", []), dtype=np.int64).reshape(-1, D)
    return ent.PartialModulePatch(field, group, basis, actions, a, b, domains)


def patch_to_json(patch: ent.PartialModulePatch) -> dict:
    g = patch.group
    return {
        "schema_version": 1,
        "q": patch.field.p,
        "group": format_group(g),
        "basis": list(patch.basis),
        "actions": {g.format(s): a.tolist() for s, a in patch.actions.items()},
        "domains": {g.format(s): d.tolist() for s, d in patch.domains.items()},
        "A": patch.a_gens.tolist(),
        "B": patch.b_gens.tolist(),
    }


def parse_subspace(text: str, patch: ent.PartialModulePatch) -> np.ndarray:
    """``;``-separated entries, each a basis name or a space-separated vector; blank is zero."""
    vecs = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        if item in patch.basis:
            vecs.append(ent.unit_vector(patch, item))
            continue
        try:
            v = [int(x) for x in item.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(f"{item!r} is neither a basis name nor a vector") from None
        if len(v) != patch.dim:
            raise ConfigError(f"vector {item!r} must have {patch.dim} entries")
        vecs.append(np.array(v, dtype=np.int64))
    return np.array(vecs, dtype=np.int64).reshape(-1, patch.dim)


def _patch_with_options(ns, group, field) -> ent.PartialModulePatch:
    patch = load_patch(ns.patch, group, field)
    a = parse_subspace(ns.A, patch) if ns.A is not None else None
    b = parse_subspace(ns.B, patch) if ns.B is not None else None
    return patch.with_subspaces(a, b)


def cmd_entropy_relative(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    patch = _patch_with_options(ns, group, field)
    ladder = build_ladder(group, ns.ladder, ns.seed)
    windows = ns.window or [None]
    rows, ok = [], True
    for sigma in ladder:
        for w in windows:
            window = None if w is None else [parse_element(x, group) for x in w.split(";") if x.strip()]
            rec = ent.relative_estimate(patch, sigma, window)
            ok = ok and rec.range_ok
            rows.append(
                make_row(
                    "entropy relative",
                    {
                        "group": format_group(group),
                        "d": rec.d,
                        "q": rec.q,
                        "window": ";".join(rec.window),
                        "dim_a": rec.dim_a,
                        "dim_s": rec.dim_s,
                        "dim_intersection": rec.dim_intersection,
                        "dim_image": rec.dim_image,
                        "value": rec.value,
                        "range_ok": rec.range_ok,
                    },
                )
            )
    return rows, ok


def cmd_entropy_folner(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    patch = _patch_with_options(ns, group, field)
    recs = ent.folner_entropy(patch, parse_int_list(ns.boxes))
    rows = [
        make_row(
            "entropy folner",
            {
                "group": format_group(group),
                "q": r.q,
                "side": r.side,
                "box_size": r.box_size,
                "dim_sum": r.dim_sum,
                "value": r.value,
                "running_inf": r.running_inf,
            },
        )
        for r in recs
    ]
    return rows, True


def cmd_sofic_check(ns) -> tuple[list[dict], bool]:
    group = parse_group(ns.group)
    ladder = build_ladder(group, ns.ladder, ns.seed)
    if ns.window:
        window = [parse_element(x, group) for x in ns.window.split(";") if x.strip()]
    else:
        window = [group.identity()] + group.generators() + [group.inv(g) for g in group.generators()]
        window = list(dict.fromkeys(window))
    rows, ok = [], True
    dump = []
    for sigma in ladder:
        rep = defect_report(sigma, window)
        w = good_set(sigma, window)
        mult_max = max(rep.mult_defect.values()) * sigma.d
        seps = list(rep.sep_defect.values())
        exact_ok = sigma.kind != EXACT or mult_max == 0
        ok = ok and exact_ok
        rows.append(
            make_row(
                "sofic check",
                {
                    "group": format_group(group),
                    "d": sigma.d,
                    "kind": sigma.kind,
                    "window_size": len(rep.window),
                    "mult_defect_max_count": int(mult_max),
                    "sep_defect_max_count": int(max(seps) * sigma.d) if seps else 0,
                    "sep_defect_min_count": int(min(seps) * sigma.d) if seps else 0,
                    "mult_defect_max": float(mult_max) / sigma.d,
                    "sep_defect_max": float(max(seps)) if seps else 0.0,
                    "good_set_complement": w.complement_size,
                    "rng": RNG_NAME if sigma.seed is not None else "",
                    "seed": sigma.seed if sigma.seed is not None else "",
                    "exact_ok": exact_ok,
                },
            )
        )
        dump.append({"d": sigma.d, "kind": sigma.kind, "generators": [g.tolist() for g in sigma.generator_images]})
    if ns.dump:
        Path(ns.dump).write_text(json.dumps({"group": format_group(group), "rungs": dump}) + "\n")
    return rows, ok


def cmd_probe(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    f = parse_ring_expression(ns.f, group, field)
    if f.is_zero():
        raise ConfigError("the zero-divisor probe needs a nonzero f")
    ladder = build_ladder(group, ns.ladder, ns.seed)
    rep = ent.zero_divisor_probe(f, ladder, tolerance=ns.tolerance, threads=ns.threads)
    rows = [
        make_row(
            "probe zero-divisor",
            {
                "group": format_group(group),
                "f": rep.f,
                "d": r.d,
                "q": r.q,
                "support_size": rep.support_size,
                "rank_sigma_f": r.rank_sigma_f,
                "submodule_est": r.submodule_est,
                "quotient_est": r.quotient_est,
                "bound": r.bound,
                "bound_ok": r.bound_ok,
            },
        )
        for r in rep.records
    ]
    print(
        f"quotient entropy tail max {rep.quotient_tail_max:.12g} (tolerance {rep.tolerance}): {rep.reading()}",
        file=sys.stderr,
    )
    return rows, rep.all_rungs_ok


def cmd_verify_addition(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    f1 = parse_matrix(ns.f1, group, field, ns.n1 if not ns.f1.strip() else None)
    f2 = parse_matrix(ns.f2, group, field, ns.n2 if not ns.f2.strip() else None)
    ladder = build_ladder(group, ns.ladder, ns.seed)
    recs = ent.addition_check(f1, f2, ladder, threads=ns.threads)
    rows = [
        make_row(
            "verify addition",
            {
                "group": format_group(group),
                "d": r.d,
                "q": r.q,
                "coker_f1": r.coker_f1,
                "coker_f2": r.coker_f2,
                "coker_total": r.coker_total,
                "residual": r.residual,
                "h_total": r.h(r.coker_total),
                "h_sub_relative": r.h(r.relative_dim),
                "h_quotient": r.h(r.coker_f2),
                "ok": r.ok,
            },
        )
        for r in recs
    ]
    return rows, all(r.ok for r in recs)


def _parse_int_matrix(text: str) -> np.ndarray:
    rows = [[int(x) for x in r.replace(",", " ").split()] for r in text.split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigError(f"bad integer matrix {text!r}")
    return np.array(rows, dtype=np.int64)


def cmd_oracle_kernel(ns) -> tuple[list[dict], bool]:
    field = FieldSpec(ns.q)
    m = FqMatrix(field, _parse_int_matrix(ns.matrix))
    count = oracle.brute_kernel_count(m)
    res = echelon_rank_kernel(m)
    ok = count == field.p**res.kernel_dim
    row = {
        "q": field.p,
        "rows": m.rows,
        "cols": m.cols,
        "brute_count": count,
        "rank": res.rank,
        "kernel_dim": res.kernel_dim,
        "ok": ok,
    }
    return [make_row("oracle kernel", row)], ok


def cmd_oracle_mapspace(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    if not isinstance(group, FinitePermGroup):
        raise ConfigError("map-space enumeration needs a finite group")
    model = oracle.full_shift_model(group, field.p, ns.n)
    sigma = build_finite_regular(group)
    window = tuple(range(group.order)) if ns.window is None else tuple(
        parse_element(x, group) for x in ns.window.split(";") if x.strip()
    )
    cfg = oracle.MapSpaceConfig(window, Fraction(ns.delta), Fraction(ns.eps))
    res = oracle.map_space_entropy(model, sigma, cfg)
    kernel_value = ns.n * math.log(field.p)
    generating = model.dynamically_generating()
    exact_case = cfg.delta == 0 and cfg.eps < 1
    matches = math.isclose(res.estimate, kernel_value, rel_tol=0, abs_tol=1e-12) if res.n_eps else False
    ok = generating and (matches or not exact_case)
    row = {
        "group": format_group(group),
        "q": field.p,
        "n": ns.n,
        "d": res.d,
        "delta": str(cfg.delta),
        "eps": str(cfg.eps),
        "map_count": res.map_count,
        "n_eps": res.n_eps,
        "estimate": res.estimate,
        "kernel_estimate": kernel_value,
        "dynamically_generating": generating,
        "matches_kernel": matches,
    }
    return [make_row("oracle mapspace", row)], ok


def cmd_oracle_closure(ns) -> tuple[list[dict], bool]:
    if ns.patch:
        group, field = _common(ns)
        patch = _patch_with_options(ns, group, field)
        sigma = build_ladder(group, ns.ladder, ns.seed).rungs[-1]
        window = [s for s in patch.window if s != group.identity()]
        if ns.window:
            window = [parse_element(x, group) for x in ns.window.split(";") if x.strip()]
        gens = oracle.relation_generators(patch, sigma, window)
        size = oracle.subgroup_closure_size(field.p, gens, dim=sigma.d * patch.dim)
        rec = ent.relative_estimate(patch, sigma, window)
        ok = size == field.p**rec.dim_s
        row = {"modulus": field.p, "dim": sigma.d * patch.dim, "generators": len(gens), "closure_size": size, "span_dim": rec.dim_s, "ok": ok}
        return [make_row("oracle closure", row)], ok
    gens = _parse_int_matrix(ns.gens) if ns.gens and ns.gens.strip() else np.zeros((0, ns.dim or 1), np.int64)
    size = oracle.subgroup_closure_size(ns.modulus, gens, dim=ns.dim)
    row = {"modulus": ns.modulus, "dim": gens.shape[1], "generators": gens.shape[0], "closure_size": size, "span_dim": "", "ok": True}
    return [make_row("oracle closure", row)], True


def cmd_oracle_pairing(ns) -> tuple[list[dict], bool]:
    group, field = _common(ns)
    f = parse_matrix(ns.f, group, field, ns.n if not ns.f.strip() else None)
    v = oracle.pairing_check(f)
    row = {
        "group": format_group(group),
        "f": format_matrix(f),
        "q": v.q,
        "order": v.order,
        "kernel_count": v.kernel_count,
        "annihilator_count": v.annihilator_count,
        "image_count": v.image_count,
        "module_size": v.module_size,
        "module_size_via_rank": v.module_size_via_rank,
        "ok": v.ok,
    }
    return [make_row("oracle pairing", row)], v.ok


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default="-", help="report path ('-' for stdout)")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--config", default=None, help="key=value file mirroring the flags")


def _add_group(p: argparse.ArgumentParser, q: bool = True, ladder: bool = True) -> None:
    p.add_argument("--group", required=True, help="Z, Z^2, free:2, finite:Z/2, finite:S3, ...")
    if q:
        p.add_argument("--q", type=int, default=2, help="prime field size")
    if ladder:
        p.add_argument("--ladder", default=None, help="N=4..64 (lattices) or d=50,100 (free groups)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sofic-entropy", description=__doc__)
    top = parser.add_subparsers(dest="command", required=True)

    e = top.add_parser("entropy").add_subparsers(dest="action", required=True)
    p = e.add_parser("principal", help="kernel and corank estimates for (F_q G)^n / (F_q G)^m f")
    _add_group(p)
    p.add_argument("--f", default="", help="group-ring matrix; rows ';', entries ','; blank = free module")
    p.add_argument("--n", type=int, default=1, help="rank of the free module when --f is blank")
    _add_output(p)
    p.set_defaults(handler=cmd_entropy_principal)

    p = e.add_parser("relative", help="relative algebraic entropy on a module patch")
    _add_group(p)
    p.add_argument("--patch", required=True, help="free:R, quotient:<f>, or a JSON patch file")
    p.add_argument("--A", default=None)
    p.add_argument("--B", default=None)
    p.add_argument("--window", action="append", help="';'-separated elements; repeat for sweeps")
    _add_output(p)
    p.set_defaults(handler=cmd_entropy_relative)

    p = e.add_parser("folner", help="box entropy for lattice groups")
    _add_group(p, ladder=False)
    p.add_argument("--patch", required=True)
    p.add_argument("--A", default=None)
    p.add_argument("--B", default=None)
    p.add_argument("--boxes", required=True, help="box sides, e.g. 1..64 or 8,16,32")
    _add_output(p)
    p.set_defaults(handler=cmd_entropy_folner)

    s = top.add_parser("sofic").add_subparsers(dest="action", required=True)
    p = s.add_parser("check", help="multiplicativity and separation defects")
    _add_group(p, q=False)
    p.add_argument("--window", default=None)
    p.add_argument("--dump", default=None, help="write generator permutations as JSON")
    _add_output(p)
    p.set_defaults(handler=cmd_sofic_check)

    pr = top.add_parser("probe").add_subparsers(dest="action", required=True)
    p = pr.add_parser("zero-divisor")
    _add_group(p)
    p.add_argument("--f", required=True)
    p.add_argument("--tolerance", type=float, default=0.05)
    _add_output(p)
    p.set_defaults(handler=cmd_probe)

    v = top.add_parser("verify").add_subparsers(dest="action", required=True)
    p = v.add_parser("peters", help="topological vs algebraic estimates")
    _add_group(p)
    p.add_argument("--f", default="")
    p.add_argument("--n", type=int, default=1)
    _add_output(p)
    p.set_defaults(handler=cmd_verify_peters)

    p = v.add_parser("addition", help="block-diagonal additivity")
    _add_group(p)
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--n1", type=int, default=1)
    p.add_argument("--n2", type=int, default=1)
    _add_output(p)
    p.set_defaults(handler=cmd_verify_addition)

    o = top.add_parser("oracle").add_subparsers(dest="action", required=True)
    p = o.add_parser("kernel")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--matrix", required=True, help="rows ';', entries space-separated")
    _add_output(p)
    p.set_defaults(handler=cmd_oracle_kernel)

    p = o.add_parser("mapspace", help="full-shift model of a finite group")
    _add_group(p, ladder=False)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--window", default=None)
    p.add_argument("--delta", default="0")
    p.add_argument("--eps", default="1/2")
    _add_output(p)
    p.set_defaults(handler=cmd_oracle_mapspace)

    p = o.add_parser("closure")
    p.add_argument("--modulus", type=int, default=2)
    p.add_argument("--gens", default=None, help="rows ';', entries space-separated")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--group", default=None)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--ladder", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patch", default=None)
    p.add_argument("--A", default=None)
    p.add_argument("--B", default=None)
    p.add_argument("--window", default=None)
    _add_output(p)
    p.set_defaults(handler=cmd_oracle_closure)

    p = o.add_parser("pairing")
    _add_group(p, ladder=False)
    p.add_argument("--f", default="")
    p.add_argument("--n", type=int, default=1)
    _add_output(p)
    p.set_defaults(handler=cmd_oracle_pairing)
    return parser


def read_config(path: str) -> list[str]:
    """Translate ``key = value`` lines into ``--key value`` tokens."""
    tokens = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        tokens += [f"--{key.replace('_', '-')}", value]
    return tokens


def _with_config(argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ConfigError("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    k = 0
    while k < len(rest) and not rest[k].startswith("-"):
        k += 1
    # config values go first so explicit flags win
    return rest[:k] + read_config(path) + rest[k:]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(_with_config(argv))
        rows, ok = ns.handler(ns)
        text = format_rows(rows, ns.format)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, GroupMismatchError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if ns.output == "-":
        sys.stdout.write(text)
    else:
        Path(ns.output).write_text(text)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
