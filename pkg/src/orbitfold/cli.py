"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails or a
construction hits a failed invariant, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import shutil
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from gmpy2 import mpq

from . import __version__
from .algebra.scalar import as_scalar, scalar_str
from .algebra.serialize import dumps
from .artifacts import (flat_to_json, frobenius_to_json, index_dict_to_json, pencil_to_json,
                        polys_to_json, prepotential_to_json, tensor_to_json)
from .report import Report

CHECK_SUITES = ("pencil", "quasihomogeneity", "flat", "axioms", "ledger", "wdvv", "dual", "hierarchy", "classical")
DEFAULT_CHECKS = ("pencil", "quasihomogeneity", "flat", "axioms", "ledger", "wdvv", "hierarchy")
ARTIFACT_FILES = ("pencil.json", "flatchart.json", "frobenius.json", "F.json")
CACHE_ENV = "ORBITFOLD_CACHE"
GROUPS = {"B2": 2, "B3": 3, "B4": 4}

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 2
    normalization: str = "saito"
    weights: tuple | None = None
    invariant_c: str | None = None
    level: int = 1
    format: str = "text"
    cache: str | None = None
    checks: tuple = DEFAULT_CHECKS
    out: str = "."

    def key(self) -> str:
        """Content hash of the fields that determine the constructed artifacts."""
        data = {"version": __version__, "n": self.n, "normalization": self.normalization}
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:32]

    def cache_dir(self) -> Path | None:
        d = self.cache or os.environ.get(CACHE_ENV)
        return Path(d) if d else None


# -- argument parsing --------------------------------------------------------------

def _n_type(s):
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if n < 2:
        raise argparse.ArgumentTypeError("n must be at least 2")
    return n


def _checks_type(s):
    items = tuple(x.strip() for x in s.split(",") if x.strip())
    bad = [x for x in items if x not in CHECK_SUITES]
    if bad or not items:
        raise argparse.ArgumentTypeError(
            f"unknown checks {', '.join(bad) or '(none)'}; choose from {', '.join(CHECK_SUITES)}")
    return items


def _rational(s):
    try:
        return as_scalar(s.strip())
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


def _weights_type(s):
    parts = s.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("weights are two rationals: orbit II, orbit I")
    return tuple(_rational(p) for p in parts)


def _level_type(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("level must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--cache", metavar="DIR", help=f"cache directory (default: ${CACHE_ENV})")

    with_n = argparse.ArgumentParser(add_help=False)
    with_n.add_argument("--n", type=_n_type, default=2)
    with_n.add_argument("--normalization", choices=("raw", "saito"), default="saito")

    dual_opts = argparse.ArgumentParser(add_help=False)
    dual_opts.add_argument("--weights", type=_weights_type, metavar="A,B",
                           help="weights of orbit II (p_i +- p_j) and orbit I (p_i), normalized")
    dual_opts.add_argument("--invariant-c", type=_rational, metavar="RATIONAL",
                           help="parameter c of the second B2 invariant (symbolic if omitted)")

    p = argparse.ArgumentParser(prog="orbitfold", description="Exact Frobenius structure on the B_n orbit space")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("construct", parents=[common, with_n], help="write pencil, flat chart, structure and F")
    c.add_argument("--out", default=".", metavar="DIR")
    v = sub.add_parser("verify", parents=[common, with_n, dual_opts], help="run check suites")
    v.add_argument("--checks", type=_checks_type, default=None, metavar="CSV",
                   help=f"any of {','.join(CHECK_SUITES)}")
    v.add_argument("--level", type=_level_type, default=2, help="hierarchy depth")
    sub.add_parser("frobenius", parents=[common, with_n], help="flat chart, structure constants, F")
    d = sub.add_parser("dual", parents=[common, dual_opts], help="dual product pipeline")
    d.add_argument("--group", choices=sorted(GROUPS), default="B2")
    h = sub.add_parser("hierarchy", parents=[common, with_n], help="principal hierarchy flows")
    h.add_argument("--level", type=_level_type, default=1)
    return p


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(ns.command, format=ns.format, cache=ns.cache)
    if ns.command == "dual":
        cfg.n = GROUPS[ns.group]
    else:
        cfg.n = ns.n
        cfg.normalization = ns.normalization
    cfg.weights = getattr(ns, "weights", None)
    ic = getattr(ns, "invariant_c", None)
    cfg.invariant_c = None if ic is None else scalar_str(ic)
    cfg.level = getattr(ns, "level", cfg.level)
    cfg.out = getattr(ns, "out", ".")
    checks = getattr(ns, "checks", None)
    if checks is None:
        checks = DEFAULT_CHECKS + (("dual",) if cfg.n <= 4 and ns.command == "verify" else ())
    cfg.checks = tuple(checks)
    return cfg


# -- construction ----------------------------------------------------------------------

def build_artifacts(cfg: RunConfig) -> dict:
    """File name -> deterministic JSON text."""
    from .flat import flat_coordinates
    from .frobenius import frobenius_structure, integrate_prepotential
    from .pencil import build_pencil

    P = build_pencil(cfg.n, cfg.normalization)
    F = flat_coordinates(P)
    S = frobenius_structure(cfg.n)
    Fp = integrate_prepotential(S)
    frob = frobenius_to_json(S)
    if cfg.normalization != "saito":
        frob["note"] = "structure constants use the saito normalization of the pencil"
    return {
        "pencil.json": dumps(pencil_to_json(P)),
        "flatchart.json": dumps(flat_to_json(F)),
        "frobenius.json": dumps(frob),
        "F.json": dumps(prepotential_to_json(Fp)),
    }


def cached_artifacts(cfg: RunConfig) -> tuple:
    """``(files, from_cache)``; fills the cache when a directory is configured."""
    root = cfg.cache_dir()
    if root is not None:
        d = root / cfg.key()
        if all((d / f).is_file() for f in ARTIFACT_FILES):
            return {f: (d / f).read_text() for f in ARTIFACT_FILES}, True
    files = build_artifacts(cfg)
    if root is not None:
        d = root / cfg.key()
        tmp = root / (cfg.key() + ".tmp")
        shutil.rmtree(tmp, ignore_errors=True)
        tmp.mkdir(parents=True)
        for name, text in files.items():
            (tmp / name).write_text(text)
        (tmp / "config.json").write_text(dumps({"n": cfg.n, "normalization": cfg.normalization,
                                                "version": __version__}))
        shutil.rmtree(d, ignore_errors=True)
        tmp.rename(d)
    return files, False


def cmd_construct(cfg: RunConfig) -> tuple:
    files, hit = cached_artifacts(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    data = {"files": [str(out / f) for f in ARTIFACT_FILES], "cache_hit": hit}
    return data, Report()


# -- verification -------------------------------------------------------------------------

def _suite(name, cfg: RunConfig, ctx: dict) -> Report:
    from .flat import NormalizationError, flat_coordinates, verify_flat_chart
    from .frobenius import (christoffel_ledger, euler_check, frobenius_structure, integrate_prepotential,
                            verify_axioms, wdvv_check)
    from .pencil import (build_pencil, christoffel_degree_report, generating_identity_check,
                         verify_flat_pencil, verify_quasihomogeneity)

    n = cfg.n
    if "P" not in ctx:
        ctx["P"] = build_pencil(n, cfg.normalization)
    P = ctx["P"]

    def structure():
        if "S" not in ctx:
            ctx["S"] = frobenius_structure(n)
        return ctx["S"]

    rep = Report()
    if name == "pencil":
        rep.extend(verify_flat_pencil(P, mode="symbolic" if n <= 5 else "points"))
        rep.extend(christoffel_degree_report(P))
        if n <= 8:
            rep.extend(generating_identity_check(n))
    elif name == "quasihomogeneity":
        rep.extend(verify_quasihomogeneity(P)[1])
    elif name == "flat":
        try:
            rep.extend(verify_flat_chart(P, flat_coordinates(P)))
        except NormalizationError as exc:
            rep.add("flat_chart_rational", n, False, str(exc))
    elif name == "axioms":
        rep.extend(verify_axioms(structure()))
    elif name == "ledger":
        rep.extend(christoffel_ledger(structure()))
    elif name == "wdvv":
        F = integrate_prepotential(structure())
        ctx["F"] = F
        rep.extend(wdvv_check(F))
        rep.extend(euler_check(F))
    elif name == "hierarchy":
        from .hierarchy import verify_hierarchy
        rep.extend(verify_hierarchy(structure(), max(cfg.level, 1)))
    elif name == "dual":
        rep.extend(_dual_checks(cfg, ctx))
    elif name == "classical":
        from .pencil import classical_pencil, classical_prepotential, solve_constancy, verify_classical_pencil
        roots = solve_constancy(classical_pencil().eta_u)
        rep.add("classical_constancy_root", 2, roots == [mpq(-8)], [scalar_str(r) for r in roots or []])
        rep.extend(verify_classical_pencil(-8))
        F = classical_prepotential(-8)
        ctx["classical_F"] = F
        rep.add("classical_prepotential", 2, _classical_expected(F) == F, F)
    return rep


def _classical_expected(F):
    from .algebra import MultiPoly
    ch = F.chart
    u1, u2 = MultiPoly.var(ch, "u1"), MultiPoly.var(ch, "u2")
    return (u1 * u2 * u2).scale(mpq(1, 2)) + (u1 ** 5).scale(mpq(64, 15))


def _dual_checks(cfg: RunConfig, ctx: dict) -> Report:
    from .dual import bridge_check, build_dual_product, verify_dual, verify_dual_product, weights_from_cli

    n = cfg.n
    if n > 4:
        raise UsageError("dual checks are available for n = 2, 3, 4")
    rep = Report()
    if cfg.weights is None:
        if n == 2:
            rep.extend(verify_dual())
        rep.extend(bridge_check(n))
        return rep
    sI, sII = weights_from_cli(*cfg.weights, n)
    if n == 2:
        data, r = _dual_summary(cfg, sI, sII)
        ctx["dual"] = data
        rep.extend(r)
    else:
        W = build_dual_product(n, sI, sII)
        rep.extend(verify_dual_product(W))
        ctx["dual"] = {"weights": {"I": sI, "II": sII}, "cstar": W.c}
    if sI == 0:
        rep.extend(bridge_check(n))
    return rep


def _dual_summary(cfg, sI, sII):
    from .dual import dual_summary, matching_family_c
    c = as_scalar(cfg.invariant_c) if cfg.invariant_c is not None else matching_family_c(sI, sII)
    return dual_summary(sI, sII, c)


def _cache_consistency(cfg: RunConfig) -> Report:
    rep = Report()
    root = cfg.cache_dir()
    if root is None:
        return rep
    d = root / cfg.key()
    if not all((d / f).is_file() for f in ARTIFACT_FILES):
        return rep
    fresh = build_artifacts(cfg)
    bad = [f for f in ARTIFACT_FILES if (d / f).read_text() != fresh[f]]
    rep.add("cached_artifacts_current", cfg.n, not bad, bad or None)
    return rep


def cmd_verify(cfg: RunConfig) -> tuple:
    ctx = {}
    rep = Report()
    for name in cfg.checks:
        rep.extend(_suite(name, cfg, ctx))
    rep.extend(_cache_consistency(cfg))
    data = {"checks": list(cfg.checks)}
    if "F" in ctx:
        data["prepotential"] = str(ctx["F"])
    if "dual" in ctx:
        data["dual"] = _dual_data_json(ctx["dual"])
    return data, rep


# -- frobenius, dual, hierarchy -----------------------------------------------------------

def cmd_frobenius(cfg: RunConfig) -> tuple:
    from .frobenius import (christoffel_ledger, frobenius_structure, integrate_prepotential, verify_axioms,
                            wdvv_check)
    S = frobenius_structure(cfg.n)
    F = integrate_prepotential(S)
    rep = Report()
    rep.extend(verify_axioms(S)).extend(christoffel_ledger(S)).extend(wdvv_check(F))
    n = cfg.n
    data = {
        "t_of_u": polys_to_json(S.flat.t_polys, [f"t{k}" for k in range(1, n + 1)]),
        "u_of_t": polys_to_json(S.flat.u_polys, [f"u{k}" for k in range(1, n + 1)]),
        "structure_constants": tensor_to_json(S.c),
        "prepotential": prepotential_to_json(F),
    }
    return data, rep


def _dual_data_json(data: dict) -> dict:
    out = {"weights": {k: scalar_str(v) for k, v in data["weights"].items()}}
    if "c" in data:
        out["c"] = data["c"] if isinstance(data["c"], str) else scalar_str(data["c"])
    out["cstar"] = tensor_to_json(data["cstar"])
    if "gamma" in data:
        out["connection"] = index_dict_to_json(data["gamma"].lower, data["gamma"].chart)
    if "products" in data:
        out["products"] = {f"d/d{u}": tensor_to_json(T) for u, T in data["products"].items()}
        out["compatible_units"] = [f"d/d{u}" for u in data["compatible_units"]]
        res = {}
        for u, r in data["results"].items():
            entry = {"dual_connection": r.b_status,
                     "b": index_dict_to_json(r.b, r.family.chart) if r.b else None}
            if r.vector_potential is not None:
                entry["vector_potential"] = [str(f) for f in r.vector_potential]
            if r.prepotential is not None:
                entry["prepotential"] = str(r.prepotential)
                entry["branch"] = r.branch
            res[f"d/d{u}"] = entry
        out["results"] = res
    return out


def cmd_dual(cfg: RunConfig) -> tuple:
    from .dual import bridge_check, build_dual_product, verify_dual, verify_dual_product, weights_from_cli
    n = cfg.n
    rep = Report()
    weights = cfg.weights or ((1, 1) if n == 2 else (1, 0))
    sI, sII = weights_from_cli(*weights, n)
    if n == 2:
        data, r = _dual_summary(cfg, sI, sII)
        rep.extend(r)
        if cfg.weights is None:
            rep.extend(verify_dual())
    else:
        W = build_dual_product(n, sI, sII)
        data = {"weights": {"I": sI, "II": sII}, "cstar": W.c}
        rep.extend(verify_dual_product(W))
    if sI == 0:
        rep.extend(bridge_check(n))
    return _dual_data_json(data), rep


def cmd_hierarchy(cfg: RunConfig) -> tuple:
    from .frobenius import frobenius_structure
    from .hierarchy import flows, hierarchy_vectors, verify_hierarchy
    S = frobenius_structure(cfg.n)
    vec = hierarchy_vectors(S, cfg.level)
    fl = [flows(S, a, vec) for a in range(cfg.level + 1)]
    rep = verify_hierarchy(S, max(cfg.level, 1))
    data = {"vectors": [[str(x) for x in X] for X in vec], "flows": [f.to_json() for f in fl]}
    return data, rep


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "frobenius": cmd_frobenius,
            "dual": cmd_dual, "hierarchy": cmd_hierarchy}


# -- output ---------------------------------------------------------------------------------

def _text(cfg: RunConfig, data: dict, rep: Report) -> str:
    lines = [f"orbitfold {cfg.command} n={cfg.n}"]
    if cfg.command == "construct":
        lines += [f"wrote {f}" for f in data["files"]]
        lines.append("cache hit" if data["cache_hit"] else "computed")
    elif cfg.command == "frobenius":
        lines.append("flat coordinates:")
        lines += [f"  {e['name']} = {e['text']}" for e in data["t_of_u"]]
        lines.append("structure constants c^i_jk (1-based):")
        lines += [f"  c^{c['index'][0] + 1}_{c['index'][1] + 1}{c['index'][2] + 1} = {c['text']}"
                  for c in data["structure_constants"]["components"]]
        lines.append(f"F = {data['prepotential']['text']}")
    elif cfg.command == "hierarchy":
        for a, X in enumerate(data["vectors"]):
            lines.append(f"X_({a}) = ({', '.join(X)})")
        for f in data["flows"]:
            lines += f["text"]
    elif cfg.command in ("dual", "verify") and ("cstar" in data or "dual" in data):
        d = data.get("dual", data)
        lines.append(f"weights: orbit I {d['weights']['I']}, orbit II {d['weights']['II']}"
                     + (f", c = {d['c']}" if "c" in d else ""))
        lines.append("dual product c*^i_jk:")
        lines += [f"  c*^{c['index'][0] + 1}_{c['index'][1] + 1}{c['index'][2] + 1} = {c['text']}"
                  for c in d["cstar"]["components"]]
        if "connection" in d:
            lines.append("natural connection Gamma^l_ij:")
            lines += [f"  Gamma^{c['index'][0] + 1}_{c['index'][1] + 1}{c['index'][2] + 1} = {c['text']}"
                      for c in d["connection"]["components"]]
        for u, T in d.get("products", {}).items():
            lines.append(f"product with unit {u}:")
            lines += [f"  c^{c['index'][0] + 1}_{c['index'][1] + 1}{c['index'][2] + 1} = {c['text']}"
                      for c in T["components"]]
        if "compatible_units" in d:
            lines.append("compatible units: " + (", ".join(d["compatible_units"]) or "none"))
        for u, r in d.get("results", {}).items():
            lines.append(f"unit {u}: dual connection {r['dual_connection']}")
            for k, f in enumerate(r.get("vector_potential", []), 1):
                lines.append(f"  F^{k} = {f}")
            if "prepotential" in r:
                lines.append(f"  F = {r['prepotential']}  ({r['branch']})")
    if "prepotential" in data and cfg.command == "verify":
        lines.append(f"F = {data['prepotential']}")
    lines.append(rep.to_text() if rep.checks else "(no checks)")
    lines.append("PASS" if rep.passed else f"FAIL ({len(rep.failures())} failing)")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg = config_from_args(ns)
    try:
        data, rep = COMMANDS[cfg.command](cfg)
        status = EXIT_OK if rep.passed else EXIT_FAIL
        error = None
    except UsageError as exc:
        data, rep, status, error = {}, Report(), EXIT_USAGE, {"type": "usage", "message": str(exc)}
    except (ArithmeticError, AssertionError, ValueError) as exc:
        data, rep, status, error = {}, Report(), EXIT_FAIL, {"type": type(exc).__name__, "message": str(exc)}
    if cfg.format == "json":
        cfg_json = asdict(cfg)
        cfg_json["weights"] = None if cfg.weights is None else [scalar_str(w) for w in cfg.weights]
        cfg_json["checks"] = list(cfg.checks)
        out = {"config": cfg_json, "passed": status == EXIT_OK, "exit": status,
               "report": rep.to_json(), "data": data}
        if error:
            out["error"] = error
        stdout.write(dumps(out))
    else:
        if error:
            stdout.write(f"error ({error['type']}): {error['message']}\n")
        else:
            stdout.write(_text(cfg, data, rep))
    return status


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
