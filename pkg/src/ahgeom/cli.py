"""Command-line front end: run test suites on catalog models or definition files."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from . import classify as cl
from . import models
from . import submanifold as sub
from .manifold import ChartManifold, ManifoldError, validate
from .report import dumps

SUBCOMMANDS = ("validate", "classify", "constant-type", "spaceform", "rizza", "submanifold", "all")
MANIFOLD_SUITES = ("validate", "classify", "constant-type", "spaceform", "rizza")
VALUE_TOL = 1e-6  # agreement required between expected and observed numbers


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: Optional[str] = None
    input: Optional[str] = None
    seed: int = 0
    points: int = 64
    frames: int = 8
    pairs: int = 32
    tol: Optional[float] = None
    report: Optional[str] = None
    json: bool = False

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "model": self.model,
            "input": self.input,
            "seed": self.seed,
            "points": self.points,
            "frames": self.frames,
            "pairs": self.pairs,
            "tol": self.tol,
        }


class InputError(Exception):
    pass


# -- loading -----------------------------------------------------------------


def load_definition(path: Union[str, Path]) -> Union[ChartManifold, sub.Embedding]:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: definition must be a JSON object")
    try:
        if "phi" in data:
            E = sub.Embedding.from_dict(data, models.manifold_by_name)
            E.phi_expr
            _check_exprs(E.ambient)
            return E
        M = ChartManifold.from_dict(data)
        _check_exprs(M)
        return M
    except KeyError as exc:
        raise InputError(f"{path}: {exc.args[0]}") from exc
    except (ManifoldError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _check_exprs(M: ChartManifold) -> None:
    M.g_expr
    if M.hermitian:
        M.J_expr


def _expected_for(model) -> Optional[dict]:
    """Catalog expectations, provided the definition is the catalog one verbatim."""
    try:
        entry = models.get(model.name)
    except KeyError:
        return None
    return entry.expected if entry.model == model else None


# -- suites ------------------------------------------------------------------


def _tol(cfg: RunConfig) -> dict:
    return {} if cfg.tol is None else {"tol": cfg.tol}


def suite_validate(M: ChartManifold, cfg: RunConfig):
    rep = validate(M, cfg.points, cfg.seed, **_tol(cfg))
    return rep, {"validate": rep.passed}


def suite_classify(M: ChartManifold, cfg: RunConfig):
    cv = cl.classify(M, cfg.points, cfg.frames, cfg.pairs, cfg.seed, **_tol(cfg))
    obs = {k: v for k, v in cv.flags.items() if k != "constant_curvature"}
    anyk = cv.tests["sectional_any"]
    obs["sectional_constant"] = anyk.estimate if anyk.stat.verdict else None
    if "holomorphic_sectional" in cv.tests:
        hol = cv.tests["holomorphic_sectional"]
        obs["mu"] = hol.estimate if hol.stat.verdict else None
    if "antiholomorphic_sectional" in cv.tests:
        anti = cv.tests["antiholomorphic_sectional"]
        obs["nu"] = anti.estimate if anti.stat.verdict else None
    return cv, obs


def suite_constant_type(M: ChartManifold, cfg: RunConfig):
    if not M.hermitian or M.dim < 4:
        return {"gated": "constant type needs an almost Hermitian manifold of dimension >= 4"}, {}
    args = (M, cfg.points, cfg.pairs, cfg.seed)
    strict = cl.constant_type_test(*args, **_tol(cfg))
    weak = cl.weak_constant_type_test(*args, **_tol(cfg))
    th = cl.theorem41_check(M, cfg.points, cfg.frames, cfg.pairs, cfg.seed, **_tol(cfg))
    section = {"constant_type": strict, "weak_constant_type": weak,
               "eq45": cl.eq45_residual(*args, **_tol(cfg)), "theorem41": th}
    obs = {
        "constant_type": strict.verdict,
        "alpha_type": strict.constants["alpha"] if strict.verdict else None,
        "weak_constant_type": weak.verdict,
        "alpha_weak": weak.constants["alpha"] if weak.verdict else None,
        "theorem41": th.status,
    }
    return section, obs


def suite_spaceform(M: ChartManifold, cfg: RunConfig):
    fit = cl.spaceform_fit(M, cfg.points, cfg.frames, cfg.seed, **_tol(cfg))
    section = {"fit": fit}
    obs = {"spaceform_fit": fit.stat.verdict,
           "spaceform": (fit.alpha, fit.beta) if fit.stat.verdict else None}
    if M.hermitian:
        # independent cross-check of the fitted holomorphic curvature
        hol = cl.sectional_constancy(M, "holomorphic", cfg.points, cfg.pairs, cfg.seed, **_tol(cfg))
        section["holomorphic_sampling"] = hol
        if fit.holomorphic_curvature is not None and fit.stat.verdict:
            section["holomorphic_mismatch"] = abs(fit.holomorphic_curvature - hol.estimate)
            obs["holomorphic_curvature"] = fit.holomorphic_curvature
    return section, obs


def suite_rizza(M: ChartManifold, cfg: RunConfig):
    if not M.hermitian:
        return {"gated": "the identity needs an almost complex structure"}, {}
    stat = cl.rizza_identity_residual(M, cfg.points, cfg.frames, cfg.pairs, cfg.seed, **_tol(cfg))
    return stat, {"rizza": "INCONCLUSIVE" if stat.inconclusive else stat.verdict}


def suite_submanifold(E: sub.Embedding, cfg: RunConfig):
    t = _tol(cfg)
    sps = sub._subpoints(E, cfg.points, cfg.seed)
    kw = dict(points=cfg.points, seed=cfg.seed, subpoints=sps)
    section = {}
    obs = {}
    tg = sub.totally_geodesic_test(E, **kw, **t)
    section["totally_geodesic"] = tg
    obs["totally_geodesic"] = tg.verdict
    if E.subdim >= 2:
        umb = sub.umbilical_test(E, **kw, **t)
        section["umbilical"] = umb
        obs["umbilical"] = umb.verdict
        obs["mean_curvature"] = umb.constants["mean_curvature"]
    par = sub.parallel_H_test(E, **kw, **t)
    cod = sub.codazzi_residual(E, cfg.points, cfg.seed, subpoints=sps, **t)
    section.update(parallel_H=par, codazzi=cod, weingarten=sub.weingarten_test(E, **kw))
    obs.update(parallel_H=par.verdict, codazzi=cod.verdict)
    if E.ambient.hermitian:
        hol = sub.holomorphic_test(E, **kw, **t)
        section["holomorphic"] = hol
        obs.update(holomorphic=hol.verdict, holomorphic_residual=hol.max)
    weak = sub.r_invariance_residual(E, "weak", cfg.points, cfg.seed, subpoints=sps, **t)
    strong = sub.r_invariance_residual(E, "strong", cfg.points, cfg.seed, subpoints=sps, **t)
    section.update(r_invariance_weak=weak, r_invariance_strong=strong)
    obs.update(r_invariant=weak.verdict, strongly_r_invariant=strong.verdict)
    th52 = sub.theorem52_check(E, **kw, **t)
    th61 = sub.theorem61_check(E, **kw, pairs=cfg.pairs, **t)
    th62 = sub.theorem62_check(E, **kw, pairs=cfg.pairs, **t)
    section.update(theorem52=th52, theorem61=th61, theorem62=th62)
    obs.update(theorem52=th52.status, theorem61=th61.status, theorem62=th62.status)
    return section, obs


SUITES = {
    "validate": suite_validate,
    "classify": suite_classify,
    "constant-type": suite_constant_type,
    "spaceform": suite_spaceform,
    "rizza": suite_rizza,
}


# -- comparison --------------------------------------------------------------


def _same(expected, observed) -> bool:
    if isinstance(expected, (tuple, list)):
        if not isinstance(observed, (tuple, list)) or len(expected) != len(observed):
            return False
        return all(_same(a, b) for a, b in zip(expected, observed))
    if expected is None or observed is None:
        return expected is None and observed is None
    if isinstance(expected, bool) or isinstance(observed, (bool, str)) or isinstance(expected, str):
        return expected == observed
    return abs(float(expected) - float(observed)) <= VALUE_TOL


def compare(expected: Optional[dict], observed: dict) -> list[dict]:
    if not expected:
        return []
    out = []
    for key, want in expected.items():
        if key in observed and not _same(want, observed[key]):
            out.append({"key": key, "expected": want, "observed": observed[key]})
    return out


# -- runner ------------------------------------------------------------------


def run_model(model, cfg: RunConfig, expected: Optional[dict] = None) -> dict:
    """Run the configured suites on one manifold or embedding."""
    is_emb = isinstance(model, sub.Embedding)
    command = cfg.command
    if is_emb and command not in ("submanifold", "all", "validate"):
        raise InputError(f"{model.name} is an embedding; use 'submanifold' or 'all'")
    if not is_emb and command == "submanifold":
        raise InputError(f"{model.name} is a manifold, not an embedding")
    ambient = model.ambient if is_emb else model
    result = {"model": model.name, "kind": "embedding" if is_emb else "manifold", "suites": {}}
    observed: dict = {}
    rep, obs = suite_validate(ambient, cfg)
    result["suites"]["validate"] = rep
    if not is_emb:
        observed.update(obs)
    gate = None if rep.passed else f"validation failed for {ambient.name}; dependent suites skipped"
    if is_emb:
        names = [] if command == "validate" else ["submanifold"]
    else:
        names = list(MANIFOLD_SUITES[1:]) if command == "all" else ([] if command == "validate" else [command])
    for name in names:
        if gate:
            result["suites"][name] = {"gated": gate}
            continue
        fn = suite_submanifold if name == "submanifold" else SUITES[name]
        try:
            section, obs = fn(model, cfg)
        except (ManifoldError, cl.FitError, ValueError) as exc:
            section, obs = {"gated": str(exc)}, {}
        result["suites"][name] = section
        observed.update(obs)
    mismatches = compare(expected, observed)
    result["observed"] = observed
    if expected is not None:
        result["expected"] = expected
        result["mismatches"] = mismatches
    result["ok"] = gate is None and not mismatches
    return result


def run(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.input is not None:
        model = load_definition(cfg.input)
        targets = [(model, _expected_for(model))]
    elif cfg.model is not None:
        try:
            entry = models.get(cfg.model)
        except KeyError as exc:
            raise InputError(exc.args[0]) from exc
        targets = [(entry.model, entry.expected)]
    elif cfg.command == "all":
        targets = [(e.model, e.expected) for e in models.catalog()]
    else:
        raise InputError("give --model or --input")
    results = [run_model(m, cfg, exp) for m, exp in targets]
    ok = all(r["ok"] for r in results)
    report = {"tool": "ahgeom", "config": cfg.to_dict(), "results": results, "ok": ok}
    return report, 0 if ok else 1


def _summary(report: dict) -> str:
    lines = []
    for r in report["results"]:
        if r["ok"]:
            lines.append(f"{r['model']}: ok")
            continue
        gated = [f"{k}: {v['gated']}" for k, v in r["suites"].items() if isinstance(v, dict) and "gated" in v]
        bad = [f"{m['key']} expected {m['expected']!r} observed {m['observed']!r}" for m in r.get("mismatches", [])]
        lines.append(f"{r['model']}: FAIL " + "; ".join(bad + gated))
    return "\n".join(lines)


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ahgeom", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = subs.add_parser(name)
        src = p.add_mutually_exclusive_group(required=name != "all")
        src.add_argument("--model", help="catalog model name")
        src.add_argument("--input", help="manifold or embedding definition (JSON)")
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--points", type=_positive, default=64)
        p.add_argument("--frames", type=_positive, default=8)
        p.add_argument("--pairs", type=_positive, default=32)
        p.add_argument("--tol", type=float, default=None, help="override every test tolerance")
        p.add_argument("--report", help="write the JSON report to this path")
        p.add_argument("--json", action="store_true", help="write the JSON report to stdout")
    subs.add_parser("models", help="list catalog models")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "models":
        for e in models.catalog():
            print(f"{e.name}\t{'embedding' if e.is_embedding else 'manifold'}")
        return 0
    cfg = RunConfig(args.command, args.model, args.input, args.seed, args.points, args.frames, args.pairs,
                    args.tol, args.report, args.json)
    try:
        report, status = run(cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report) + "\n"
    if cfg.report:
        Path(cfg.report).write_text(text)
    if cfg.json:
        sys.stdout.write(text)
    else:
        print(_summary(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
