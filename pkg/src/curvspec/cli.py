"""Command-line front end.

    curvspec families
    curvspec eval --family gF --s 2 --property jordan-osserman --flavor timelike
    curvspec check --family gf --p 3 --property jordan-ip --flavor mixed
    curvspec reproduce --theorem 3.6

Exit codes: ``check`` returns 0 consistent, 1 falsified, 2 undetermined;
``reproduce`` returns 0 iff every asserted row agrees.  Usage and input errors
exit with 2 as well, with the message on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import classifier as cls
from .geometry import (
    ConstantCurvature,
    DomainError,
    FamilyError,
    FamilyGF,
    HypersurfaceGf,
    MetricFamily,
    ConformalScaling,
    ProductWithFlat,
    WarpedProduct,
    curvature_at,
    metric_at,
)
from .jordan import TOL_EIG, TOL_RANK
from .polynomial import PolyParseError, PolySpec
from .tensor_core import ricci, scalar_curvature, weyl

COMMANDS = ("families", "eval", "check", "reproduce")
EXIT = {"consistent": 0, "falsified": 1, "undetermined": 2}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    p: int | None = None
    q: int | None = None
    s: int | None = None
    a: int | None = None
    b: int | None = None
    eps: int | None = None
    kappa: float | None = None
    A: float | None = None
    B: float | None = None
    c: float | None = None
    base_p: int | None = None
    base_q: int | None = None
    f: str | None = None
    fs: list[str] | None = None
    inner: str | None = None
    alpha: str | None = None
    points: list[list[float]] | None = None
    property: str | None = None
    flavor: str | None = None
    k: int | None = None
    r: int | None = None
    s_type: int | None = None
    scope: str | None = None
    samples: int = 200
    seed: int = 42
    tol_eig: float = TOL_EIG
    tol_rank: float = TOL_RANK
    theorem: str | None = None
    theorem_params: dict = field(default_factory=dict)
    format: str = "text"
    out: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.format not in ("text", "json"):
            raise UsageError(f"format must be text or json, got {self.format!r}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown config keys: {', '.join(sorted(extra))}")
        return cls(**data)

    def check_config(self) -> cls.CheckConfig:
        return cls.CheckConfig(samples=self.samples, seed=self.seed, tol_eig=self.tol_eig, tol_rank=self.tol_rank)

    def property_spec(self) -> cls.PropertySpec:
        if self.property is None:
            raise UsageError("--property is required")
        flavor = self.flavor or ("spacelike" if self.property != "osserman-type-rs" else None)
        return cls.PropertySpec(self.property, flavor, self.k, self.r, self.s_type, self.scope)


# -- families -----------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyInfo:
    name: str
    description: str
    params: dict  # parameter -> (type, default or "required", meaning)


FAMILIES = {
    "flat": FamilyInfo("flat", "flat metric of signature (p, q)",
                       {"p": ("int", 0, "timelike directions"), "q": ("int", 2, "spacelike directions")}),
    "const": FamilyInfo("const", "constant sectional curvature c, conformally flat chart",
                        {"c": ("float", 1.0, "sectional curvature"), "p": ("int", 0, "timelike directions"),
                         "q": ("int", 2, "spacelike directions")}),
    "warped": FamilyInfo("warped", "eps dt^2 + (eps kappa t^2 + A t + B) g_N over a curvature-kappa base N",
                         {"eps": ("int", 1, "+1 or -1"), "kappa": ("float", 1.0, "base curvature"),
                          "A": ("float", 1.0, "linear warp coefficient"), "B": ("float", 1.0, "constant warp coefficient"),
                          "base_p": ("int", 0, "base timelike directions"), "base_q": ("int", 2, "base spacelike directions")}),
    "gf": FamilyInfo("gf", "neutral 2-nilpotent metric on (x, y) from a polynomial f(x); hypersurface chart",
                     {"p": ("int", 2, "half dimension, p >= 2"),
                      "f": ("poly in x1..xp", "sum x_i^2 + 0.1 x_i^4", "defining function")}),
    "gF": FamilyInfo("gF", "signature (2s, s) 3-nilpotent metric on (u, t, v) from f_1..f_s",
                     {"s": ("int", 2, "s >= 2"),
                      "f1..fs": ("poly in u", "u^3 + (i/10) u^4", "one univariate function per u_i; --f sets all")}),
    "product": FamilyInfo("product", "product of an inner family with flat R^(a,b)",
                          {"inner": ("family", "gf", "any other family, configured by the same flags"),
                           "a": ("int", 0, "flat timelike directions"), "b": ("int", 0, "flat spacelike directions")}),
    "conformal": FamilyInfo("conformal", "alpha * g for an inner family and a positive polynomial alpha",
                            {"inner": ("family", "gF", "any other family"),
                             "alpha": ("poly in the inner coordinates", "required", "conformal factor")}),
}


def _or(value, default):
    return default if value is None else value


def _poly(text: str, variables, what: str) -> PolySpec:
    return PolySpec.parse(text, variables)


def build_family(cfg: RunConfig, name: str | None = None) -> MetricFamily:
    name = name or cfg.family
    if name is None:
        raise UsageError("--family is required")
    if name == "flat":
        return ConstantCurvature(0.0, _or(cfg.p, 0), _or(cfg.q, 2))
    if name == "const":
        return ConstantCurvature(_or(cfg.c, 1.0), _or(cfg.p, 0), _or(cfg.q, 2))
    if name == "warped":
        return WarpedProduct(_or(cfg.eps, 1), _or(cfg.kappa, 1.0), _or(cfg.A, 1.0), _or(cfg.B, 1.0),
                             _or(cfg.base_p, 0), _or(cfg.base_q, 2))
    if name == "gf":
        p = _or(cfg.p, 2)
        if cfg.f is None:
            return HypersurfaceGf.definite_default(p)
        return HypersurfaceGf(p, _poly(cfg.f, [f"x{i + 1}" for i in range(p)], "f"))
    if name == "gF":
        s = _or(cfg.s, 2)
        if cfg.fs is None and cfg.f is None:
            return FamilyGF.default(s)
        texts = cfg.fs if cfg.fs is not None else [cfg.f] * s
        if len(texts) != s:
            raise UsageError(f"gF with s={s} needs {s} functions, got {len(texts)}")
        return FamilyGF(s, tuple(_poly(t, ["u"], f"f{i + 1}") for i, t in enumerate(texts)))
    if name in ("product", "conformal"):
        inner_name = cfg.inner or ("gf" if name == "product" else "gF")
        if inner_name in ("product", "conformal"):
            raise UsageError(f"inner family of {name} must be a base family")
        inner = build_family(cfg, inner_name)
        if name == "product":
            return ProductWithFlat(inner, _or(cfg.a, 0), _or(cfg.b, 0))
        if cfg.alpha is None:
            raise UsageError("conformal family needs --alpha")
        return ConformalScaling(inner, _poly(cfg.alpha, inner.coordinates, "alpha"))
    raise UsageError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def cmd_families(cfg: RunConfig) -> tuple[dict, str, int]:
    data = {"families": [asdict(info) for info in FAMILIES.values()]}
    lines = []
    for info in FAMILIES.values():
        lines.append(f"{info.name}: {info.description}")
        for k, (typ, default, meaning) in info.params.items():
            lines.append(f"    {k:<7} {typ:<28} default {default}  ({meaning})")
    return data, "\n".join(lines), 0


# -- eval -----------------------------------------------------------------------------


def _points(cfg: RunConfig, fam: MetricFamily) -> list[np.ndarray]:
    pts = cfg.points if cfg.points is not None else fam.default_points(5)
    out = [np.asarray(P, float) for P in pts]
    for P in out:
        fam.check_domain(P)
    return out


def _clean(a: np.ndarray) -> list:
    # +0.0 for -0.0 so that dumps are stable across sign-of-zero noise
    return (np.asarray(a, float) + 0.0).tolist()


def cmd_eval(cfg: RunConfig) -> tuple[dict, str, int]:
    fam = build_family(cfg)
    spec = cfg.property_spec() if cfg.property else None
    ccfg = cfg.check_config()
    dumps, lines = [], [f"family {fam.name} {json.dumps(fam.params(), default=str)}"]
    for i, P in enumerate(_points(cfg, fam)):
        g = metric_at(fam, P)
        A = curvature_at(fam, P)
        rho = ricci(A, g)
        tau = scalar_curvature(rho, g)
        W = weyl(A, g)
        entry = {"point": P.tolist(), "signature": list(g.signature), "metric": _clean(g.matrix),
                 "curvature": _clean(A.components), "ricci": _clean(rho.matrix), "tau": float(tau) + 0.0,
                 "weyl": _clean(W.components)}
        lines.append(f"point {P.tolist()}: signature {g.signature}, |R| = {A.max_abs():.6g}, "
                     f"|Ric| = {np.max(np.abs(rho.matrix)):.6g}, tau = {tau:.6g}, |W - R| = "
                     f"{np.max(np.abs(W.components - A.components)):.3g}")
        if spec is not None:
            fr, M, T = cls.sample_operator(fam, spec, P, ccfg, i)
            entry["operator"] = {"property": spec.property, "flavor": spec.flavor, "frame": _clean(fr.vectors),
                                 "eps": list(fr.eps), "matrix": _clean(M), "jordan_type": T.to_json(),
                                 "uncertain": T.uncertain}
            lines.append(f"    {spec.label()} operator on a sampled frame: Jordan type {T}")
        dumps.append(entry)
    return {"family": fam.name, "family_params": json.loads(json.dumps(fam.params(), default=str)),
            "points": dumps}, "\n".join(lines), 0


# -- check / reproduce ------------------------------------------------------------------


def cmd_check(cfg: RunConfig) -> tuple[dict, str, int]:
    fam = build_family(cfg)
    spec = cfg.property_spec()
    pts = _points(cfg, fam) if cfg.points is not None else None
    v = cls.check(fam, spec, pts, cfg.check_config())
    text = [f"{spec.label()} on {fam.name}: {v.status}"]
    if v.reference_jordan_type is not None:
        text.append(f"  reference Jordan type {v.reference_jordan_type}")
    if v.witness:
        m = v.witness["mismatch"]
        text.append(f"  witness at point {m['point']} ({m['found_by']}): {m['jordan_type']}")
    if v.note:
        text.append(f"  note: {v.note}")
    text.append(f"  {v.samples_used} samples, {v.uncertain_count} uncertain, seed {v.seed}")
    return {"config": cfg.to_json(), "verdict": v.to_json()}, "\n".join(text), EXIT[v.status]


def cmd_reproduce(cfg: RunConfig) -> tuple[dict, str, int]:
    if cfg.theorem is None:
        raise UsageError(f"--theorem is required; choose from {', '.join(cls.THEOREMS)}")
    rep = cls.check_suite_theorem(cfg.theorem, cfg.theorem_params, cfg.check_config())
    return {"config": cfg.to_json(), "report": rep.to_json()}, rep.to_text(), 0 if rep.all_agree else 1


HANDLERS = {"families": cmd_families, "eval": cmd_eval, "check": cmd_check, "reproduce": cmd_reproduce}


# -- argument parsing ---------------------------------------------------------------


def _parse_point(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvspec", description="Curvature operators and their Jordan forms.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
    fam = ap.add_argument_group("family")
    fam.add_argument("--family", choices=list(FAMILIES))
    fam.add_argument("--inner", choices=[n for n in FAMILIES if n not in ("product", "conformal")])
    for name in ("p", "q", "s", "a", "b", "base-p", "base-q"):
        fam.add_argument(f"--{name}", type=int)
    fam.add_argument("--eps", type=int, choices=(1, -1))
    for name in ("kappa", "A", "B", "c"):
        fam.add_argument(f"--{name}", type=float)
    fam.add_argument("--f", help="polynomial; for gF it sets every f_i")
    fam.add_argument("--alpha", help="conformal factor polynomial")
    fam.add_argument("--point", action="append", help="comma-separated coordinates; repeatable")
    fam.add_argument("--points", help="points separated by ';'")
    prop = ap.add_argument_group("property")
    prop.add_argument("--property", choices=cls.PROPERTIES)
    prop.add_argument("--flavor", choices=cls.FLAVORS)
    prop.add_argument("--k", type=int)
    prop.add_argument("--r", type=int, help="timelike count for osserman-type-rs")
    prop.add_argument("--s-type", type=int, help="spacelike count for osserman-type-rs")
    prop.add_argument("--scope", choices=("pointwise", "global"))
    run = ap.add_argument_group("run")
    run.add_argument("--samples", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--tol-eig", type=float)
    run.add_argument("--tol-rank", type=float)
    run.add_argument("--theorem", choices=list(cls.THEOREMS))
    run.add_argument("--format", choices=("text", "json"))
    run.add_argument("--out")
    return ap


_FN = re.compile(r"--f(\d+)(?:=(.*))?$")


def _split_fn(argv: list[str]) -> tuple[list[str], dict[int, str]]:
    """Pull ``--f1 .. --fN`` out of ``argv``."""
    rest, fn = [], {}
    i = 0
    while i < len(argv):
        m = _FN.match(argv[i])
        if m:
            if m.group(2) is not None:
                fn[int(m.group(1))] = m.group(2)
            elif i + 1 < len(argv):
                fn[int(m.group(1))] = argv[i + 1]
                i += 1
            else:
                raise UsageError(f"{argv[i]} needs a value")
        else:
            rest.append(argv[i])
        i += 1
    return rest, fn


def config_from_args(argv: list[str], environ=os.environ) -> RunConfig:
    argv, fn = _split_fn(list(argv))
    ns = build_parser().parse_args(argv)
    data: dict = {}
    if ns.config:
        with open(ns.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
    data["command"] = ns.command
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config", "point", "points") and v is not None}
    data.update(flags)
    pts = [_parse_point(t) for t in (ns.point or [])]
    if ns.points:
        pts += [_parse_point(t) for t in ns.points.split(";") if t.strip()]
    if pts:
        data["points"] = pts
    if fn:
        if sorted(fn) != list(range(1, len(fn) + 1)):
            raise UsageError(f"--f1..--fN must be consecutive, got {sorted(fn)}")
        data["fs"] = [fn[i] for i in sorted(fn)]
    if "seed" not in data and environ.get("CURV_SEED"):
        try:
            data["seed"] = int(environ["CURV_SEED"])
        except ValueError:
            raise UsageError(f"CURV_SEED must be an integer, got {environ['CURV_SEED']!r}") from None
    return RunConfig.from_json(data)


def run(cfg: RunConfig) -> tuple[dict, str, int]:
    return HANDLERS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        data, text, code = run(cfg)
    except (UsageError, PolyParseError, FamilyError, DomainError, cls.SpecError, cls.HypothesisError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    body = json.dumps(data, indent=2, sort_keys=True) if cfg.format == "json" else text
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(body + "\n")
    else:
        print(body)
    return code


if __name__ == "__main__":
    sys.exit(main())
