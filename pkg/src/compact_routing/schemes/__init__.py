"""Scheme registry: build, per-hop step, label size and stretch bound per id."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..graph import Graph
from ..oracle import ShortestPaths
from . import general, parts, small, tz
from .common import SchemeError, SchemeInstance, SchemeParams, make_route_step


@dataclass(frozen=True)
class SchemeSpec:
    name: str
    build: Callable
    start: Callable
    label_bits: Callable
    bound: Callable[[SchemeParams], tuple[Fraction, Fraction]]  # (multiplier, additive)
    bound_text: str
    unweighted_only: bool = False


def _mul(expr):
    return lambda p: (Fraction(expr(p)), Fraction(0))


SCHEMES: dict[str, SchemeSpec] = {
    s.name: s
    for s in [
        SchemeSpec("t1", parts.build_t1, parts.start_t1, parts.bits_plain,
                   _mul(lambda p: 1 + p.eps), "(1+eps)*d on same-class pairs"),
        SchemeSpec("t2", parts.build_t2, parts.start_t2, parts.bits_plain,
                   _mul(lambda p: 1 + p.eps), "(1+eps)*d on U_j -> W_j pairs"),
        SchemeSpec("warmup3", small.build_warmup3, small.start_warmup3, small.bits_warmup3,
                   _mul(lambda p: 3 + 2 * p.eps), "(3+2eps)*d"),
        SchemeSpec("scheme21", small.build_scheme21, small.start_scheme21, small.bits_scheme21,
                   lambda p: (2 + 2 * p.eps, Fraction(1)), "(2+2eps)*d + 1", True),
        SchemeSpec("scheme5", small.build_scheme5, small.start_scheme5, small.bits_scheme5,
                   _mul(lambda p: 5 + 3 * p.eps), "(5+3eps)*d"),
        SchemeSpec("gen_minus", general.build_gen_minus, general.start_gen_minus, general.bits_general,
                   lambda p: (3 + 3 * p.eps - (2 + p.eps) / p.ell, Fraction(2)),
                   "(3+3eps-(2+eps)/l)*d + 2", True),
        SchemeSpec("gen_plus", general.build_gen_plus, general.start_gen_plus, general.bits_general,
                   lambda p: (3 + Fraction(2, p.ell) + 4 * p.eps, Fraction(2)),
                   "(3+2/l+4eps)*d + 2", True),
        SchemeSpec("tz45", tz.build_tz45, tz.start_tz45, tz.bits_tz45,
                   _mul(lambda p: 4 * p.k - 5), "(4k-5)*d"),
        SchemeSpec("scheme4k7", tz.build_scheme4k7, tz.start_scheme4k7, tz.bits_scheme4k7,
                   _mul(lambda p: 4 * p.k - 7 + p.eps * (2 * p.k - 3)), "(4k-7+eps(2k-3))*d"),
    ]
}

_STEPS = {name: make_route_step(spec.start) for name, spec in SCHEMES.items()}


def get_spec(name: str) -> SchemeSpec:
    try:
        return SCHEMES[name]
    except KeyError:
        raise SchemeError(f"unknown scheme {name!r}; known: {', '.join(SCHEMES)}") from None


def validate_params(name: str, params: SchemeParams) -> None:
    get_spec(name)
    if name == "scheme4k7" and params.k < 3:
        raise SchemeError("scheme4k7 needs k >= 3 (4k-7 is vacuous for k = 2)")
    if name == "tz45" and params.k < 2:
        raise SchemeError("tz45 needs k >= 2")
    if name in ("gen_minus", "gen_plus") and params.ell < 2:
        raise SchemeError(f"{name} needs l >= 2")


def build_scheme(name: str, g: Graph | ShortestPaths, params: SchemeParams | None = None) -> SchemeInstance:
    params = params or SchemeParams()
    validate_params(name, params)
    sp = g if isinstance(g, ShortestPaths) else ShortestPaths(g)
    spec = get_spec(name)
    if spec.unweighted_only and not sp.g.is_unweighted:
        raise SchemeError("scheme requires unweighted")
    inst = spec.build(sp, params)
    inst.info["bound"] = spec.bound_text
    return inst


def route_step_for(name: str):
    """The per-hop function ``(own table, label, header) -> (port, header, event)``."""
    get_spec(name)
    return _STEPS[name]


def stretch_bound(name: str, params: SchemeParams, d) -> Fraction:
    mul, add = get_spec(name).bound(params)
    return mul * d + add


def label_bits(inst: SchemeInstance, v: int) -> int:
    return get_spec(inst.scheme).label_bits(inst.labels[v], inst.bw, inst.info)


__all__ = [
    "SCHEMES", "SchemeError", "SchemeInstance", "SchemeParams", "SchemeSpec", "build_scheme",
    "get_spec", "label_bits", "route_step_for", "stretch_bound", "validate_params",
]
