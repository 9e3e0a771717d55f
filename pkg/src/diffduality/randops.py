"""Seeded random operators for property checks."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from .coefficients import MultiPoly, RatFunc
from .diffop import DiffOp, SpaceSpec, divergence_certificate, euler_divergence_test, op_adjoint, op_compose


def random_coefficient(rng: random.Random, nvars: int, rational: bool = True) -> RatFunc:
    """A small polynomial of degree <= 2, sometimes divided by a linear form."""
    terms = {}
    for _ in range(rng.randint(1, 3)):
        e = [0] * nvars
        for _ in range(rng.randint(0, 2)):
            e[rng.randrange(nvars)] += 1
        terms[tuple(e)] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    c = RatFunc(MultiPoly(nvars, terms))
    if not c:
        c = RatFunc.one(nvars)
    if rational and rng.random() < 0.3:
        i = rng.randrange(nvars)
        x_i = tuple(1 if k == i else 0 for k in range(nvars))
        c = c / RatFunc(MultiPoly(nvars, {(0,) * nvars: Fraction(rng.randint(1, 3)), x_i: Fraction(1)}))
    return c


def random_space(rng: random.Random, name: str, dim: int, weighted: bool = True) -> SpaceSpec:
    weights = [Fraction(rng.choice([1, 1, 2, 3]), rng.choice([1, 2])) if weighted else 1 for _ in range(dim)]
    return SpaceSpec.make(name, dim, [f"{name}{k + 1}" for k in range(dim)], weights)


def random_diffop(rng: random.Random, nvars: int = 2, src: SpaceSpec | int = 2, dst: SpaceSpec | int = 2,
                  max_order: int = 2, density: float = 0.6, rational: bool = True) -> DiffOp:
    if isinstance(src, int):
        src = random_space(rng, "u", src)
    if isinstance(dst, int):
        dst = random_space(rng, "v", dst)
    mus = [mu for mu in product(range(max_order + 1), repeat=nvars) if sum(mu) <= max_order]
    entries = {}
    for r in range(dst.dim):
        for c in range(src.dim):
            if rng.random() > density:
                continue
            e = {}
            for mu in rng.sample(mus, rng.randint(1, min(3, len(mus)))):
                e[mu] = random_coefficient(rng, nvars, rational)
            entries[(r, c)] = e
    return DiffOp(src, dst, nvars, entries)


def property_failures(seed: int, count: int = 20, nvars: int = 2) -> list:
    """Run the adjoint properties on ``count`` random cases; return failure messages."""
    rng = random.Random(seed)
    bad = []
    for k in range(count):
        d = random_diffop(rng, nvars, rng.randint(1, 3), rng.randint(1, 3))
        if op_adjoint(op_adjoint(d)) != d.retarget():
            bad.append(f"case {k}: ad(ad(D)) != D")
        mid = random_space(rng, "w", rng.randint(1, 3))
        d1 = random_diffop(rng, nvars, d.dst, mid, max_order=1)
        if op_adjoint(op_compose(d1, d)) != op_compose(op_adjoint(d), op_adjoint(d1)):
            bad.append(f"case {k}: ad(D2 o D1) != ad(D1) o ad(D2)")
        if not euler_divergence_test(divergence_certificate(d)):
            bad.append(f"case {k}: pairing defect is not a divergence")
    return bad
