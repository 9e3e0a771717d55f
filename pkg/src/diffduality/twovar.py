"""A projective first-order system in two variables over Q(x1, x2).

``D1 eta = d1 eta1 + d2 eta2 - x2 eta1`` together with the operators of its
primal and adjoint sequences, written out explicitly so the engine's output
can be compared against hand-derived formulas.
"""

from __future__ import annotations

from .coefficients import parse_coefficient
from .diffop import DiffOp, SpaceSpec

NVARS = 2

ETA = SpaceSpec.make("eta", 2, ["eta1", "eta2"])
ZETA = SpaceSpec.make("zeta", 1, ["zeta"])
XI = SpaceSpec.make("xi", 2, ["xi1", "xi2"])
PHI = SpaceSpec.make("phi", 1, ["phi"])
THETA = SpaceSpec.make("theta", 1, ["theta"])
LAMBDA = ZETA.dual()
MU = ETA.dual()
NU = XI.dual()


def _mu(spec: str):
    return tuple(int(c) for c in spec)


def _op(src, dst, rows) -> DiffOp:
    """``rows``: per output row a list of (column, derivative pattern, coefficient text)."""
    built = []
    for row in rows:
        r = {}
        for col, mu, coef in row:
            key = (col, _mu(mu))
            c = parse_coefficient(coef, NVARS)
            r[key] = r[key] + c if key in r else c
        built.append(r)
    return DiffOp.from_rows(src, dst, NVARS, built)


def system() -> DiffOp:
    """``D1 : eta -> zeta``."""
    return _op(ETA, ZETA, [[(0, "10", "1"), (0, "00", "-x2"), (1, "01", "1")]])


def adjoint_displayed() -> DiffOp:
    """``ad(D1) : lambda -> mu``: ``mu1 = -d1 lambda - x2 lambda``, ``mu2 = -d2 lambda``."""
    return _op(LAMBDA, MU, [[(0, "10", "-1"), (0, "00", "-x2")], [(0, "01", "-1")]])


def lambda_recovery() -> DiffOp:
    """``mu -> lambda``: ``lambda = d1 mu2 - d2 mu1 + x2 mu2`` (a left inverse of ``ad(D1)``)."""
    return _op(MU, LAMBDA, [[(1, "10", "1"), (0, "01", "-1"), (1, "00", "x2")]])


def adjoint_cc_displayed() -> DiffOp:
    """``ad(D) : mu -> nu``, the CC of ``ad(D1)`` as written by hand."""
    return _op(MU, NU, [
        [(1, "20", "-1"), (0, "11", "1"), (1, "10", "-2*x2"), (0, "01", "x2"), (1, "00", "-x2^2"),
         (0, "00", "-1")],
        [(1, "11", "-1"), (0, "02", "1"), (1, "01", "-x2"), (1, "00", "-2")],
    ])


def theta_row() -> DiffOp:
    """``ad(D_-1) : nu -> theta``: ``theta = d1 nu2 - d2 nu1 + x2 nu2``."""
    return _op(NU, THETA, [[(1, "10", "1"), (0, "01", "-1"), (1, "00", "x2")]])


def parametrization_displayed() -> DiffOp:
    """Second-order ``D : xi -> eta``."""
    return _op(XI, ETA, [
        [(0, "11", "1"), (1, "02", "1"), (0, "01", "-x2"), (0, "00", "-2")],
        [(0, "20", "-1"), (1, "11", "-1"), (0, "10", "2*x2"), (1, "01", "x2"), (0, "00", "-x2^2"),
         (1, "00", "-1")],
    ])


def potential_map() -> DiffOp:
    """``D_-1 : phi -> xi``: ``xi1 = d2 phi``, ``xi2 = -d1 phi + x2 phi``; ``D o D_-1 = 0``."""
    return _op(PHI, XI, [[(0, "01", "1")], [(0, "10", "-1"), (0, "00", "x2")]])


def stream_function_map() -> DiffOp:
    """``phi -> xi``: ``xi1 = d2 phi``, ``xi2 = -d1 phi`` (solves ``d1 xi1 + d2 xi2 = 0``)."""
    return _op(PHI, XI, [[(0, "01", "1")], [(0, "10", "-1")]])


def stream_parametrization_displayed() -> DiffOp:
    """``D`` after the stream-function substitution."""
    return _op(PHI, ETA, [
        [(0, "02", "-x2"), (0, "01", "-2")],
        [(0, "11", "x2"), (0, "01", "-x2^2"), (0, "10", "1")],
    ])


def divergence_constraint() -> DiffOp:
    """``xi -> d1 xi1 + d2 xi2``."""
    return _op(XI, SpaceSpec.make("c", 1, ["c"]), [[(0, "10", "1"), (1, "01", "1")]])


def relative_parametrization_displayed() -> DiffOp:
    """First-order operator equal to ``D`` on potentials with ``d1 xi1 + d2 xi2 = 0``."""
    return _op(XI, ETA, [
        [(0, "01", "-x2"), (0, "00", "-2")],
        [(0, "10", "x2"), (0, "00", "-x2^2"), (1, "00", "-1")],
    ])
