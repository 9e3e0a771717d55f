"""Differential sequences, the adjoint-based parametrization test and helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

from .diffop import DiffOp, SpaceMismatchError, op_adjoint, op_compose, vstack
from .groebner import TermOrder, gb_compute, module_equal, op_rank, syzygy_module


class NotAParametrization(ValueError):
    pass


@dataclass(frozen=True)
class DiffSequence:
    operators: tuple

    def __init__(self, operators: Sequence[DiffOp]):
        ops = tuple(operators)
        if not ops:
            raise ValueError("a sequence needs at least one operator")
        for a, b in zip(ops, ops[1:]):
            if not b.src.compatible(a.dst):
                raise SpaceMismatchError(f"{a.dst.name} does not feed {b.src.name}")
        object.__setattr__(self, "operators", ops)


def is_complex(seq: DiffSequence | Sequence[DiffOp]) -> bool:
    """Every adjacent composition vanishes."""
    ops = seq.operators if isinstance(seq, DiffSequence) else tuple(seq)
    if not ops:
        raise ValueError("empty sequence")
    return all(op_compose(b, a).is_zero() for a, b in zip(ops, ops[1:]))


@dataclass
class ParamReport:
    input: DiffOp
    adjoint1: DiffOp
    candidate: DiffOp
    parametrization: DiffOp
    recomputed: DiffOp
    parametrizable: bool
    witnesses: list = field(default_factory=list)

    def lines(self) -> list:
        out = [
            f"input: {self.input.dst.dim}x{self.input.src.dim} order {self.input.order}",
            f"adjoint1: {self.adjoint1.dst.dim}x{self.adjoint1.src.dim} order {self.adjoint1.order}",
            f"candidate: {self.candidate.dst.dim}x{self.candidate.src.dim} order {self.candidate.order}",
            f"parametrization: {self.parametrization.dst.dim}x{self.parametrization.src.dim} "
            f"order {self.parametrization.order}",
            f"recomputed: {self.recomputed.dst.dim}x{self.recomputed.src.dim} order {self.recomputed.order}",
            f"parametrizable: {'true' if self.parametrizable else 'false'}",
            f"witnesses: {len(self.witnesses)}",
        ]
        return out

    def serialize(self) -> str:
        return "\n".join(self.lines()) + "\n"


def parametrization_test(d1: DiffOp, order: TermOrder | None = None) -> ParamReport:
    """Five steps: ``D1 -> ad(D1) -> ad(D) = CC(ad(D1)) -> D = ad(ad(D)) -> D1' = CC(D)``.

    ``D1`` is parametrizable iff ``D1'`` and ``D1`` generate the same row
    module.  Witnesses are the rows of ``D1'`` (as row dicts) with nonzero
    normal form modulo ``D1``; since ``D1 o D = 0`` always holds, ``D1 <= D1'``
    and the witnesses are empty exactly when the modules agree.
    """
    a1 = op_adjoint(d1)
    cand = syzygy_module(a1, order, name="nu")
    param = op_adjoint(cand)
    d1p = syzygy_module(param, order, name="zeta'")
    if d1.is_zero():
        witnesses = [r for r in d1p.rows() if r]
    else:
        gb = gb_compute(d1, order, track=False)
        witnesses = [r for r in d1p.rows() if r and not gb.contains_row(r)]
    ok = not witnesses
    return ParamReport(d1, a1, cand, param, d1p, ok, witnesses)


def diff_trd(d: DiffOp) -> int:
    """Number of unknowns minus the generic rank of the operator."""
    return d.src.dim - op_rank(d)


def restrict_potentials(d: DiffOp, c: DiffOp) -> DiffOp:
    """Substitute ``xi = c(phi)`` into ``d``."""
    return op_compose(d, c)


def _cc_matches(d: DiffOp, d1: DiffOp) -> bool:
    cc = syzygy_module(d)
    return module_equal(cc, d1)


def minimal_parametrization_search(d: DiffOp, d1: DiffOp,
                                   progress: Callable[[tuple, bool], None] | None = None) -> list:
    """Minimal proper column subsets of ``d`` that still parametrize ``d1``.

    Removing potentials can only enlarge the CC module, so a subset that
    fails has no surviving subsets; the search walks sizes downward from
    ``m-1`` and only visits subsets all of whose one-larger supersets survived.
    """
    if not op_compose(d1, d).is_zero() or not _cc_matches(d, d1):
        raise NotAParametrization("not a parametrization")
    m = d.src.dim
    if m > 12:
        raise ValueError("exhaustive subset search is limited to 12 potentials")
    survivors = {tuple(range(m))}
    found = []
    for size in range(m - 1, 0, -1):
        level = set()
        for sub in combinations(range(m), size):
            if any(tuple(sorted(sub + (c,))) not in survivors for c in range(m) if c not in sub):
                continue
            ok = _cc_matches(d.select_columns(sub), d1)
            if progress is not None:
                progress(sub, ok)
            if ok:
                level.add(sub)
        if not level:
            break
        found.extend(level)
        survivors = level
    alive = set(found)
    minimal = [s for s in alive
               if not any(tuple(t) in alive for t in combinations(s, len(s) - 1) if t)]
    return sorted(minimal, key=lambda s: (len(s), s))


def relative_parametrization(d: DiffOp, constraint: DiffOp, eliminate: Sequence[int]) -> DiffOp:
    """Rewrite ``d`` modulo the constraint ``constraint(xi) = 0``.

    Each row of ``d`` is reduced to its normal form modulo the constraint
    rows, using a POT order in which the components listed in ``eliminate``
    dominate; derivatives of those components are traded for the others
    wherever the constraint allows it.
    """
    if not constraint.src.compatible(d.src):
        raise SpaceMismatchError("constraint must act on the potentials of d")
    order = TermOrder(priority=tuple(eliminate))
    gb = gb_compute(constraint, order, track=False)
    rows = [gb.normal_form_row(r) for r in d.rows()]
    return DiffOp.from_rows(d.src, d.dst, d.nvars, rows)


def constrained_cc(d: DiffOp, constraint: DiffOp) -> DiffOp:
    """CC of ``eta = d(xi)`` for potentials restricted by ``constraint(xi) = 0``.

    A row ``a`` on ``eta`` is a CC iff ``a o d = -b o constraint`` for some ``b``,
    i.e. ``(a, b)`` is a syzygy of the stacked operator; project onto ``a``.
    """
    stacked = vstack([d, constraint])
    syz = syzygy_module(stacked)
    k = d.dst.dim
    proj = syz.select_columns(range(k)).retarget(src=d.dst)
    return proj


def parametrizations_equivalent(a: DiffOp, b: DiffOp) -> bool:
    """Same image module: each of ``ad(a)``, ``ad(b)`` generates the rows of the other.

    Two parametrizations ``eta = a(xi)`` and ``eta = b(xi')`` are equivalent when
    ``a = b o P`` and ``b = a o Q`` for operators ``P, Q``; taking adjoints this is
    row-module equality of ``ad(a)`` and ``ad(b)`` seen as operators on ``eta*``.
    Both must share the target space, the potential spaces may differ.
    """
    if not a.dst.compatible(b.dst):
        raise SpaceMismatchError("parametrizations must land in the same space")
    return module_equal(op_adjoint(a), op_adjoint(b))
