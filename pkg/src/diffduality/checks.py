"""Named identity checks over the gravity chain and the two-variable example.

Each check returns a :class:`CheckResult`; ``witnesses`` lists failure reasons
(empty iff the check passes), ``details`` carries informational values.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from . import twovar
from .diffop import DiffOp, op_adjoint, op_compose
from .fileformat import format_entry
from .gallery import (
    Metric, MetricError, algebraic_map, constraint_coherence_check, dims_table, dual_operator,
    gauge_reduce_einstein, index_map, is_self_adjoint, is_self_adjoint_unpacked, lie_operator,
    linearized_curvature, metric_embed, metric_make, trace_map,
)
from .groebner import module_equal, op_rank, syzygy_module
from .sequences import (
    constrained_cc, is_complex, minimal_parametrization_search, parametrization_test,
    parametrizations_equivalent, relative_parametrization, restrict_potentials,
)


class CheckUsageError(ValueError):
    pass


@dataclass
class CheckResult:
    name: str
    params: dict
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def lines(self, timing: bool = True) -> list:
        out = [f"check: {self.name}"]
        out += [f"{k}: {v}" for k, v in self.params.items()]
        out.append(f"result: {'pass' if self.passed else 'fail'}")
        out += [f"{k}: {v}" for k, v in self.details.items()]
        out += [f"witness: {w}" for w in self.witnesses]
        if timing:
            out.append(f"elapsed: {self.elapsed:.3f}s")
        return out


def _nonzero_entries(op: DiffOp, limit: int = 5) -> list:
    out = []
    for (r, c) in sorted(op.entries)[:limit]:
        out.append(f"{op.dst.labels[r]}/{op.src.labels[c]}: {format_entry(op.entries[(r, c)])}")
    return out


def _expect_zero(op: DiffOp, what: str) -> list:
    if op.is_zero():
        return []
    return [f"{what} nonzero at {e}" for e in _nonzero_entries(op)]


def _expect(flag: bool, what: str) -> list:
    return [] if flag else [what]


def _need_n(m: Metric, lo: int):
    if m.n < lo:
        raise CheckUsageError(f"check needs n >= {lo}")


# ---------------------------------------------------------------------------

def check_ricci_killing(m: Metric, res: CheckResult):
    res.witnesses += _expect_zero(op_compose(linearized_curvature(m, "ricci"), lie_operator(m)), "ricci o killing")


def check_div_einstein(m: Metric, res: CheckResult):
    e = linearized_curvature(m, "einstein")
    res.witnesses += _expect_zero(op_compose(dual_operator(m, "div").retarget(src=e.dst), e), "div o einstein")


def check_cauchy_einstein(m: Metric, res: CheckResult):
    e = linearized_curvature(m, "einstein")
    cauchy = dual_operator(m, "cauchy")
    raised = op_compose(index_map(m, e.dst, cauchy.src), e)
    res.witnesses += _expect_zero(op_compose(cauchy, raised), "cauchy o raise o einstein")
    res.witnesses += _expect_zero(op_compose(cauchy, op_adjoint(e)), "cauchy o ad(einstein)")
    div = dual_operator(m, "div").retarget(src=e.dst)
    same = module_equal(op_compose(cauchy, index_map(m, e.dst, cauchy.src)),
                        DiffOp(e.dst, cauchy.dst, m.n, div.entries))
    res.details["div_cauchy_same_module"] = str(same).lower()
    res.witnesses += _expect(same, "div and cauchy rows generate different modules")


def check_einstein_selfadjoint(m: Metric, res: CheckResult):
    e = linearized_curvature(m, "einstein")
    res.witnesses += _expect(is_self_adjoint(e, m), "ad(einstein) differs from einstein (packed)")
    res.witnesses += _expect(is_self_adjoint_unpacked(e, m), "ad(einstein) differs from einstein (unpacked)")
    res.details["literal_entrywise"] = str(op_adjoint(e).equal_entries(e)).lower()


def check_ricci_not_selfadjoint(m: Metric, res: CheckResult):
    r = linearized_curvature(m, "ricci")
    res.witnesses += _expect(not is_self_adjoint(r, m), "ricci is self-adjoint")
    res.witnesses += _expect(not op_adjoint(r).equal_entries(r), "ad(ricci) equals ricci entrywise")


def check_adricci_sigma(m: Metric, res: CheckResult):
    sigma = dual_operator(m, "adricci_sigma")
    two_ad = op_adjoint(linearized_curvature(m, "ricci")).scaled(2)
    res.witnesses += _expect(sigma.equal_entries(two_ad), "sigma differs from 2 ad(ricci)")


def check_sigma_coherence(m: Metric, res: CheckResult):
    _need_n(m, 3)
    res.witnesses += _expect(constraint_coherence_check(m), "div(sigma) not in the constraint module")


def check_gauge_reduce(m: Metric, res: CheckResult):
    _need_n(m, 3)
    gr = gauge_reduce_einstein(m)
    res.details["factor_order"] = gr.factor.order
    whole = gr.box_part + op_compose(gr.factor, gr.gauge_div)
    res.witnesses += _expect(whole.equal_entries(gr.lhs), "box + factor o gauge_div != 2 einstein o bar_inv")
    res.witnesses += _expect(gr.factor.order == 1, f"factor has order {gr.factor.order}")


def check_bar_involution(m: Metric, res: CheckResult):
    if m.n == 2:
        try:
            algebraic_map(m, "bar_inv")
        except MetricError as exc:
            res.details["bar_inv"] = str(exc)
        else:
            res.witnesses.append("bar_inv did not refuse n=2")
        return
    comp = op_compose(algebraic_map(m, "bar_inv"), algebraic_map(m, "bar"))
    res.witnesses += _expect(comp.equal_entries(DiffOp.identity(comp.src, m.n)), "bar_inv o bar != id")


def check_trace_free_kernel(m: Metric, res: CheckResult):
    tf = algebraic_map(m, "trace_free")
    rank = op_rank(tf)
    res.details["rank"] = rank
    res.witnesses += _expect(rank == tf.src.dim - 1, f"rank {rank}, expected {tf.src.dim - 1}")
    res.witnesses += _expect_zero(op_compose(tf, metric_embed(m, tf.src)), "trace_free(omega)")


def check_elation_iso(m: Metric, res: CheckResult):
    _need_n(m, 3)
    e2r, r2e = algebraic_map(m, "elation_to_ricci"), algebraic_map(m, "ricci_to_elation")
    res.witnesses += _expect(op_compose(r2e, e2r).equal_entries(DiffOp.identity(e2r.src, m.n)), "A -> R -> A")
    res.witnesses += _expect(op_compose(e2r, r2e).equal_entries(DiffOp.identity(r2e.src, m.n)), "R -> A -> R")
    tr_r = op_compose(trace_map(m, e2r.dst), e2r)
    res.witnesses += _expect(tr_r.equal_entries(trace_map(m, e2r.src).scaled(2 * (m.n - 1))),
                             "tr(R) != 2(n-1) tr(A)")


def check_dims(m: Metric, res: CheckResult):
    t = dims_table(m.n)
    res.details.update(t.as_dict())
    res.witnesses += [f"identity fails: {k}" for k, ok in t.identities().items() if not ok]
    res.witnesses += _expect(t.F1 - t.F1hat == m.n * (m.n + 1) // 2, "F1 - F1hat")


def check_cc_killing(m: Metric, res: CheckResult):
    k = lie_operator(m)
    cc = syzygy_module(k)
    orders = sorted({max(sum(mu) for mu in e) for e in cc.entries.values()})
    want = dims_table(m.n).F1
    res.details.update(generators=cc.dst.dim, orders=",".join(map(str, orders)), expected=want)
    res.witnesses += _expect_zero(op_compose(cc, k), "cc o killing")
    res.witnesses += _expect(cc.dst.dim == want, f"{cc.dst.dim} generators, expected {want}")
    res.witnesses += _expect(orders == [2], f"generator orders {orders}")
    if m.n >= 3 and m.is_constant():
        res.witnesses += _expect(module_equal(cc, linearized_curvature(m, "riemann")),
                                 "cc differs from the riemann module")


def check_cauchy_from_adricci(m: Metric, res: CheckResult):
    cc = syzygy_module(op_adjoint(linearized_curvature(m, "ricci")))
    res.details["generators"] = cc.dst.dim
    res.witnesses += _expect(module_equal(cc, dual_operator(m, "cauchy")), "CC(ad(ricci)) differs from cauchy")


def _report_witnesses(res: CheckResult, rep, expect: bool, limit: int = 3):
    res.details.update(parametrizable=str(rep.parametrizable).lower(), witness_rows=len(rep.witnesses))
    res.witnesses += _expect(rep.parametrizable == expect,
                             f"parametrizable={str(rep.parametrizable).lower()}, expected {str(expect).lower()}")
    for k, row in enumerate(rep.witnesses[:limit]):
        labels = rep.input.src.labels
        res.details[f"witness_row_{k + 1}"] = "; ".join(
            f"{labels[c]}:{format_entry({mu: a})}" for (c, mu), a in sorted(row.items())[:4])


def check_paramtest_example(m: Metric, res: CheckResult):
    rep = parametrization_test(twovar.system())
    _report_witnesses(res, rep, True)
    res.witnesses += _expect(parametrizations_equivalent(rep.parametrization, twovar.parametrization_displayed()),
                             "parametrization not equivalent to the displayed one")


def check_example_chain(m: Metric, res: CheckResult):
    T = twovar
    d1, d = T.system(), T.parametrization_displayed()
    a1 = op_adjoint(d1)
    res.witnesses += _expect(a1.equal_entries(T.adjoint_displayed()), "ad(D1) differs from the displayed mu rows")
    res.witnesses += _expect(module_equal(syzygy_module(a1), T.adjoint_cc_displayed()), "CC(ad(D1)) != nu rows")
    res.witnesses += _expect(module_equal(syzygy_module(T.adjoint_cc_displayed()), T.theta_row()),
                             "theta-level CC differs")
    rep = parametrization_test(d1)
    res.witnesses += _expect(rep.parametrizable, "D1 not parametrizable")
    res.witnesses += _expect(parametrizations_equivalent(rep.parametrization, d), "parametrization not equivalent")
    res.witnesses += _expect_zero(op_compose(d, T.potential_map()), "D o D_-1")
    res.witnesses += _expect(is_complex([T.potential_map(), d, d1]), "primal sequence not a complex")
    res.witnesses += _expect(is_complex([a1, T.adjoint_cc_displayed(), T.theta_row()]), "adjoint sequence not a complex")
    found = minimal_parametrization_search(d, d1)
    res.details["minimal_parametrizations"] = " ".join("{" + ",".join(d.src.labels[c] for c in s) + "}" for s in found)
    res.witnesses += _expect(found == [(0,), (1,)], f"minimal parametrizations {found}")
    stream = restrict_potentials(d, T.stream_function_map())
    res.witnesses += _expect(stream.equal_entries(T.stream_parametrization_displayed()), "stream substitution differs")
    rel = relative_parametrization(d, T.divergence_constraint(), eliminate=[1])
    res.witnesses += _expect(rel.equal_entries(T.relative_parametrization_displayed()),
                             "relative parametrization differs")
    res.witnesses += _expect(module_equal(constrained_cc(rel, T.divergence_constraint()), d1),
                             "relative parametrization has a different CC module")


def check_paramtest_einstein(m: Metric, res: CheckResult):
    _need_n(m, 3)
    rep = parametrization_test(linearized_curvature(m, "einstein"))
    # n = 3: Riemann and Ricci carry the same information, so Einstein is parametrized by Killing
    _report_witnesses(res, rep, expect=(m.n == 3))


REGISTRY: dict[str, tuple[Callable, int]] = {
    "ricci-killing-zero": (check_ricci_killing, 4),
    "div-einstein-zero": (check_div_einstein, 4),
    "cauchy-einstein-zero": (check_cauchy_einstein, 4),
    "einstein-selfadjoint": (check_einstein_selfadjoint, 4),
    "ricci-not-selfadjoint": (check_ricci_not_selfadjoint, 4),
    "adricci-sigma-match": (check_adricci_sigma, 4),
    "sigma-constraint-coherence": (check_sigma_coherence, 4),
    "gauge-reduce": (check_gauge_reduce, 4),
    "bar-involution": (check_bar_involution, 4),
    "trace-free-kernel": (check_trace_free_kernel, 4),
    "elation-iso": (check_elation_iso, 4),
    "dims": (check_dims, 4),
    "cc-killing-count": (check_cc_killing, 4),
    "cauchy-from-adricci": (check_cauchy_from_adricci, 4),
    "paramtest-example23": (check_paramtest_example, 2),
    "example23-full-chain": (check_example_chain, 2),
    "paramtest-einstein": (check_paramtest_einstein, 4),
}

_METRIC_FREE = {"paramtest-example23", "example23-full-chain", "dims"}


def check_names() -> list:
    return list(REGISTRY)


def run_check(name: str, n: int | None = None, metric: Metric | str = "minkowski") -> CheckResult:
    if name not in REGISTRY:
        raise CheckUsageError(f"unknown check {name!r}")
    fn, default_n = REGISTRY[name]
    n = default_n if n is None else n
    if isinstance(metric, str):
        m = metric_make(metric, n)
        kind = metric
    else:
        m, kind = metric, metric.kind
        n = m.n
    params = {} if name in ("paramtest-example23", "example23-full-chain") else {"n": n, "metric": kind}
    res = CheckResult(name, params)
    if name not in _METRIC_FREE and not m.is_constant() and name != "cc-killing-count":
        raise CheckUsageError("flat background required")
    start = time.perf_counter()
    try:
        fn(m, res)
    except MetricError as exc:
        raise CheckUsageError(str(exc)) from None
    res.elapsed = time.perf_counter() - start
    return res
