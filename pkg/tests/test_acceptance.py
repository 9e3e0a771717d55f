"""Acceptance criteria 1-7.  Each test prints one PASS/FAIL line and appends it to the summary."""

import contextlib
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from diffduality import twovar
from diffduality.diffop import DiffOp, divergence_certificate, euler_divergence_test, op_adjoint, op_compose
from diffduality.gallery import (
    MetricError, algebraic_map, constraint_coherence_check, dims_table, dual_operator, gauge_reduce_einstein,
    is_self_adjoint, is_self_adjoint_unpacked, lie_operator, linearized_curvature, metric_embed, metric_make,
    trace_map,
)
from diffduality.groebner import gb_compute, gb_normal_form, module_equal, op_rank, syzygy_module, time_budget
from diffduality.randops import random_diffop, random_space
from diffduality.sequences import (
    constrained_cc, diff_trd, is_complex, minimal_parametrization_search, parametrization_test,
    parametrizations_equivalent, relative_parametrization, restrict_potentials,
)
from oracles import brute_force_syzygies

METRICS = ("minkowski", "euclid")


class Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.failures = []

    def expect(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, what):
        self.failures.append(what)


@contextlib.contextmanager
def criterion(number, title, limit):
    c = Criterion(number, title, limit)
    t0 = time.monotonic()
    try:
        yield c
    except Exception as exc:
        c.note(f"{type(exc).__name__}: {exc}")
    elapsed = time.monotonic() - t0
    c.expect(elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s")
    status = "PASS" if not c.failures else "FAIL"
    line = f"criterion {number} [{status}] {title} ({elapsed:.2f}s)"
    if c.failures:
        line += ": " + "; ".join(c.failures)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert not c.failures, line


def test_criterion_1_example_chain():
    T = twovar
    with criterion(1, "two-variable example, full chain", 5) as c:
        d1, d = T.system(), T.parametrization_displayed()
        a1 = op_adjoint(d1)
        c.expect(a1.equal_entries(T.adjoint_displayed()), "ad(D1) differs from the mu rows")
        c.expect(module_equal(syzygy_module(a1), T.adjoint_cc_displayed()), "CC(ad(D1)) differs from the nu rows")
        c.expect(module_equal(syzygy_module(T.adjoint_cc_displayed()), T.theta_row()), "theta-level CC differs")
        rep = parametrization_test(d1)
        c.expect(rep.parametrizable, "D1 not parametrizable")
        c.expect(parametrizations_equivalent(rep.parametrization, d), "parametrization not equivalent to D")
        c.expect(op_compose(d, T.potential_map()).is_zero(), "D o (phi-substitution) != 0")
        c.expect(is_complex([T.potential_map(), d, d1]), "primal sequence is not a complex")
        c.expect(is_complex([a1, T.adjoint_cc_displayed(), T.theta_row()]), "adjoint sequence is not a complex")
        c.expect(minimal_parametrization_search(d, d1) == [(0,), (1,)], "minimal parametrizations differ")
        c.expect(restrict_potentials(d, T.stream_function_map()).equal_entries(T.stream_parametrization_displayed()),
                 "stream-function restriction differs")
        rel = relative_parametrization(d, T.divergence_constraint(), eliminate=[1])
        c.expect(rel.equal_entries(T.relative_parametrization_displayed()), "relative parametrization differs")
        c.expect(module_equal(constrained_cc(rel, T.divergence_constraint()), d1), "relative CC differs")


def test_criterion_2_identity_suite():
    with criterion(2, "identity suite, minkowski and euclid, n = 2, 3, 4", 60) as c:
        for kind in METRICS:
            for n in (2, 3, 4):
                m = metric_make(kind, n)
                tag = f"{kind} n={n}"
                k, r, e = lie_operator(m), linearized_curvature(m, "ricci"), linearized_curvature(m, "einstein")
                c.expect(op_compose(r, k).is_zero(), f"{tag}: ricci o killing")
                c.expect(op_compose(dual_operator(m, "div").retarget(src=e.dst), e).is_zero(), f"{tag}: div o E")
                c.expect(op_compose(dual_operator(m, "cauchy"), op_adjoint(e)).is_zero(), f"{tag}: cauchy o E")
                tr_e = op_compose(trace_map(m, e.dst), e)
                tr_r = op_compose(trace_map(m, r.dst), r).scaled(-(n - 2))
                c.expect(tr_e.scaled(2).equal_entries(tr_r), f"{tag}: tr E != -(n-2)/2 tr R")
                if n >= 3:
                    comp = op_compose(algebraic_map(m, "bar_inv"), algebraic_map(m, "bar"))
                    c.expect(comp.equal_entries(DiffOp.identity(comp.src, n)), f"{tag}: bar_inv o bar")
                    a2r, r2a = algebraic_map(m, "elation_to_ricci"), algebraic_map(m, "ricci_to_elation")
                    c.expect(op_compose(r2a, a2r).equal_entries(DiffOp.identity(a2r.src, n)), f"{tag}: elation iso")
                    c.expect(op_compose(trace_map(m, a2r.dst), a2r).equal_entries(
                        trace_map(m, a2r.src).scaled(2 * (n - 1))), f"{tag}: tr R = 2(n-1) tr A")
                else:
                    try:
                        algebraic_map(m, "bar_inv")
                        c.note(f"{tag}: bar_inv accepted n=2")
                    except MetricError:
                        pass
                tf = algebraic_map(m, "trace_free")
                c.expect(op_rank(tf) == tf.src.dim - 1, f"{tag}: trace_free rank")
                c.expect(op_compose(tf, metric_embed(m, tf.src)).is_zero(), f"{tag}: trace_free(omega)")


def test_criterion_3_self_adjointness():
    with criterion(3, "einstein self-adjoint, ricci not, sigma = 2 ad(ricci)", 60) as c:
        for kind in METRICS:
            for n in (3, 4):
                m = metric_make(kind, n)
                tag = f"{kind} n={n}"
                e, r = linearized_curvature(m, "einstein"), linearized_curvature(m, "ricci")
                c.expect(is_self_adjoint(e, m), f"{tag}: einstein packed")
                c.expect(is_self_adjoint_unpacked(e, m), f"{tag}: einstein unpacked")
                c.expect(not is_self_adjoint(r, m) and not op_adjoint(r).equal_entries(r), f"{tag}: ricci")
                c.expect(dual_operator(m, "adricci_sigma").equal_entries(op_adjoint(r).scaled(2)), f"{tag}: sigma")


def test_criterion_4_gauge_reduction():
    with criterion(4, "gauge reduction and sigma coherence, n = 3, 4", 60) as c:
        for kind in METRICS:
            for n in (3, 4):
                m = metric_make(kind, n)
                tag = f"{kind} n={n}"
                gr = gauge_reduce_einstein(m)
                whole = gr.box_part + op_compose(gr.factor, gr.gauge_div)
                c.expect(whole.equal_entries(gr.lhs), f"{tag}: box + factor o div")
                c.expect(constraint_coherence_check(m), f"{tag}: sigma coherence")


def test_criterion_5_cc_counts_and_dims():
    with criterion(5, "Killing CC counts and dimension table", 600) as c:
        for n, want in ((2, 1), (3, 6), (4, 20)):
            m = metric_make("minkowski", n)
            k = lie_operator(m)
            cc = syzygy_module(k)
            orders = {max(sum(mu) for mu in e) for e in cc.entries.values()}
            c.expect(cc.dst.dim == want == dims_table(n).F1, f"n={n}: {cc.dst.dim} generators")
            c.expect(orders == {2}, f"n={n}: orders {orders}")
            c.expect(op_compose(cc, k).is_zero(), f"n={n}: cc o killing")
            if n == 2:
                gb = gb_compute(cc)
                c.expect(all(gb.contains_row(row) for row in brute_force_syzygies(k, 3)), "n=2 brute force")
        t = dims_table(4)
        c.expect((t.F1hat, t.F2hat, t.F2) == (10, 0, 20), "n=4 table")
        for n in range(2, 9):
            t = dims_table(n)
            c.expect(t.F1 - t.F1hat == n * (n + 1) // 2, f"n={n}: F1 - F1hat")
            c.expect(all(t.identities().values()), f"n={n}: identities")


def test_criterion_6_duality_chain():
    with criterion(6, "CC(ad ricci) = cauchy; einstein not parametrizable at n=4", 600) as c:
        for n in (3, 4):
            m = metric_make("minkowski", n)
            with time_budget(600 if n == 3 else 3600):
                cc = syzygy_module(op_adjoint(linearized_curvature(m, "ricci")))
                c.expect(module_equal(cc, dual_operator(m, "cauchy")), f"n={n}: CC(ad ricci) != cauchy")
        with time_budget(3600):
            rep = parametrization_test(linearized_curvature(metric_make("minkowski", 4), "einstein"))
        c.expect(not rep.parametrizable and rep.witnesses, "n=4: einstein reported parametrizable")


def test_criterion_7_property_suites():
    with criterion(7, "property suites and diff trd", 120) as c:
        rng = random.Random(20261014)
        for k in range(200):
            d = random_diffop(rng, 2, rng.randint(1, 3), rng.randint(1, 3))
            c.expect(op_adjoint(op_adjoint(d)) == d.retarget(), f"ad(ad(D)) case {k}")
        for k in range(100):
            d = random_diffop(rng, 2, rng.randint(1, 3), rng.randint(1, 3))
            d2 = random_diffop(rng, 2, d.dst, random_space(rng, "w", rng.randint(1, 3)), max_order=1)
            c.expect(op_adjoint(op_compose(d2, d)) == op_compose(op_adjoint(d), op_adjoint(d2)), f"contra {k}")
        for k in range(100):
            d = random_diffop(rng, 2, rng.randint(1, 3), rng.randint(1, 3))
            c.expect(euler_divergence_test(divergence_certificate(d)), f"euler {k}")
        engine_inputs = [twovar.system(), op_adjoint(twovar.system()), twovar.adjoint_cc_displayed()]
        engine_inputs += [lie_operator(metric_make("minkowski", n)) for n in (2, 3)]
        engine_inputs += [random_diffop(rng, 2, rng.randint(1, 2), rng.randint(1, 2), max_order=1, rational=False)
                          for _ in range(8)]
        for k, d in enumerate(engine_inputs):
            s = syzygy_module(d)
            c.expect(op_compose(s, d).is_zero(), f"syzygy soundness {k}")
            gb = gb_compute(d, track=False)
            v = random_diffop(rng, d.nvars, d.src, random_space(rng, "t", 2), max_order=2, rational=False)
            nf = gb_normal_form(v, gb)
            c.expect(gb_normal_form(nf, gb) == nf, f"NF idempotence {k}")
        for n in (3, 4):
            m = metric_make("minkowski", n)
            c.expect(diff_trd(lie_operator(m)) == 0, f"n={n}: diff_trd(killing)")
            got = diff_trd(linearized_curvature(m, "ricci"))
            c.expect(got == n * (n - 1) // 2, f"n={n}: diff_trd(ricci) = {got}, expected {n * (n - 1) // 2}")
