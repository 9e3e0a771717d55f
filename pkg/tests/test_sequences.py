import pytest
import sympy as sp

from diffduality import twovar
from diffduality.coefficients import RatFunc
from diffduality.diffop import DiffOp, SpaceMismatchError, SpaceSpec, op_compose
from diffduality.gallery import lie_operator, linearized_curvature, metric_make
from diffduality.groebner import gb_compute, module_equal, syzygy_module
from diffduality.sequences import (
    DiffSequence, NotAParametrization, constrained_cc, diff_trd, is_complex, minimal_parametrization_search,
    parametrization_test, parametrizations_equivalent, relative_parametrization, restrict_potentials,
)

ONE = RatFunc.one(2)
PHI = SpaceSpec.make("phi", 1)
G = SpaceSpec.make("g", 2)


def gradient():
    return DiffOp(PHI, G, 2, {(0, 0): {(1, 0): ONE}, (1, 0): {(0, 1): ONE}})


def curl():
    return DiffOp(G, SpaceSpec.make("c", 1), 2, {(0, 0): {(0, 1): ONE}, (0, 1): {(1, 0): -ONE}})


def symbol_rank(d, point=(3, -5, 7, 11)):
    """Rank of the commutative symbol matrix at an integer point (constant coefficients only).

    Evaluation can only lower the rank; the frozen values below were also
    checked with the symbolic rank over Q(s).
    """
    def ent(r, c):
        return sum(sp.Rational(a.constant_value().numerator, a.constant_value().denominator)
                   * sp.prod([sp.Integer(point[i]) ** mu[i] for i in range(d.nvars)])
                   for mu, a in d.entry(r, c).items())
    return sp.Matrix(d.dst.dim, d.src.dim, ent).rank()


# symbolic-rank oracle for linearized Ricci over Minkowski, frozen
RICCI_RANK = {3: 3, 4: 6}


def test_displayed_primal_sequence_is_a_complex():
    assert is_complex([twovar.parametrization_displayed(), twovar.system()])
    assert is_complex(DiffSequence([twovar.potential_map(), twovar.parametrization_displayed(), twovar.system()]))


def test_killing_and_its_engine_cc_form_a_complex():
    k = lie_operator(metric_make("minkowski", 3))
    assert is_complex([k, syzygy_module(k)])


def test_d1_after_d1_is_not_a_complex():
    d = DiffOp(SpaceSpec.make("u", 1), SpaceSpec.make("u", 1), 2, {(0, 0): {(1, 0): ONE}})
    assert not is_complex([d, d])


def test_sequence_rejects_mismatched_spaces():
    with pytest.raises(SpaceMismatchError):
        DiffSequence([gradient(), gradient()])
    with pytest.raises(ValueError):
        is_complex([])


def test_example_system_is_parametrizable():
    rep = parametrization_test(twovar.system())
    assert rep.parametrizable and rep.witnesses == []
    assert op_compose(twovar.system(), rep.parametrization).is_zero()
    assert op_compose(rep.candidate, rep.adjoint1).is_zero()
    assert op_compose(rep.recomputed, rep.parametrization).is_zero()
    assert parametrizations_equivalent(rep.parametrization, twovar.parametrization_displayed())


def test_report_serialization_is_deterministic():
    a = parametrization_test(twovar.system()).serialize()
    b = parametrization_test(twovar.system()).serialize()
    assert a == b and "parametrizable: true" in a


def test_curl_is_parametrized_by_gradient():
    rep = parametrization_test(curl())
    assert rep.parametrizable
    assert parametrizations_equivalent(rep.parametrization, gradient())


def test_einstein_four_dimensions_is_not_parametrizable_with_sound_witnesses():
    e = linearized_curvature(metric_make("minkowski", 4), "einstein")
    rep = parametrization_test(e)
    assert not rep.parametrizable and rep.witnesses
    gb = gb_compute(e, track=False)
    for w in rep.witnesses:
        assert gb.normal_form_row(w)
    assert op_compose(rep.recomputed, rep.parametrization).is_zero()


def test_diff_trd_values():
    for n in (3, 4):
        m = metric_make("minkowski", n)
        assert diff_trd(lie_operator(m)) == 0
        ric = linearized_curvature(m, "ricci")
        assert symbol_rank(ric) == RICCI_RANK[n]
        assert diff_trd(ric) == ric.src.dim - RICCI_RANK[n]
    assert diff_trd(linearized_curvature(metric_make("minkowski", 4), "ricci")) == 4
    zero = DiffOp(SpaceSpec.make("u", 3), SpaceSpec.make("v", 2), 2, {})
    assert diff_trd(zero) == 3


def test_restriction_by_identity_is_noop():
    d = twovar.parametrization_displayed()
    assert restrict_potentials(d, DiffOp.identity(d.src, 2)).equal_entries(d)


def test_stream_function_restriction():
    out = restrict_potentials(twovar.parametrization_displayed(), twovar.stream_function_map())
    assert out.equal_entries(twovar.stream_parametrization_displayed())


def test_relative_parametrization_and_its_cc():
    d, c = twovar.parametrization_displayed(), twovar.divergence_constraint()
    rel = relative_parametrization(d, c, eliminate=[1])
    assert rel.equal_entries(twovar.relative_parametrization_displayed())
    assert module_equal(constrained_cc(rel, c), twovar.system())
    with pytest.raises(SpaceMismatchError):
        relative_parametrization(d, curl().retarget(src=SpaceSpec.make("q", 2)), eliminate=[1])


def test_minimal_search_on_example():
    seen = []
    found = minimal_parametrization_search(twovar.parametrization_displayed(), twovar.system(),
                                           progress=lambda s, ok: seen.append((s, ok)))
    assert found == [(0,), (1,)]
    assert seen


def test_minimal_search_single_potential_is_empty():
    assert minimal_parametrization_search(gradient(), curl()) == []


def test_minimal_search_rejects_non_parametrization():
    with pytest.raises(NotAParametrization, match="not a parametrization"):
        minimal_parametrization_search(twovar.parametrization_displayed(), curl().retarget(src=twovar.ETA))
    with pytest.raises(NotAParametrization):
        minimal_parametrization_search(gradient(), twovar.system().retarget(src=G))
