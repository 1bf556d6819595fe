import math

import numpy as np
import pytest

from grazing_maps.dmaps import (
    delta0_asymptotic,
    delta_asymptotic,
    gap,
    pdm_analytic,
    pdm_numeric,
    v_leading,
    zdm_analytic,
    zdm_numeric,
)
from grazing_maps.errors import NonpositiveRadicand, NotOrder4
from grazing_maps.fitting import fit_power_law
from grazing_maps.grazing import pi3_point
from grazing_maps.lie import lie_value
from grazing_maps.sysdsl import parse_system

EPS = 1e-4
TOL = 1e-12


def monomial_chain(eps, c=6.0, k=1.0):
    """Exact x2..x5 for X = (1, c x^3), H = y, W = (k, 0) from x1 = (0, -eps)."""
    delta = -((4 * eps / c) ** 0.25)
    v = c * delta**3
    x3 = np.array([delta + k * v, 0.0])
    x4 = np.array([k * v, c / 4 * ((k * v) ** 4 - x3[0] ** 4)])
    x5 = np.array([0.0, x4[1] - c / 4 * (k * v) ** 4])
    return delta, v, x3, x4, -k * v, x5


# -- asymptotic quantities ------------------------------------------------


def test_delta_asymptotic_values(monomial, hamiltonian):
    assert delta_asymptotic(monomial.system, EPS) == pytest.approx(-0.0903602, abs=1e-7)
    assert delta_asymptotic(monomial.system, EPS) == pytest.approx(monomial.exact_delta(EPS), rel=1e-15)
    assert delta_asymptotic(hamiltonian.system, EPS) == pytest.approx(-math.sqrt(2) * EPS**0.25, rel=1e-14)
    assert delta_asymptotic(hamiltonian.system, 0.0) == 0.0


def test_delta_asymptotic_at_input_point(monomial):
    # L_X^4 H is constant for the monomial system, so both base points agree
    assert delta_asymptotic(monomial.system, EPS, base=(0.0, -EPS)) == delta_asymptotic(monomial.system, EPS)


def test_v_leading_values(monomial, hamiltonian):
    delta = monomial.exact_delta(EPS)
    assert v_leading(monomial.system, EPS) == pytest.approx(6 * delta**3, rel=1e-14)
    assert v_leading(monomial.system, EPS) == pytest.approx(-4.4267e-3, abs=1e-7)
    assert v_leading(hamiltonian.system, 0.0) == 0.0
    # against the numeric velocity at impact
    eps = 1e-8
    num = zdm_numeric(hamiltonian.system, pi3_point(hamiltonian.system, eps).state, eps)
    assert v_leading(hamiltonian.system, eps) == pytest.approx(num.v, rel=1e-2)
    assert v_leading(hamiltonian.system, eps) == pytest.approx(-(24**0.75) * 6**0.25 / 6 * eps**0.75, rel=1e-14)


def test_delta0_asymptotic(monomial):
    assert delta0_asymptotic(monomial.system, (0.0, -EPS), EPS) == pytest.approx(4.4267e-3, abs=1e-7)
    still = monomial.system.with_params(k=0.0)
    assert delta0_asymptotic(still, (0.0, -EPS), EPS) == 0.0


def test_nonpositive_radicand():
    s = parse_system("dim 2; X=[1, -6*x^3]; H=-y; W=[1, 0]")
    with pytest.raises(NonpositiveRadicand):
        delta_asymptotic(parse_system("dim 2; X=[1, -6*x^3]; H=y; W=[1,0]"), EPS)
    assert delta_asymptotic(s, EPS) < 0


def test_analytic_maps_refuse_order2(parabola):
    with pytest.raises(NotOrder4):
        zdm_analytic(parabola.system, (0.0, -EPS), EPS)
    with pytest.raises(NotOrder4):
        pdm_analytic(parabola.system, (0.0, -EPS), EPS)


# -- ZDM ------------------------------------------------------------------


def test_zdm_numeric_monomial_closed_form(monomial):
    delta, v, x3, x4, _, _ = monomial_chain(EPS)
    r = zdm_numeric(monomial.system, (0.0, -EPS), EPS)
    assert r.delta == pytest.approx(delta, abs=1e-15)
    assert r.v == pytest.approx(v, rel=1e-13)
    np.testing.assert_allclose(r.x2, [delta, 0.0], atol=1e-15)
    np.testing.assert_allclose(r.x3, x3, atol=1e-15)
    np.testing.assert_allclose(r.x4, x4, atol=1e-14)
    assert r.x4[0] == pytest.approx(-4.4267e-3, abs=1e-7)
    assert r.t_impact + r.t_return == 0.0
    assert abs(r.h_residual) <= 1e-11 and r.delta < 0


def test_zdm_reset_applied_exactly(hamiltonian):
    params = {"k": 0.7, "k1": 2.0, "k2": -1.5}
    x1 = pi3_point(hamiltonian.system, 1e-3, params=params).state
    r = zdm_numeric(hamiltonian.system, x1, 1e-3, params=params)
    x2 = r.x2
    w = np.array([0.7 + 2.0 * x2[1], -1.5 * x2[1]])
    assert np.array_equal(r.x3, x2 + w * r.v)
    assert r.v == lie_value(hamiltonian.system, x2, 1, params)


def test_zdm_analytic_values(monomial, hamiltonian):
    r = zdm_analytic(monomial.system, (0.0, -EPS), EPS)
    np.testing.assert_allclose(r.x4, [-4.4267e-3, -EPS], atol=1e-7)
    assert r.method == "analytic-order-4" and r.remainder == "O(eps)"
    x1 = pi3_point(hamiltonian.system, EPS).state
    r = zdm_analytic(hamiltonian.system, x1, EPS)
    np.testing.assert_allclose(r.x4, x1 - 2 * math.sqrt(2) * np.array([1.0, 0.0]) * EPS**0.75, rtol=1e-14)
    r0 = zdm_analytic(hamiltonian.system, (0.0, 0.0), 0.0)
    assert r0.x4.tolist() == [0.0, 0.0]


@pytest.mark.parametrize("name", ["monomial4", "paper-hamiltonian"])
def test_zero_depth_fixes_grazing_point(name):
    from grazing_maps.systems import builtin

    s = builtin(name).system
    z = zdm_numeric(s, (0.0, 0.0), 0.0)
    p = pdm_numeric(s, (0.0, 0.0), 0.0)
    assert z.x4.tolist() == [0.0, 0.0] and p.x5.tolist() == [0.0, 0.0]


@pytest.mark.parametrize("name, zero", [("monomial4", {"k": 0.0}), ("paper-hamiltonian", {"k": 0.0})])
@pytest.mark.parametrize("eps", [1e-6, 1e-4])
def test_zero_reset_is_identity(name, zero, eps):
    from grazing_maps.systems import builtin

    s = builtin(name, **zero).system
    x1 = pi3_point(s, eps).state
    z = zdm_numeric(s, x1, eps, (TOL, TOL))
    p = pdm_numeric(s, x1, eps, (TOL, TOL))
    assert np.linalg.norm(z.x4 - x1) <= 10 * TOL
    assert np.linalg.norm(p.x5 - x1) <= 10 * TOL
    assert pdm_analytic(s, x1, eps).x5.tolist() == x1.tolist()


def test_zdm_numeric_runs_on_order2(parabola):
    r = zdm_numeric(parabola.system, (0.0, -EPS), EPS)
    # exact: delta = -sqrt(eps), v = 2 delta, x4 = (v, (v)^2 - (delta + v)^2)
    d = -math.sqrt(EPS)
    v = 2 * d
    np.testing.assert_allclose(r.x4, [v, v**2 - (d + v) ** 2], atol=1e-14)


# -- PDM ------------------------------------------------------------------


def test_pdm_numeric_monomial_closed_form(monomial):
    *_, delta0, x5 = monomial_chain(EPS)
    r = pdm_numeric(monomial.system, (0.0, -EPS), EPS)
    assert r.delta0 == pytest.approx(delta0, rel=1e-12)
    assert r.delta0 == pytest.approx(4.4267e-3, abs=1e-7)
    np.testing.assert_allclose(r.x5, x5, atol=1e-15)
    assert abs(r.l3_residual) <= 1e-10


def test_pdm_analytic_monomial_cancels(monomial):
    r = pdm_analytic(monomial.system, (0.0, -EPS), EPS)
    assert r.x5.tolist() == [0.0, -EPS]
    assert r.delta0 == pytest.approx(4.4267e-3, abs=1e-7)


def test_pdm_numeric_hamiltonian_lands_on_section(hamiltonian):
    for eps in (1e-8, 1e-6, 1e-4):
        x1 = pi3_point(hamiltonian.system, eps).state
        r = pdm_numeric(hamiltonian.system, x1, eps)
        assert abs(r.l3_residual) <= 1e-10
        assert abs(lie_value(hamiltonian.system, r.x5, 3)) <= 1e-10


def test_gap_helper(monomial):
    a = zdm_numeric(monomial.system, (0.0, -EPS), EPS)
    b = zdm_analytic(monomial.system, (0.0, -EPS), EPS)
    assert gap(a, b) == pytest.approx(float(np.linalg.norm(a.x4 - b.x4)))


def test_to_dict_is_plain(monomial):
    d = pdm_numeric(monomial.system, (0.0, -EPS), EPS).to_dict()
    assert isinstance(d["x5"], list) and d["method"] == "numeric"


# -- scaling --------------------------------------------------------------

GRID = np.logspace(-8, -4, 9)


@pytest.fixture(scope="module")
def hamiltonian_sweep():
    from grazing_maps.systems import builtin

    s = builtin("paper-hamiltonian").system
    rows = []
    for e in GRID:
        x1 = pi3_point(s, e).state
        rows.append((x1, pdm_numeric(s, x1, e), pdm_analytic(s, x1, e)))
    return rows


def test_impact_time_relative_error_shrinks(hamiltonian_sweep):
    rel = [abs(n.delta - a.delta) / abs(n.delta) for _, n, a in hamiltonian_sweep]
    assert fit_power_law(GRID, rel).slope >= 0.2


def test_impact_time_exact_for_monomial(monomial):
    for e in GRID:
        r = zdm_numeric(monomial.system, (0.0, -e), e)
        assert abs(r.delta - monomial.exact_delta(e)) <= 1e-9 * abs(monomial.exact_delta(e))


def test_delta0_scales_like_three_quarters(hamiltonian_sweep):
    d0 = [n.delta0 for _, n, _ in hamiltonian_sweep]
    assert fit_power_law(GRID, d0).slope == pytest.approx(0.75, abs=0.03)
