import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from oscexp.closedform import t_infinity
from oscexp.oscquad import (
    QuadratureBudget,
    Region,
    chirp_segment,
    convention_constant,
    cube_simplices,
    fresnel_cos_segment,
    fresnel_floor_constant,
    t_box,
    t_gauss_damped,
    t_polytope,
)
from oscexp.symlin import PhaseParameters, SymmetricMatrix


def quad_1d(a, b, lo=0.0, hi=1.0):
    """Oracle: int_lo^hi exp(i(a x^2 + b x)) dx by scipy quad, panels of bounded phase change."""
    n = max(1, int(abs(a) * (hi - lo) ** 2 + abs(b) * (hi - lo)))
    edges = np.linspace(lo, hi, n + 1)
    re = im = 0.0
    for l, h in zip(edges[:-1], edges[1:]):
        re += integrate.quad(lambda x: math.cos(a * x * x + b * x), l, h, epsabs=1e-15, epsrel=1e-14)[0]
        im += integrate.quad(lambda x: math.sin(a * x * x + b * x), l, h, epsabs=1e-15, epsrel=1e-14)[0]
    return complex(re, im)


def cos_segment_scipy(u1, u2):
    s = math.sqrt(2 / math.pi)
    return math.sqrt(math.pi / 2) * (special.fresnel(u2 * s)[1] - special.fresnel(u1 * s)[1])


class TestChirpSegment:
    @pytest.mark.parametrize("a,b,lo,hi", [
        (1.0, 0.0, 0.0, 1.0), (-3.0, 2.0, -1.0, 2.0), (50.0, -30.0, 0.0, 1.0),
        (1e-3, 5.0, 0.0, 3.0), (0.0, 2.0, 0.0, 1.0), (0.0, 1e-6, -1.0, 1.0), (400.0, 0.0, -0.3, 0.7),
    ])
    def test_against_quad(self, a, b, lo, hi):
        assert complex(chirp_segment(a, b, lo, hi)) == pytest.approx(quad_1d(a, b, lo, hi), abs=1e-12)

    def test_vectorised(self):
        betas = np.array([-4.0, 0.0, 3.0])
        vec = chirp_segment(2.0, betas, 0.0, 1.0)
        for beta, v in zip(betas, vec):
            assert v == pytest.approx(complex(chirp_segment(2.0, beta, 0.0, 1.0)), abs=1e-15)

    def test_large_curvature_asymptotic(self):
        # interior stationary point: sqrt(pi / a) e^{i pi / 4} dominates
        a = 1e8
        v = complex(chirp_segment(a, 0.0, -1.0, 1.0))
        assert v == pytest.approx(math.sqrt(math.pi / a) * complex(math.cos(math.pi / 4), math.sin(math.pi / 4)),
                                  abs=2e-8)

    @given(st.floats(-200, 200), st.floats(-200, 200))
    def test_modulus_bound(self, a, b):
        assert abs(complex(chirp_segment(a, b, 0.0, 1.0))) <= 1 + 1e-12


class TestRegion:
    def test_invalid(self):
        with pytest.raises(ValueError):
            Region.box([0, 0], [1, 0])
        with pytest.raises(ValueError):
            Region("sphere")
        with pytest.raises(ValueError):
            Region.simplex_union([[[0, 0], [1, 0], [2, 0]]])

    def test_volumes(self):
        assert Region.unit_cube(3).volume() == 1
        assert Region.box([-1, 0], [1, 3]).volume() == 6
        assert Region.simplex_union(cube_simplices(3)).volume() == pytest.approx(1)

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            QuadratureBudget(tol=0)
        with pytest.raises(ValueError):
            QuadratureBudget(base_order=2)


class TestTBox:
    def test_zero_phase_gives_volume(self):
        for k in (1, 2, 3):
            r = t_box(PhaseParameters.homogeneous(SymmetricMatrix.zeros(k)), Region.unit_cube(k))
            assert r.value == pytest.approx(1.0, abs=1e-14) and r.converged

    def test_linear_phase(self):
        r = t_box(PhaseParameters(SymmetricMatrix.zeros(1), (2 * math.pi,)), Region.unit_cube(1))
        assert abs(r.value) <= 1e-12

    @pytest.mark.parametrize("method", ["panel", "fresnel"])
    @pytest.mark.parametrize("a,b", [(1.0, 0.0), (7.0, -3.0), (-150.0, 40.0), (0.25, 9.0)])
    def test_one_dimensional(self, a, b, method):
        r = t_box(PhaseParameters(SymmetricMatrix(1, (a,)), (b,)), Region.unit_cube(1),
                  QuadratureBudget(tol=1e-12), method=method)
        assert r.value == pytest.approx(quad_1d(a, b), abs=1e-11)

    @pytest.mark.parametrize("method", ["panel", "fresnel"])
    def test_separable_box_is_product(self, method):
        d = (3.0, -20.0, 0.5)
        b = (1.0, 4.0, -2.0)
        lo, hi = (0.0, -0.5, 0.2), (1.0, 0.5, 1.7)
        prm = PhaseParameters.from_dense(np.diag(d), b)
        r = t_box(prm, Region.box(lo, hi), QuadratureBudget(tol=1e-11), method=method)
        expected = np.prod([quad_1d(*args) for args in zip(d, b, lo, hi)])
        assert r.value == pytest.approx(expected, abs=1e-10)

    def test_methods_agree_with_coupling(self, rng):
        for _ in range(3):
            a = rng.uniform(-30, 30, (2, 2))
            a = (a + a.T) / 2
            prm = PhaseParameters.from_dense(a, rng.uniform(-5, 5, 2))
            b = QuadratureBudget(tol=1e-11)
            assert t_box(prm, Region.unit_cube(2), b, "panel").value == pytest.approx(
                t_box(prm, Region.unit_cube(2), b, "fresnel").value, abs=1e-9)

    def test_rotation_of_square_leaves_dblquad_value(self):
        a = np.array([[2.0, 1.5], [1.5, -1.0]])
        b = np.array([0.5, -2.0])
        prm = PhaseParameters.from_dense(a, b)

        def part(f):
            return integrate.dblquad(lambda y, x: f(a[0, 0] * x * x + 2 * a[0, 1] * x * y + a[1, 1] * y * y
                                                    + b[0] * x + b[1] * y), 0, 1, 0, 1, epsabs=1e-13)[0]

        expected = complex(part(math.cos), part(math.sin))
        assert t_box(prm, Region.unit_cube(2)).value == pytest.approx(expected, abs=1e-10)

    def test_conjugation(self):
        prm = PhaseParameters(SymmetricMatrix(2, (5.0, -2.0, 3.0)), (1.0, 1.0))
        assert t_box(prm.conjugate(), Region.unit_cube(2)).value == pytest.approx(
            t_box(prm, Region.unit_cube(2)).value.conjugate(), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            t_box(PhaseParameters.homogeneous(SymmetricMatrix.zeros(2)), Region.unit_cube(3))


class TestPolytope:
    def test_cube_split_matches_box(self):
        prm = PhaseParameters(SymmetricMatrix(3, (2.0, 0.5, -1.0, 3.0, 0.25, -1.5)), (1.0, -2.0, 0.5))
        poly = t_polytope(prm, Region.simplex_union(cube_simplices(3)), QuadratureBudget(tol=1e-10))
        box = t_box(prm, Region.unit_cube(3), QuadratureBudget(tol=1e-10))
        assert poly.value == pytest.approx(box.value, abs=1e-8)

    def test_triangle_zero_phase_is_area(self):
        tri = [[0, 0], [2, 0], [0, 1]]
        r = t_polytope(PhaseParameters.homogeneous(SymmetricMatrix.zeros(2)), Region.simplex_union([tri]))
        assert r.value == pytest.approx(1.0, abs=1e-13)

    def test_triangle_against_dblquad(self):
        a = np.array([[3.0, 1.0], [1.0, -2.0]])
        b = np.array([1.0, 2.0])
        prm = PhaseParameters.from_dense(a, b)

        def part(f):
            return integrate.dblquad(lambda y, x: f(a[0, 0] * x * x + 2 * a[0, 1] * x * y + a[1, 1] * y * y
                                                    + b[0] * x + b[1] * y), 0, 1, 0, lambda x: 1 - x,
                                     epsabs=1e-13)[0]

        r = t_polytope(prm, Region.simplex_union([[[0, 0], [1, 0], [0, 1]]]))
        assert r.value == pytest.approx(complex(part(math.cos), part(math.sin)), abs=1e-10)


class TestGaussDamped:
    def test_convention_constant(self):
        assert convention_constant(3) == pytest.approx(2 ** 1.5)

    @pytest.mark.parametrize("coeffs,b", [
        ((0.0,), (0.0,)), ((0.7,), (1.0,)), ((5.0,), (-3.0,)),
        ((1.0, 0.5, -0.5), (0.3, 0.2)), ((4.0, -2.0, 3.0), (1.0, -1.0)),
    ])
    def test_matches_closed_form_up_to_convention(self, coeffs, b):
        prm = PhaseParameters(SymmetricMatrix(len(b), coeffs), b)
        k = len(b)
        assert t_gauss_damped(prm) * convention_constant(k) == pytest.approx(t_infinity(prm), rel=1e-9)

    def test_methods(self):
        prm = PhaseParameters(SymmetricMatrix(1, (0.3,)), (0.5,))
        assert t_gauss_damped(prm, method="hermite") == pytest.approx(t_gauss_damped(prm, method="adaptive"),
                                                                     rel=1e-10)
        with pytest.raises(ValueError):
            t_gauss_damped(prm, method="simpson")


class TestFresnelCos:
    @pytest.mark.parametrize("u1,u2", [(0, 1), (-2, 3), (5, 40), (-100, 1000), (0.001, 0.002)])
    def test_against_scipy(self, u1, u2):
        assert fresnel_cos_segment(u1, u2) == pytest.approx(cos_segment_scipy(u1, u2), abs=1e-12)

    def test_order_checked(self):
        with pytest.raises(ValueError):
            fresnel_cos_segment(1, 0)

    def test_floor_positive_and_bounded_by_samples(self):
        floor = fresnel_floor_constant(-1.0, 1.0, 10.0)
        assert floor > 0
        lam = 10.0
        assert floor <= abs(cos_segment_scipy(-math.sqrt(lam), math.sqrt(lam))) + 1e-12

    def test_floor_argument_checks(self):
        with pytest.raises(ValueError):
            fresnel_floor_constant(0.5, 1.0, 10.0)
