"""
Tests for cocycles, Lyapunov exponent estimators, eps sweeps and accelerations.
"""

import math

import numpy as np
import pytest

from qpcocycle.core.cocycle_engine import (
    Cocycle,
    acceleration_at,
    determinant_half_average,
    divisor_log_average,
    epsilon_sweep,
    le_iterative,
    le_rational,
    solution_growth,
    transfer_product,
)
from qpcocycle.core.coupling import Coupling
from qpcocycle.core.frequency import Frequency
from qpcocycle.core.harper import build_cocycle, harper_i_closed
from qpcocycle.core.jensen import harper_i_eps_closed
from qpcocycle.core.spectrum import mid_band_energies, spectrum_floquet
from qpcocycle.core.trigcore import Mat2C, TrigPoly
from qpcocycle.exceptions import AtKink, InputError, NotRational, SingularInverse, ZeroCocycle

TWO_PI = 2 * math.pi
AMO = Coupling(0, 0.5, 0)


@pytest.fixture
def golden():
    return Frequency.golden()


@pytest.fixture
def hinge():
    """diag(exp(-2 pi i z), 1) at beta = 1/3: L(D_eps) = max(2 pi eps, 0)."""
    freq = Frequency.rational(1, 3)
    return Cocycle.from_matrix(freq, [[TrigPoly.from_mapping({-1: 1}), 0], [0, 1]], label="hinge")


@pytest.fixture
def hinge_profile(hinge):
    return epsilon_sweep(hinge, -0.5, 0.5, 21, le_backend="rational", window=5)


class TestCocycle:
    def test_from_json(self, golden):
        """Numbers, [re, im] pairs and coefficient objects are accepted."""
        payload = {"matrix": [[1, {"coeffs": [[1, 1.0, 0.0]]}], [0, [0, 1]]], "label": "demo"}
        cocycle = Cocycle.from_json(payload, golden)
        assert cocycle.label == "demo"
        np.testing.assert_allclose(cocycle.at(0.0).to_array(), [[1, 1], [0, 1j]], atol=1e-12)

    @pytest.mark.parametrize("payload", [{}, {"matrix": [[1, 2]]}, {"matrix": [[1, 2], [3, "x"]]}])
    def test_from_json_invalid(self, payload, golden):
        """Missing, ragged or non-numeric matrices are input errors."""
        with pytest.raises(InputError):
            Cocycle.from_json(payload, golden)

    def test_transfer_product_of_constant(self, golden):
        """A constant cocycle's n-step product is the matrix power."""
        cocycle = Cocycle.constant(golden, Mat2C(1, 1, 0, 1))
        np.testing.assert_allclose(transfer_product(cocycle, 0.2, 5).to_array(), [[1, 5], [0, 1]])
        with pytest.raises(InputError):
            transfer_product(cocycle, 0.2, 0)

    def test_singularity(self, golden):
        """det A = c(x) cbar(x - beta) vanishes on the real line iff c does."""
        assert not build_cocycle(Coupling(0, 0.5, 0), golden, 0.0).is_singular()
        assert build_cocycle(Coupling(0.3, 0.7, 0.4), golden, 0.0).is_singular()

    def test_transfer_product_splits(self, golden):
        """D^(m+n)(x) = D^(n)(x + m beta) D^(m)(x) for random x, m, n and heights."""
        rng = np.random.default_rng(5)
        cocycle = build_cocycle(Coupling(0.5, 0.2, 0.2), golden, 0.2)
        for _ in range(20):
            x = float(rng.uniform())
            m, n = (int(k) for k in rng.integers(1, 25, size=2))
            eps = float(rng.uniform(-0.05, 0.05))
            whole = transfer_product(cocycle, x, m + n, eps)
            split = transfer_product(cocycle, x + m * golden.value, n, eps) @ transfer_product(cocycle, x, m, eps)
            np.testing.assert_allclose(split.to_array(), whole.to_array(), rtol=0, atol=1e-10 * whole.norm())

    @pytest.mark.parametrize("x", [0.0, 0.1])
    def test_harper_two_step_product_at_half(self, x):
        """Coupling (0, 1, 0), E = 0, beta = 1/2: the two-step product is [[-v^2 - 1, -v], [-v, -1]]."""
        cocycle = build_cocycle(Coupling(0, 1, 0), Frequency.rational(1, 2), 0.0)
        v = 2 * math.cos(TWO_PI * x)
        expected = [[-v * v - 1, -v], [-v, -1]]
        np.testing.assert_allclose(transfer_product(cocycle, x, 2).to_array(), expected, atol=1e-12)


class TestLeIterative:
    def test_constant_diagonal(self, golden):
        """diag(2, 1) grows like 2^n."""
        est, seq = le_iterative(Cocycle.constant(golden, Mat2C.diag(2, 1)), n=64, phase_samples=2)
        assert est == pytest.approx(math.log(2), abs=1e-9)
        assert [k for k, _ in seq] == [1, 2, 4, 8, 16, 32, 64]
        assert seq[0][1] == pytest.approx(0.5 * math.log(5))

    def test_checkpoint_list_ends_at_n(self, golden):
        """A product length that is not a power of two is still the last checkpoint."""
        result = le_iterative(Cocycle.constant(golden, Mat2C.diag(3, 1)), n=100, phase_samples=1)
        assert result.upper_sequence[-1][0] == 100
        assert result.n == 100
        assert result.flagged == 0

    def test_almost_mathieu_lower_bound(self, golden):
        """Herman's bound: L(B) >= log 2 for coupling (0, 1/2, 0) at every energy."""
        cocycle = build_cocycle(Coupling(0, 0.5, 0), golden, 0.0, "B")
        est = le_iterative(cocycle, n=2000, phase_samples=4).estimate
        assert est > math.log(2) - 0.02

    def test_zero_cocycle(self, golden):
        """The zero matrix has exponent -inf and is refused."""
        with pytest.raises(ZeroCocycle):
            le_iterative(Cocycle.constant(golden, Mat2C(0, 0, 0, 0)), n=10)

    def test_bad_sizes(self, golden):
        """Negative phase counts are input errors."""
        with pytest.raises(InputError):
            le_iterative(Cocycle.constant(golden, Mat2C.identity()), n=10, phase_samples=-1)

    def test_doubling_sequence_is_subadditive(self):
        """L_2n <= L_n when the phase grid is invariant under the shift by n beta."""
        freq = Frequency.rational(1, 8)
        for coupling, energy in [((0.2, 0.5, 0.1), 0.4), ((0, 0.5, 0), 1.3), ((0.6, 0.3, 0.5), -0.7)]:
            cocycle = build_cocycle(Coupling(*coupling), freq, energy)
            result = le_iterative(cocycle, n=256, phase_samples=8)
            values = [value for _, value in result.upper_sequence]
            assert len(values) == 9
            for shorter, longer in zip(values, values[1:]):
                assert longer <= shorter + 1e-9


class TestLeRational:
    def test_identity(self):
        """The identity cocycle has exponent 0."""
        assert le_rational(Cocycle.constant(Frequency.rational(1, 3), Mat2C.identity())) == pytest.approx(0.0)

    @pytest.mark.parametrize("eps", [-0.2, 0.0, 0.15])
    def test_hinge_is_exact(self, hinge, eps):
        """Quadrature reproduces max(2 pi eps, 0) on both sides of the kink."""
        assert le_rational(hinge, eps) == pytest.approx(max(TWO_PI * eps, 0.0), abs=1e-9)

    def test_needs_rational_frequency(self, golden):
        """Irrational frequencies have no periodic formula."""
        with pytest.raises(NotRational):
            le_rational(Cocycle.constant(golden, Mat2C.identity()))

    def test_quad_points_at_least_q(self, hinge):
        """At least one node per period is needed."""
        with pytest.raises(InputError):
            le_rational(hinge, quad_points=2)

    @pytest.mark.parametrize("eps", [-0.2, 0.0, 0.3])
    def test_determinant_relation(self, eps):
        """L(A_eps) - L(B_eps) = I_eps(c) away from the root heights of c."""
        coupling = Coupling(0.5, 0.2, 0.2)
        freq = Frequency.rational(2, 5)
        le_a = le_rational(build_cocycle(coupling, freq, 0.3, "A"), eps)
        le_b = le_rational(build_cocycle(coupling, freq, 0.3, "B"), eps)
        assert le_a - le_b == pytest.approx(harper_i_eps_closed(coupling, eps), abs=1e-8)

    def test_matches_iterative_in_band(self):
        """At beta = 2/5 and a mid-band energy the periodic formula matches long products."""
        bands = spectrum_floquet(AMO, 2, 5, theta_samples=8)
        energy = mid_band_energies(bands, 1)[0]
        cocycle = build_cocycle(AMO, Frequency.rational(2, 5), energy)
        iterative = le_iterative(cocycle, n=4000, phase_samples=1000).estimate
        assert le_rational(cocycle) == pytest.approx(iterative, abs=5e-3)

    def test_matches_iterative_in_gap(self):
        """Outside the spectrum both estimators converge fast."""
        cocycle = build_cocycle(AMO, Frequency.rational(2, 5), 3.5)
        iterative = le_iterative(cocycle, n=4000, phase_samples=40).estimate
        assert le_rational(cocycle) == pytest.approx(iterative, abs=1e-3)


class TestSweep:
    def test_flat_profile(self, golden):
        """A constant cocycle has a flat profile with no kinks."""
        profile = epsilon_sweep(
            Cocycle.constant(golden, Mat2C.diag(2, 1)), -0.2, 0.2, 5, n=32, phase_samples=2
        )
        assert profile.le_values == pytest.approx((math.log(2),) * 5, abs=1e-9)
        assert profile.slopes == pytest.approx((0.0,), abs=1e-9)
        assert profile.kinks == ()
        assert profile.is_convex()

    def test_hinge_kink(self, hinge_profile):
        """The single kink of max(2 pi eps, 0) is located at eps = 0."""
        assert len(hinge_profile.kinks) == 1
        assert hinge_profile.kinks[0] == pytest.approx(0.0, abs=1e-9)
        assert hinge_profile.is_convex()
        rows = hinge_profile.rows()
        assert len(rows) == 21
        assert [r["kink"] for r in rows].index(True) == 10

    @pytest.mark.parametrize("kwargs", [{"steps": 2}, {"eps_min": 0.5}, {"le_backend": "spline"}])
    def test_invalid(self, hinge, kwargs):
        """Short grids, empty ranges and unknown backends are input errors."""
        args = {"eps_min": -0.5, "eps_max": 0.5, "steps": 11, "le_backend": "rational"}
        args.update(kwargs)
        with pytest.raises(InputError):
            epsilon_sweep(hinge, **args)

    def test_rational_backend_needs_rational(self, golden):
        """The rational backend refuses irrational frequencies."""
        with pytest.raises(NotRational):
            epsilon_sweep(Cocycle.constant(golden, Mat2C.identity()), -0.1, 0.1, 5, le_backend="rational")


class TestAcceleration:
    def test_integer_slopes(self, hinge_profile):
        """Slopes are 0 below the kink and 1 above it."""
        above = acceleration_at(hinge_profile, 0.3)
        assert above.nearest_int == 1
        assert above.residual < 1e-6
        below = acceleration_at(hinge_profile, -0.3)
        assert below.nearest_int == 0
        assert below.residual < 1e-6

    def test_at_kink(self, hinge_profile):
        """Within one grid step of a kink both one-sided slopes are reported."""
        with pytest.raises(AtKink) as info:
            acceleration_at(hinge_profile, 0.02)
        assert info.value.left_slope == pytest.approx(0.0, abs=1e-6)
        assert info.value.right_slope == pytest.approx(1.0, abs=1e-6)

    def test_outside_grid(self, hinge_profile):
        """eps must lie strictly inside the grid."""
        with pytest.raises(InputError):
            acceleration_at(hinge_profile, 0.5)


class TestSolutionGrowth:
    def test_diagonal_directions(self, golden):
        """The contracting vector shrinks forward and grows backward."""
        cocycle = Cocycle.constant(golden, Mat2C.diag(2, 0.5))
        growth = solution_growth(cocycle, 0.1, [0, 1], 50)
        assert growth.forward_rate == pytest.approx(math.log(0.5))
        assert growth.backward_rate == pytest.approx(math.log(2))

    def test_generic_vector(self, golden):
        """A generic vector picks up the top exponent."""
        cocycle = Cocycle.constant(golden, Mat2C.diag(2, 0.5))
        growth = solution_growth(cocycle, 0.1, [0.6, 0.8], 200)
        assert growth.forward_rate == pytest.approx(math.log(2), abs=5e-3)

    def test_singular_backward_step(self, golden):
        """A singular step stops the backward iteration; the forward rate is attached."""
        cocycle = Cocycle.constant(golden, Mat2C(1, 0, 0, 0))
        with pytest.raises(SingularInverse) as info:
            solution_growth(cocycle, 0.1, [1, 0], 10)
        assert info.value.step == 1
        assert info.value.forward_rate == pytest.approx(0.0)

    def test_unit_vector_required(self, golden):
        """The starting vector must have norm one."""
        with pytest.raises(InputError):
            solution_growth(Cocycle.constant(golden, Mat2C.identity()), 0.0, [1, 1], 10)


class TestDeterminantSplit:
    def test_constant(self, golden):
        """Half the log determinant of a constant matrix."""
        assert determinant_half_average(Cocycle.constant(golden, Mat2C.diag(2, 0.5))) == pytest.approx(0.0)
        assert determinant_half_average(Cocycle.constant(golden, Mat2C.diag(2, 1))) == pytest.approx(
            0.5 * math.log(2)
        )

    def test_normalized_harper_cocycle(self, golden):
        """B = A / c has det B = cbar(x - beta) / c(x), whose log average vanishes on the real line."""
        coupling = Coupling(0.5, 0.2, 0.2)
        b = build_cocycle(coupling, golden, 0.1, "B")
        assert determinant_half_average(b) == pytest.approx(0.0, abs=1e-9)
        assert divisor_log_average(b) == pytest.approx(harper_i_closed(coupling), abs=1e-9)
        assert divisor_log_average(build_cocycle(coupling, golden, 0.1, "A")) == 0.0
