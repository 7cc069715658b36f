from __future__ import annotations

import math
import unittest

import numpy as np
from pytools.convergence import EOCRecorder

from dugks.benchmarks import (
    PUBLISHED,
    BenchmarkCase,
    CaseKind,
    ConvergenceRow,
    contour_lines,
    convergence_study,
    divergence,
    init_circle,
    l2_error,
    make_case,
    phi_extrema,
    positive_mass,
    simulate,
    slotted_disk_distance,
    total_mass,
    translation_case,
    velocity,
    vortex_case,
    with_orders,
    zalesak_case,
)
from dugks.fields import Grid2D, GridError, ScalarField
from dugks.solver import SolverConfig


class CaseTest(unittest.TestCase):
    def test_default_geometry(self) -> None:
        translation = make_case(CaseKind.TRANSLATION)
        self.assertEqual((translation.l0, translation.radius, translation.center), (100, 25.0, (50.0, 50.0)))
        self.assertAlmostEqual(translation.period_time, 5000.0, places=9)
        self.assertEqual(translation.period_steps(0.5), 10_000)

        zalesak = make_case(CaseKind.ZALESAK)
        self.assertEqual((zalesak.radius, zalesak.slot_width, zalesak.slot_length), (80.0, 15.0, 140.0))
        self.assertAlmostEqual(zalesak.period_time, 20_000.0, places=9)

        vortex = make_case(CaseKind.VORTEX)
        self.assertAlmostEqual(vortex.radius, 30.0, places=12)
        self.assertEqual((vortex.center, vortex.n_vortex), ((100.0, 150.0), 8))
        self.assertEqual(vortex.period_steps(0.5), 160_000)

    def test_overrides(self) -> None:
        self.assertAlmostEqual(make_case(CaseKind.VORTEX, l0=100, n_vortex=2).period_time, 10_000.0, places=9)
        self.assertEqual(make_case(CaseKind.ZALESAK, slot_length=1.5).slot_length, 120.0)
        self.assertEqual(make_case(CaseKind.TRANSLATION, l0=50).grid().shape, (50, 50))

    def test_invalid_cases(self) -> None:
        with self.assertRaises(ValueError):
            BenchmarkCase(CaseKind.TRANSLATION, 100, 0.02, 30.0, (10.0, 50.0))
        with self.assertRaises(ValueError):
            vortex_case(n_vortex=0)
        with self.assertRaises(ValueError):
            translation_case(u0=0.0)


class InitialFieldTest(unittest.TestCase):
    def test_circle_profile(self) -> None:
        grid = Grid2D(20, 20)
        phi = init_circle(grid, (10.5, 10.5), 5.0, 2.0).values
        self.assertAlmostEqual(phi[10, 10], math.tanh(5.0), places=15)
        self.assertAlmostEqual(phi[15, 10], 0.0, places=15)
        self.assertAlmostEqual(phi[16, 10], -math.tanh(1.0), places=15)
        low, high = phi_extrema(ScalarField(grid, phi))
        self.assertGreaterEqual(low, -1.0)
        self.assertLessEqual(high, 1.0)

    def test_zalesak_examples(self) -> None:
        case = zalesak_case()
        phi = case.initial_field(case.grid(), 4.0).values
        self.assertAlmostEqual(phi[0, 0], -1.0, places=6)
        self.assertAlmostEqual(phi[50, 100], 1.0, places=6)
        # Slot centreline, well inside the cut.
        self.assertLess(phi[100, 60], -0.99)

    def test_slotted_disk_sign_matches_point_in_shape(self) -> None:
        rng = np.random.default_rng(17)
        x = rng.uniform(0.0, 200.0, size=200_000)
        y = rng.uniform(0.0, 200.0, size=200_000)
        center, radius, width, length = (100.0, 100.0), 80.0, 15.0, 140.0
        sdf = slotted_disk_distance(x, y, center, radius, width, length)
        in_disk = np.hypot(x - center[0], y - center[1]) <= radius
        in_slot = (
            (np.abs(x - center[0]) <= 0.5 * width)
            & (y >= center[1] - radius)
            & (y <= center[1] - radius + length)
        )
        clear = np.abs(sdf) > 1e-9
        np.testing.assert_array_equal((sdf > 0)[clear], (in_disk & ~in_slot)[clear])

    def test_slotted_disk_distance_values(self) -> None:
        center = (100.0, 100.0)
        # Deep in the disk on the left, nearest boundary is the rim.
        self.assertAlmostEqual(float(slotted_disk_distance(40.0, 100.0, center, 80.0, 15.0, 140.0)), 20.0)
        # On the slot centreline, nearest boundary is a slot wall.
        self.assertAlmostEqual(float(slotted_disk_distance(100.0, 60.0, center, 80.0, 15.0, 140.0)), -7.5)
        # Above the slot top, inside the remaining bridge.
        self.assertAlmostEqual(float(slotted_disk_distance(100.0, 165.0, center, 80.0, 15.0, 140.0)), 5.0)


class VelocityTest(unittest.TestCase):
    def test_examples(self) -> None:
        np.testing.assert_allclose(velocity(translation_case(), 3.0, 7.0), [0.02, 0.02])
        np.testing.assert_allclose(velocity(zalesak_case(), 100.0, 100.0), [0.0, 0.0], atol=1e-18)
        np.testing.assert_allclose(
            velocity(zalesak_case(), 150.0, 100.0), [0.0, 0.02 * math.pi * 0.25], atol=1e-18
        )
        case = vortex_case()
        x = np.linspace(1.0, 199.0, 7)
        np.testing.assert_allclose(velocity(case, x[:, None], x[None, :], 0.5 * case.period_time), 0.0, atol=1e-17)

    def test_vortex_reverses_in_time(self) -> None:
        case = vortex_case()
        rng = np.random.default_rng(4)
        x, y = rng.uniform(0.0, 200.0, size=(2, 100))
        for t in (0.0, 1234.5, 0.3 * case.period_time):
            np.testing.assert_allclose(
                velocity(case, x, y, case.period_time - t), -velocity(case, x, y, t), atol=1e-15
            )

    def test_steady_fields_ignore_time(self) -> None:
        for case in (translation_case(), zalesak_case()):
            np.testing.assert_array_equal(velocity(case, 20.0, 30.0, 0.0), velocity(case, 20.0, 30.0, 999.0))

    def test_sampled_divergence(self) -> None:
        for case in (translation_case(), zalesak_case()):
            self.assertLess(np.abs(divergence(case, case.grid())).max(), 1e-14)
        case = vortex_case(l0=1.0, u0=1.0)
        eoc = EOCRecorder()
        for cells in (16, 32, 64, 128):
            grid = Grid2D(cells, cells, h=1.0 / cells)
            eoc.add_data_point(grid.h, np.abs(divergence(case, grid, 0.1)).max())
        self.assertAlmostEqual(eoc.order_estimate(), 2.0, delta=0.2)


class DiagnosticsTest(unittest.TestCase):
    def setUp(self) -> None:
        self.grid = Grid2D(6, 5, h=0.5)
        rng = np.random.default_rng(0)
        self.phi = ScalarField(self.grid, rng.uniform(-1.0, 1.0, size=self.grid.shape))

    def test_l2_error_examples(self) -> None:
        self.assertEqual(l2_error(self.phi, self.phi), 0.0)
        flipped = ScalarField(self.grid, -self.phi.values)
        self.assertAlmostEqual(l2_error(flipped, self.phi), 2.0, places=14)

    def test_l2_error_rejects_degenerate_input(self) -> None:
        zero = ScalarField(self.grid, np.zeros(self.grid.shape))
        with self.assertRaises(ValueError):
            l2_error(self.phi, zero)
        with self.assertRaises(GridError):
            l2_error(ScalarField(Grid2D(5, 6), np.ones((5, 6))), self.phi)

    def test_mass_examples(self) -> None:
        self.assertEqual(positive_mass(ScalarField(self.grid, -np.ones(self.grid.shape))), 0.0)
        self.assertEqual(positive_mass(ScalarField(self.grid, np.ones(self.grid.shape))), 7.5)
        self.assertEqual(total_mass(ScalarField(self.grid, -np.ones(self.grid.shape))), -7.5)

    def test_extrema_of_a_constant(self) -> None:
        self.assertEqual(phi_extrema(ScalarField(self.grid, np.full(self.grid.shape, 0.25))), (0.25, 0.25))

    def test_positive_mass_of_the_initial_circle(self) -> None:
        case = translation_case()
        w = 4.0
        phi = case.initial_field(case.grid(), w)
        radius = case.radius
        # Disk area less the tanh deficit of the inner half of the profile, with its curvature term.
        expected = math.pi * radius**2 - math.pi * radius * w * math.log(2.0) + math.pi**3 * w**2 / 48.0
        self.assertAlmostEqual(positive_mass(phi) / expected, 1.0, delta=0.01)
        self.assertAlmostEqual(positive_mass(phi) / (math.pi * radius**2), 1.0, delta=0.15)

    def test_zero_contour_of_a_circle(self) -> None:
        grid = Grid2D(48, 48)
        phi = init_circle(grid, (24.0, 24.0), 12.0, 4.0)
        lines = contour_lines(phi)
        self.assertEqual(len(lines), 1)
        radii = np.hypot(lines[0][:, 0] - 24.0, lines[0][:, 1] - 24.0)
        np.testing.assert_allclose(radii, 12.0, atol=0.05)


class SimulationTest(unittest.TestCase):
    def test_simulate_reports_each_period(self) -> None:
        case = translation_case(l0=20, u0=0.1)
        config = SolverConfig.from_preset("DUGKS-I", grid=case.grid(), u0=0.1)
        seen: list[tuple[int, int]] = []
        phi0, state = simulate(case, config, periods=2, on_period=lambda p, s: seen.append((p, s.step_count)))
        self.assertEqual(seen, [(1, 400), (2, 800)])
        self.assertTrue(state.phi.is_finite())
        self.assertLess(l2_error(state.phi, phi0), 0.5)

    def test_convergence_study_is_deterministic(self) -> None:
        first = convergence_study("DUGKS-I", grids=(10, 20), cn=0.2, u0=0.1)
        second = convergence_study("DUGKS-I", grids=(10, 20), cn=0.2, u0=0.1)
        self.assertEqual([row.l2 for row in first], [row.l2 for row in second])
        self.assertEqual([row.cells for row in first], [10, 20])
        self.assertIsNone(first[0].order)
        self.assertIsNotNone(first[1].order)
        self.assertTrue(all(math.isfinite(row.l2) and row.l2 > 0 for row in first))

    def test_with_orders(self) -> None:
        rows = with_orders([ConvergenceRow(50, 0.1, None), ConvergenceRow(100, 0.025, None), ConvergenceRow(200, 0.0, None)])
        self.assertIsNone(rows[0].order)
        self.assertAlmostEqual(rows[1].order, 2.0, places=12)
        self.assertIsNone(rows[2].order)

    def test_published_values(self) -> None:
        self.assertEqual(PUBLISHED["table1"][("DUGKS-I", "WENO-Z5")], 0.0064)
        self.assertEqual(PUBLISHED["table1"][("DUGKS-AC", "CDI2")], 0.3528)
        self.assertEqual(PUBLISHED["table4_order"][("DUGKS-I", "400")], 3.34)
        self.assertEqual(PUBLISHED["table4"][("DUGKS-AC", "100")], 0.1912)
        self.assertEqual(PUBLISHED["vortex_metrics"][("DUGKS-AC", "mass_loss")], 5.73e-2)
        self.assertEqual(PUBLISHED["vortex_metrics"][("LBE-AC", "mass_loss")], 5.65e-2)


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
