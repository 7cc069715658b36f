from __future__ import annotations

import math
import unittest

import numpy as np

from dugks.kinetic import (
    KineticModel,
    Variant,
    equilibrium,
    f_hat_from_f_original,
    f_hat_plus_from_f_tilde,
    f_original_from_f_hat,
    f_tilde_plus,
    force_second_moment,
    mach_number,
    relaxation_time,
    source_term,
    theta,
)
from dugks.lattice import D2Q9, moment0, moment1, moment2

TAU = 0.004
DT = 0.5


def random_inputs(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    phi = rng.uniform(-1.0, 1.0, size=size)
    radius = rng.uniform(0.0, 0.1, size=size)
    angle = rng.uniform(0.0, 2.0 * math.pi, size=size)
    u = np.stack((radius * np.cos(angle), radius * np.sin(angle)), axis=-1)
    angle = rng.uniform(0.0, 2.0 * math.pi, size=size)
    normal = np.stack((np.cos(angle), np.sin(angle)), axis=-1)
    return phi, u, normal


class ThetaTest(unittest.TestCase):
    def test_examples(self) -> None:
        self.assertEqual(theta(0.0, 4.0), 0.5)
        self.assertEqual(theta(1.0, 4.0), 0.0)
        self.assertEqual(theta(-1.0, 7.0), 0.0)
        self.assertAlmostEqual(theta(math.tanh(1.0), 4.0), 0.209987, places=6)

    def test_matches_the_slope_of_the_tanh_profile(self) -> None:
        w = 4.0
        s = w / 2.0
        delta = 1e-5
        slope = (math.tanh(2.0 * (s + delta) / w) - math.tanh(2.0 * (s - delta) / w)) / (2.0 * delta)
        self.assertAlmostEqual(slope, theta(math.tanh(2.0 * s / w), w), delta=1e-9)


class EquilibriumTest(unittest.TestCase):
    def setUp(self) -> None:
        self.model_a = KineticModel(Variant.A, w=4.0, tau_f=TAU)
        self.model_b = KineticModel(Variant.B, w=4.0, tau_f=TAU)

    def test_rest_state(self) -> None:
        for model in (self.model_a, self.model_b):
            np.testing.assert_allclose(equilibrium(model, 0.8, np.zeros(2)), 0.8 * D2Q9.weights, atol=1e-16)

    def test_streamwise_population(self) -> None:
        u = np.array([0.02, 0.0])
        self.assertAlmostEqual(equilibrium(self.model_b, 1.0, u)[1], 1.06 / 9.0, places=15)
        self.assertAlmostEqual(equilibrium(self.model_a, 1.0, u)[1], 1.0612 / 9.0, places=15)

    def test_moment_identities(self) -> None:
        rng = np.random.default_rng(2024)
        phi, u, _ = random_inputs(rng, 1000)
        for model in (self.model_a, self.model_b):
            with self.subTest(variant=model.variant):
                feq = equilibrium(model, phi, u)
                self.assertEqual(feq.shape, (1000, 9))
                np.testing.assert_allclose(moment0(feq), phi, atol=1e-13)
                np.testing.assert_allclose(moment1(feq), phi[:, None] * u, atol=1e-13)
        feq = equilibrium(self.model_a, phi, u)
        expected = D2Q9.cs2 * phi[:, None, None] * np.eye(2) + phi[:, None, None] * np.einsum("nd,ne->nde", u, u)
        np.testing.assert_allclose(moment2(feq), expected, atol=1e-13)

    def test_model_validation(self) -> None:
        with self.assertRaises(ValueError):
            KineticModel(Variant.A, w=0.0, tau_f=TAU)
        with self.assertRaises(ValueError):
            KineticModel(Variant.B, w=4.0, tau_f=-1.0)


class SourceTermTest(unittest.TestCase):
    def setUp(self) -> None:
        self.model_a = KineticModel(Variant.A, w=4.0, tau_f=TAU)
        self.model_b = KineticModel(Variant.B, w=4.0, tau_f=TAU)

    def test_vanishes_without_forcing(self) -> None:
        for model in (self.model_a, self.model_b):
            force = source_term(model, 0.0, np.array([1.0, 0.0]), np.zeros(2))
            np.testing.assert_array_equal(force, np.zeros(9))

    def test_examples(self) -> None:
        force = source_term(self.model_a, 0.5, np.array([1.0, 0.0]))
        np.testing.assert_allclose(moment1(force), [D2Q9.cs2 * 0.5, 0.0], atol=1e-15)
        force = source_term(self.model_b, 0.0, np.array([1.0, 0.0]), np.array([0.001, 0.0]))
        np.testing.assert_allclose(moment1(force), [0.001, 0.0], atol=1e-15)

    def test_variant_a_ignores_the_time_derivative(self) -> None:
        normal = np.array([0.6, 0.8])
        np.testing.assert_array_equal(
            source_term(self.model_a, 0.3, normal, np.array([1.0, 2.0])),
            source_term(self.model_a, 0.3, normal),
        )

    def test_moment_identities(self) -> None:
        rng = np.random.default_rng(77)
        phi, _, normal = random_inputs(rng, 1000)
        dtphiu = rng.uniform(-1e-3, 1e-3, size=(1000, 2))
        th = theta(phi, 4.0)
        force_a = source_term(self.model_a, th, normal)
        force_b = source_term(self.model_b, th, normal, dtphiu)
        np.testing.assert_allclose(moment0(force_a), 0.0, atol=1e-13)
        np.testing.assert_allclose(moment0(force_b), 0.0, atol=1e-13)
        np.testing.assert_allclose(moment1(force_a), D2Q9.cs2 * th[:, None] * normal, atol=1e-13)
        np.testing.assert_allclose(
            moment1(force_b), D2Q9.cs2 * th[:, None] * normal + dtphiu, atol=1e-13
        )
        np.testing.assert_allclose(force_second_moment(self.model_a, th, normal), 0.0, atol=1e-13)
        np.testing.assert_allclose(force_second_moment(self.model_b, th, normal, dtphiu), 0.0, atol=1e-13)


class TransformTest(unittest.TestCase):
    def setUp(self) -> None:
        rng = np.random.default_rng(5)
        self.f_tilde = rng.normal(size=(50, 9))
        self.feq = rng.normal(size=(50, 9))
        self.force = rng.normal(size=(50, 9))

    def test_equilibrium_is_a_fixed_point(self) -> None:
        zero = np.zeros_like(self.feq)
        for transform in (f_hat_plus_from_f_tilde, f_tilde_plus):
            np.testing.assert_allclose(transform(self.feq, self.feq, zero, TAU, DT), self.feq, atol=1e-14)
        np.testing.assert_allclose(
            f_original_from_f_hat(self.feq, self.feq, zero, TAU, DT / 2), self.feq, atol=1e-14
        )

    def test_coefficient_example(self) -> None:
        value = f_hat_plus_from_f_tilde(1.0, 0.0, 0.0, TAU, DT)
        self.assertAlmostEqual(float(value), (0.008 - 0.25) / 0.508, places=15)
        self.assertAlmostEqual(float(value), -0.476378, places=6)

    def test_zeroth_moment_is_preserved(self) -> None:
        model = KineticModel(Variant.A, w=4.0, tau_f=TAU)
        phi, u, normal = random_inputs(np.random.default_rng(8), 50)
        feq = equilibrium(model, phi, u)
        force = source_term(model, theta(phi, 4.0), normal)
        f_tilde = feq + 0.01 * (self.f_tilde - self.f_tilde.mean(axis=-1, keepdims=True))
        np.testing.assert_allclose(moment0(f_hat_plus_from_f_tilde(f_tilde, feq, force, TAU, DT)), phi, atol=1e-13)
        np.testing.assert_allclose(moment0(f_tilde_plus(f_tilde, feq, force, TAU, DT)), phi, atol=1e-13)

    def test_two_forms_of_the_post_collision_update_agree(self) -> None:
        f_hat = f_hat_plus_from_f_tilde(self.f_tilde, self.feq, self.force, TAU, DT)
        np.testing.assert_allclose(
            f_tilde_plus(self.f_tilde, self.feq, self.force, TAU, DT),
            4.0 / 3.0 * f_hat - self.f_tilde / 3.0,
            atol=1e-14,
        )

    def test_coefficients_of_the_first_two_slots_sum_to_one(self) -> None:
        for tau in (1e-4, TAU, 0.7, 30.0):
            with self.subTest(tau=tau):
                self.assertAlmostEqual(float(f_hat_plus_from_f_tilde(1.0, 1.0, 0.0, tau, DT)), 1.0, places=14)
                self.assertAlmostEqual(float(f_tilde_plus(1.0, 1.0, 0.0, tau, DT)), 1.0, places=14)
                self.assertAlmostEqual(float(f_original_from_f_hat(1.0, 1.0, 0.0, tau, DT / 2)), 1.0, places=14)

    def test_collisionless_limit(self) -> None:
        zero = np.zeros_like(self.feq)
        np.testing.assert_allclose(
            f_tilde_plus(self.f_tilde, self.feq, zero, 1e9, DT), self.f_tilde, atol=1e-8
        )

    def test_zero_half_step_returns_the_input(self) -> None:
        np.testing.assert_array_equal(
            f_original_from_f_hat(self.f_tilde, self.feq, self.force, TAU, 0.0), self.f_tilde
        )

    def test_round_trip(self) -> None:
        s = DT / 2
        f_hat = f_hat_from_f_original(self.f_tilde, self.feq, self.force, TAU, s)
        np.testing.assert_allclose(
            f_original_from_f_hat(f_hat, self.feq, self.force, TAU, s), self.f_tilde, atol=1e-14
        )


class ParameterTest(unittest.TestCase):
    def test_relaxation_time_for_the_standard_setup(self) -> None:
        self.assertAlmostEqual(relaxation_time(0.02, 4.0, 60.0), 0.004, places=15)
        model = KineticModel(Variant.A, w=4.0, tau_f=0.004)
        self.assertAlmostEqual(model.mobility, 0.004 / 3.0, places=15)

    def test_relaxation_time_rejects_non_positive_peclet(self) -> None:
        with self.assertRaises(ValueError):
            relaxation_time(0.02, 4.0, 0.0)

    def test_mach_number(self) -> None:
        u = np.array([[0.02, 0.0], [0.0, -0.01]])
        self.assertAlmostEqual(mach_number(u), 0.02 * math.sqrt(3.0), places=14)


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
