import numpy as np
import pytest

from src.pcm.integrals import (
    OBSERVABLES,
    abelian_two_sided,
    effective_sample_size,
    field_samples,
    link_samples,
    two_sided_compare,
)


def test_field_samples_are_flat(rng):
    weights, obs = field_samples(2, 2, 500, rng)
    assert np.all((weights > 0) & (weights <= 1))
    assert np.allclose(obs[:, OBSERVABLES.index("plaquette_trace")], 2.0)
    assert np.allclose(weights, np.exp(-obs[:, OBSERVABLES.index("action")]))


def test_link_samples_defect_scale(rng):
    eps = 1e-4
    _, obs = link_samples(2, 2, 500, eps, rng)
    plaq = obs[:, OBSERVABLES.index("plaquette_trace")]
    # ReTr exp(D) = 2 cos(|D| / sqrt(2)) with E|D|^2 = 3 eps / 2
    assert abs(np.mean(2.0 - plaq) - 0.75 * eps) < 0.2 * eps


def test_effective_sample_size():
    assert effective_sample_size(np.ones(10)) == pytest.approx(10)
    assert effective_sample_size(np.array([1.0, 0.0, 0.0])) == pytest.approx(1)


def test_two_sided_ratios_observable_independent(rng):
    result = two_sided_compare(2, 2, [1e-2, 5e-3], 100_000, rng)
    assert not result.inconclusive
    assert result.passed
    assert np.all(np.isfinite(result.ratios))


def test_two_sided_reproducible_across_threads():
    a = two_sided_compare(2, 2, [1e-2], 4000, np.random.default_rng(3), threads=1)
    b = two_sided_compare(2, 2, [1e-2], 4000, np.random.default_rng(3), threads=3)
    assert np.array_equal(a.ratios, b.ratios)


def test_abelian_closed_form_2x2():
    eps = 1e-3
    result = abelian_two_sided(2, eps)
    assert np.isclose(result.z_left, np.pi**1.5 / 2)
    assert np.isclose(result.z_right, np.pi**1.5 / np.sqrt(4 + eps))
    assert abs(result.ratio - 1) < 1e-3
    assert result.action_left == 1.5


@pytest.mark.parametrize("L", [2, 3, 4])
def test_abelian_limit(L):
    result = abelian_two_sided(L, 1e-6)
    assert abs(result.ratio - 1) < 1e-3
    assert abs(result.action_right - result.action_left) < 1e-3


def test_abelian_sampler_matches_closed_form(rng):
    result = abelian_two_sided(3, 1e-2, 200_000, rng)
    assert abs(result.mc_z_right - result.z_right) < 4 * result.mc_z_right_err
    assert abs(result.mc_action_right - result.action_right) < 0.02 * result.action_right
