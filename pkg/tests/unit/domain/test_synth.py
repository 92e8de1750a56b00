import numpy as np
import pytest
from scipy.spatial.distance import cdist, pdist

from wassdim.domain.errors import InvalidInputError
from wassdim.domain.model import EmbeddingSpec, PointCloud
from wassdim.domain.synth import (
    embedded_sphere,
    polynomial_embed,
    sample_ball,
    sample_sphere,
    swiss_roll,
)


def test_sample_sphere_shape_and_norms():
    cloud = sample_sphere(d=3, n=500, seed=1)
    assert (cloud.n, cloud.dim) == (500, 4)
    np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), 1.0, atol=1e-12)


def test_generators_are_bit_deterministic():
    np.testing.assert_array_equal(
        sample_sphere(2, 100, seed=3).points, sample_sphere(2, 100, seed=3).points
    )
    np.testing.assert_array_equal(
        swiss_roll(100, seed=3).points, swiss_roll(100, seed=3).points
    )
    np.testing.assert_array_equal(
        sample_ball(5, 100, 1.0, seed=3).points, sample_ball(5, 100, 1.0, seed=3).points
    )
    spec = EmbeddingSpec(source_dim=2, target_dim=20, degree=3, seed=9)
    np.testing.assert_array_equal(
        embedded_sphere(2, 50, spec, seed=3).points,
        embedded_sphere(2, 50, spec, seed=3).points,
    )


def test_different_seeds_give_different_samples():
    assert not np.array_equal(
        sample_sphere(2, 10, seed=0).points, sample_sphere(2, 10, seed=1).points
    )


def test_sphere_is_roughly_centered():
    cloud = sample_sphere(d=2, n=20000, seed=0)
    np.testing.assert_allclose(cloud.points.mean(axis=0), 0.0, atol=0.03)


def test_generators_reject_bad_arguments():
    with pytest.raises(InvalidInputError):
        sample_sphere(d=0, n=10, seed=0)
    with pytest.raises(InvalidInputError):
        sample_sphere(d=2, n=0, seed=0)
    with pytest.raises(InvalidInputError):
        sample_ball(d=2, n=10, radius=0.0, seed=0)
    with pytest.raises(InvalidInputError):
        swiss_roll(n=0, seed=0)


def test_sample_ball_stays_inside_radius():
    cloud = sample_ball(d=5, n=2000, radius=2.0, seed=4)
    norms = np.linalg.norm(cloud.points, axis=1)
    assert cloud.dim == 5
    assert norms.max() <= 2.0
    # Half of the volume of a 5-ball lies beyond radius 2 * 0.5^(1/5).
    assert np.mean(norms > 2.0 * 0.5 ** 0.2) == pytest.approx(0.5, abs=0.05)


def test_swiss_roll_ranges():
    cloud = swiss_roll(2000, seed=0)
    x, h, z = cloud.points.T
    t = np.hypot(x, z)
    assert cloud.dim == 3
    assert t.min() >= 1.5 * np.pi - 1e-9
    assert t.max() <= 4.5 * np.pi + 1e-9
    assert h.min() >= 0.0 and h.max() <= 21.0


def test_degree_one_embedding_is_isometric_padding():
    sphere = sample_sphere(2, 64, seed=5)
    small = polynomial_embed(sphere, EmbeddingSpec(2, 20, degree=1))
    large = polynomial_embed(sphere, EmbeddingSpec(2, 100, degree=1))

    assert small.dim == 20 and large.dim == 100
    np.testing.assert_array_equal(small.points[:, :3], sphere.points)
    np.testing.assert_array_equal(small.points[:, 3:], 0.0)
    np.testing.assert_array_equal(pdist(small.points), pdist(sphere.points))
    np.testing.assert_array_equal(pdist(small.points), pdist(large.points))


def test_embedding_checks_source_dimension():
    with pytest.raises(InvalidInputError):
        polynomial_embed(PointCloud(np.zeros((4, 5))), EmbeddingSpec(2, 20))


def test_embedding_seed_changes_the_map_not_the_shape():
    sphere = sample_sphere(2, 30, seed=0)
    a = polynomial_embed(sphere, EmbeddingSpec(2, 20, degree=3, seed=0))
    b = polynomial_embed(sphere, EmbeddingSpec(2, 20, degree=3, seed=1))
    assert a.points.shape == b.points.shape == (30, 20)
    assert not np.array_equal(a.points, b.points)


def test_cubic_embedding_preserves_local_neighbors_on_a_circle():
    circle = sample_sphere(1, 400, seed=2)
    image = polynomial_embed(circle, EmbeddingSpec(1, 20, degree=3, seed=0))

    source = cdist(circle.points, circle.points)
    target = cdist(image.points, image.points)
    np.fill_diagonal(source, np.inf)
    np.fill_diagonal(target, np.inf)

    nearest_in_image = np.argmin(target, axis=1)
    source_top = np.argsort(source, axis=1)[:, :10]
    kept = np.mean([nearest_in_image[i] in source_top[i] for i in range(circle.n)])
    assert kept >= 0.95


def test_cubic_embedding_is_injective_on_a_sample():
    sphere = sample_sphere(2, 300, seed=1)
    image = embedded_sphere(2, 300, EmbeddingSpec(2, 20, degree=3), seed=1)
    np.testing.assert_array_equal(
        image.points, polynomial_embed(sphere, EmbeddingSpec(2, 20, degree=3)).points
    )
    assert pdist(image.points).min() > 0


@pytest.mark.parametrize("d", [2, 3])
def test_sample_ball_follows_the_radial_law(d):
    norms = np.linalg.norm(sample_ball(d, 50000, 1.0, seed=d).points, axis=1)
    for r in (0.25, 0.5, 0.8):
        assert np.mean(norms <= r) == pytest.approx(r**d, abs=0.02)
    assert np.mean(np.log(1.0 / norms)) == pytest.approx(1.0 / d, rel=0.05)


def test_sample_ball_scales_with_radius():
    norms = np.linalg.norm(sample_ball(2, 50000, 3.0, seed=9).points, axis=1)
    assert np.mean(norms <= 1.5) == pytest.approx(0.25, abs=0.02)
