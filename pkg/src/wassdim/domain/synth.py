"""
Seeded generators for synthetic point clouds.

Every generator is a pure function of its parameters and seed: the same inputs
give bit-identical outputs on every call and from every thread.
"""

import numpy as np
from sklearn.preprocessing import PolynomialFeatures

from wassdim.domain import rng
from wassdim.domain.errors import InvalidInputError
from wassdim.domain.model import EmbeddingSpec, PointCloud

# Ratio between the expected squared row norms of consecutive degree blocks.
DEGREE_DECAY = 0.5


def _check_count(n: int) -> None:
    if n < 1:
        raise InvalidInputError(f"sample count n must be >= 1, got {n}")


def _unit_directions(generator: np.random.Generator, n: int, dim: int) -> np.ndarray:
    directions = generator.standard_normal((n, dim))
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def sample_sphere(d: int, n: int, seed: int) -> PointCloud:
    """Draw n points uniformly from the unit sphere S^d in R^{d+1}.

    Args:
        d: Intrinsic dimension of the sphere
        n: Number of points
        seed: Seed of the sphere stream

    Returns:
        Cloud of shape (n, d + 1) with unit-norm rows
    """
    if d < 1:
        raise InvalidInputError(f"sphere dimension d must be >= 1, got {d}")
    _check_count(n)
    generator = rng.stream(seed, rng.SPHERE)
    return PointCloud(_unit_directions(generator, n, d + 1))


def sample_ball(d: int, n: int, radius: float, seed: int) -> PointCloud:
    """Draw n points uniformly from the d-dimensional ball of a given radius.

    The radius of each point is radius * U^(1/d), which inverts the CDF
    (r / radius)^d of the norm of a uniform point.
    """
    if d < 1:
        raise InvalidInputError(f"ball dimension d must be >= 1, got {d}")
    if not radius > 0:
        raise InvalidInputError(f"radius must be positive, got {radius}")
    _check_count(n)
    generator = rng.stream(seed, rng.BALL)
    directions = _unit_directions(generator, n, d)
    radii = radius * generator.random(n) ** (1.0 / d)
    return PointCloud(directions * radii[:, None])


def swiss_roll(n: int, seed: int) -> PointCloud:
    """Draw n points from the Isomap Swiss roll.

    Points are (t cos t, h, t sin t) with t uniform on [1.5 pi, 4.5 pi] and h
    uniform on [0, 21].
    """
    _check_count(n)
    generator = rng.stream(seed, rng.SWISS_ROLL)
    t = 1.5 * np.pi * (1.0 + 2.0 * generator.random(n))
    h = 21.0 * generator.random(n)
    return PointCloud(np.column_stack([t * np.cos(t), h, t * np.sin(t)]))


def _coefficient_matrix(
    spec: EmbeddingSpec, degrees: np.ndarray
) -> np.ndarray:
    generator = rng.stream(spec.seed, rng.EMBEDDING)
    m = spec.source_dim + 1
    target = spec.target_dim
    coefficients = np.empty((target, degrees.shape[0]))

    # Orthonormal columns keep the linear block at full column rank, which
    # makes the whole map an immersion.
    q, _ = np.linalg.qr(generator.standard_normal((target, m)))
    coefficients[:, degrees == 1] = q * np.sqrt(target)

    for degree in range(2, spec.degree + 1):
        block = degrees == degree
        count = int(block.sum())
        scale = np.sqrt(m * DEGREE_DECAY ** (degree - 1) / count)
        coefficients[:, block] = scale * generator.standard_normal((target, count))

    return coefficients / np.linalg.norm(coefficients, axis=1, keepdims=True)


def polynomial_embed(cloud: PointCloud, spec: EmbeddingSpec) -> PointCloud:
    """Map a sphere sample into R^D through random monomial features.

    The map is x -> A phi(x) where phi stacks every monomial of total degree
    1..degree. For degree 1 the map is the zero-padded identity, an exact
    isometry. For higher degrees A has unit-norm rows and a full-rank linear
    block.

    Args:
        cloud: Sample on S^d with ambient dimension d + 1
        spec: Embedding parameters

    Returns:
        Cloud of shape (n, spec.target_dim)

    Raises:
        InvalidInputError: If the cloud dimension is not spec.source_dim + 1
    """
    m = spec.source_dim + 1
    if cloud.dim != m:
        raise InvalidInputError(
            f"Cloud has dimension {cloud.dim} but the embedding expects {m}"
        )

    if spec.degree == 1:
        padded = np.zeros((cloud.n, spec.target_dim))
        padded[:, :m] = cloud.points
        return PointCloud(padded)

    features = PolynomialFeatures(degree=spec.degree, include_bias=False)
    phi = features.fit_transform(cloud.points)
    degrees = features.powers_.sum(axis=1)
    coefficients = _coefficient_matrix(spec, degrees)
    return PointCloud(phi @ coefficients.T)


def embedded_sphere(d: int, n: int, spec: EmbeddingSpec, seed: int) -> PointCloud:
    """Sample S^d and push it through a polynomial embedding."""
    return polynomial_embed(sample_sphere(d, n, seed), spec)
