import numpy as np
import pytest

from lmomcts import RandomStream


@pytest.fixture
def rng():
    return RandomStream(20240)


def brute_force_fronts(objectives: np.ndarray) -> list[list[int]]:
    """Textbook front extraction: repeatedly peel the non-dominated set.

    Deliberately naive (no bookkeeping, no shared kernels) so it can serve
    as the O(n^2 m) oracle for the fast sort.
    """
    remaining = list(range(len(objectives)))
    fronts = []
    while remaining:
        front = []
        for i in remaining:
            dominated = False
            for j in remaining:
                if j == i:
                    continue
                if np.all(objectives[j] <= objectives[i]) and np.any(objectives[j] < objectives[i]):
                    dominated = True
                    break
            if not dominated:
                front.append(i)
        fronts.append(front)
        remaining = [i for i in remaining if i not in front]
    return fronts


def random_nondominated_front(n_points: int, m: int, generator: np.random.Generator) -> np.ndarray:
    """Mutually non-dominated points: normalized positive vectors with radius jitter."""
    raw = np.abs(generator.normal(size=(n_points, m))) + 1e-9
    sphere = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    return sphere * generator.uniform(0.7, 1.0, size=(n_points, 1))
