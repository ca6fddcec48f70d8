import os
from pathlib import Path

import numpy as np
import pytest

from qcovpca import HsiCube, SpectralDataset, flatten_cube, load_npy

DATA_ENV = "QCOVPCA_DATA"

# accepted cube file names (220-band original or 200-band water-corrected variant)
CUBE_NAMES = ("indian_pines_corrected.npy", "indian_pines.npy")
GT_NAMES = ("indian_pines_gt.npy",)


def find_indian_pines():
    roots = []
    if os.environ.get(DATA_ENV):
        roots.append(Path(os.environ[DATA_ENV]))
    roots.append(Path(__file__).resolve().parent.parent / "data")
    for root in roots:
        for cube_name in CUBE_NAMES:
            cube = root / cube_name
            for gt_name in GT_NAMES:
                gt = root / gt_name
                if cube.is_file() and gt.is_file():
                    return cube, gt
    return None


@pytest.fixture(scope="session")
def indian_pines_paths():
    found = find_indian_pines()
    if found is None:
        pytest.skip(
            "Indian Pines scene not available; place indian_pines_corrected.npy and "
            f"indian_pines_gt.npy under ./data or ${DATA_ENV} (see README)"
        )
    return found


@pytest.fixture(scope="session")
def indian_pines_cube(indian_pines_paths):
    cube_path, gt_path = indian_pines_paths
    return HsiCube(load_npy(cube_path), load_npy(gt_path))


@pytest.fixture(scope="session")
def indian_pines_dataset(indian_pines_cube):
    return flatten_cube(indian_pines_cube, {2, 3, 5, 8, 10, 11})


def reflectance_cloud(m=120, n=8, seed=0, anisotropy=0.5):
    """Strictly positive synthetic reflectance-like samples with one dominant
    variance direction, so quantum/classical spectra behave like real scenes."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.8, 2.0, size=n)
    direction = rng.standard_normal(n)
    direction /= np.linalg.norm(direction)
    samples = base + 0.1 * rng.standard_normal((m, n))
    samples += np.outer(anisotropy * rng.standard_normal(m), direction)
    return np.abs(samples) + 0.05


def two_class_dataset(m_per_class=60, n=8, seed=0, shift=0.6):
    """Two displaced positive clouds labeled 1 and 2."""
    a = reflectance_cloud(m_per_class, n, seed=seed)
    b = reflectance_cloud(m_per_class, n, seed=seed + 1) + shift
    samples = np.vstack([a, b])
    labels = np.array([1] * m_per_class + [2] * m_per_class)
    return SpectralDataset(samples, labels, source="synthetic two-class")


@pytest.fixture
def synthetic_pair_dataset():
    return two_class_dataset()
