import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def tiny_angle(a, b) -> float:
    """Angle in degrees between two unit vectors via the chord length.

    Resolves angles far below the acos quantization floor (~1.2e-6 deg for
    float64 dot products), which matters for sub-1e-6-degree comparisons.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.degrees(2.0 * np.arcsin(min(np.linalg.norm(a - b) / 2.0, 1.0))))


def tiny_angle_field(a, b) -> np.ndarray:
    """Per-pixel chord-based angle map in degrees for two unit-norm fields."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    a = a / np.linalg.norm(a, axis=-1, keepdims=True)
    b = b / np.linalg.norm(b, axis=-1, keepdims=True)
    chord = np.linalg.norm(a - b, axis=-1)
    return np.degrees(2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0)))


def random_unit(rng) -> np.ndarray:
    v = rng.uniform(0.1, 1.0, 3)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
