from __future__ import annotations

import numpy as np
import pytest

from chaocipher.cipher import CipherKey
from chaocipher.hyperchaos import DEMO_PARAMS, ChaosParams, TrajectoryDivergedError, generate_keystreams
from chaocipher.imagecore import ColorImage


def random_image(rng: np.random.Generator, m: int, n: int | None = None) -> ColorImage:
    return ColorImage(rng.integers(0, 256, size=(m, m if n is None else n, 3), dtype=np.uint8))


def random_bounded_key(rng: np.random.Generator, length: int, tries: int = 200) -> CipherKey:
    """Rejection-sample keys from the bounded chaotic region until one lasts ``length`` iterates."""
    for _ in range(tries):
        chaos = ChaosParams(
            x0=rng.uniform(0.5, 1.5), y0=rng.uniform(0.5, 1.5),
            a1=rng.uniform(1.88, 1.92), a2=rng.uniform(0.9, 1.1),
            a3=rng.uniform(1.0, 1.2), a4=rng.uniform(1.35, 1.45),
        )
        try:
            generate_keystreams(chaos, length)
        except TrajectoryDivergedError:
            continue
        return CipherKey(chaos, int(rng.integers(0, 256)))
    raise RuntimeError("no bounded key found")


def natural_photos() -> dict[str, ColorImage]:
    """Three 256x256 lossless crops of photographs bundled with scikit-image."""
    data = pytest.importorskip("skimage.data")
    return {
        "astronaut": ColorImage(data.astronaut()[::2, ::2]),
        "chelsea": ColorImage(data.chelsea()[22:278, 97:353]),
        "coffee": ColorImage(data.coffee()[72:328, 172:428]),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def demo_key() -> CipherKey:
    return CipherKey(DEMO_PARAMS, 123)


@pytest.fixture(scope="session")
def photos() -> dict[str, ColorImage]:
    return natural_photos()


_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if "acceptance" in report.keywords:
            _acceptance.append((report.head_line or report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
