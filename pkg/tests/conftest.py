import numpy as np
import pytest
from hypothesis import settings

from gwfradar.forward import SpectralGrid, build_measurement_vectors
from gwfradar.geometry import build_arc_geometry, build_scene_grid
from gwfradar.lifted import LiftedOperator

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


def make_setup(K=9, N=4, M=8, fc=10e9, bw=50e6, spacing=2.4, aperture=2 * np.pi,
               amplitude_mode="compensated", phase_mode="exact"):
    n = int(round(np.sqrt(K)))
    grid = build_scene_grid(spacing * n, n)
    geom = build_arc_geometry(N, aperture)
    spectral = SpectralGrid.from_hz(fc, bw, M)
    vectors = build_measurement_vectors(grid, geom, spectral, amplitude_mode, phase_mode)
    return grid, geom, spectral, LiftedOperator(vectors)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small():
    return make_setup()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 11):
        if n not in mod.RESULTS:
            terminalreporter.write_line(f"criterion {n:2d}: NOT RUN")
            continue
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
