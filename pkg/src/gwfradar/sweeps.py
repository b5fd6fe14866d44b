"""Named parameter sweeps for the active and passive regimes.

Each entry fixes the preset, the receiver count used while another axis varies,
and the swept values (Hz for frequencies, dB for SNR).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harness import ExperimentConfig, SweepResult, load_config, run_sweep


@dataclass(frozen=True)
class SweepSpec:
    name: str
    preset: str
    axis: str
    values: tuple
    receivers: int | None = None  # None keeps the preset value

    def config(self) -> ExperimentConfig:
        cfg = load_config(self.preset)
        return cfg if self.receivers is None else cfg.replace(receivers=self.receivers)

    def run(self, seeds, out=None, workers=1) -> SweepResult:
        return run_sweep(self.config(), self.axis, self.values, seeds, out=out, workers=workers)


_RECEIVERS = tuple(range(6, 31, 2))
_SNR = tuple(float(s) for s in range(-20, 31, 5))

SWEEPS = {
    s.name: s
    for s in (
        SweepSpec("active_receivers", "active", "receivers", _RECEIVERS),
        SweepSpec("passive_receivers", "passive", "receivers", _RECEIVERS),
        SweepSpec("active_bandwidth", "active", "bandwidth", tuple(np.arange(30e6, 70e6 + 1, 5e6)), receivers=18),
        SweepSpec("passive_bandwidth", "passive", "bandwidth", tuple(np.arange(6e6, 24e6 + 1, 2e6)), receivers=18),
        SweepSpec(
            "active_center_frequency", "active", "center_frequency",
            (0.5e9, 1e9, 2e9, 4e9, 6e9, 8e9, 10e9, 12.5e9, 15e9), receivers=32,
        ),
        SweepSpec(
            "passive_center_frequency", "passive", "center_frequency",
            (0.1e9, 0.25e9, 0.5e9, 0.75e9, 1e9, 1.5e9, 2e9, 2.5e9, 3e9), receivers=32,
        ),
        SweepSpec("active_snr", "active", "snr", _SNR, receivers=30),
        SweepSpec("passive_snr", "passive", "snr", _SNR, receivers=30),
    )
}
