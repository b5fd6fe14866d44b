"""Multistatic sensor geometry and the discretized square imaging scene."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SceneGrid:
    """Regular square grid of pixel centers, row-major, centered at the origin.

    Positions are stored embedded in 3-D with zero height (flat topography).
    """

    side_length: float
    points_per_side: int
    positions: np.ndarray = field(repr=False)

    @property
    def K(self) -> int:
        return self.points_per_side**2

    @property
    def pixel_spacing(self) -> float:
        return self.side_length / self.points_per_side

    @property
    def positions_2d(self) -> np.ndarray:
        return self.positions[:, :2]

    def nearest_index(self, point) -> int:
        """Index of the pixel whose center is closest to ``point`` (2-D or 3-D)."""
        p = np.asarray(point, dtype=float)[:2]
        half = self.side_length / 2
        col = int(np.clip(np.floor((p[0] + half) / self.pixel_spacing), 0, self.points_per_side - 1))
        row = int(np.clip(np.floor((p[1] + half) / self.pixel_spacing), 0, self.points_per_side - 1))
        return row * self.points_per_side + col

    def as_image(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values).reshape(self.points_per_side, self.points_per_side)


def build_scene_grid(side_length: float, points_per_side: int) -> SceneGrid:
    if side_length <= 0:
        raise ValueError(f"side_length must be positive, got {side_length}")
    if points_per_side < 1:
        raise ValueError(f"points_per_side must be >= 1, got {points_per_side}")
    spacing = side_length / points_per_side
    centers = -side_length / 2 + spacing * (np.arange(points_per_side) + 0.5)
    # row index walks x2, column index walks x1
    x2, x1 = np.meshgrid(centers, centers, indexing="ij")
    positions = np.stack([x1.ravel(), x2.ravel(), np.zeros(x1.size)], axis=1)
    return SceneGrid(float(side_length), int(points_per_side), positions)


def _unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Geometry:
    """Receiver and transmitter placement.

    Look directions point from the scene center (origin) toward each antenna,
    which is the convention of the far-field phase linearization.
    """

    receiver_positions: np.ndarray = field(repr=False)
    transmitter_position: np.ndarray
    aperture: float | None = None
    elevation: float | None = None
    receiver_range: float | None = None

    @property
    def N(self) -> int:
        return self.receiver_positions.shape[0]

    @property
    def receiver_look(self) -> np.ndarray:
        return _unit(self.receiver_positions)

    @property
    def transmitter_look(self) -> np.ndarray:
        return _unit(self.transmitter_position)

    @property
    def azimuths(self) -> np.ndarray:
        look = self.receiver_look
        return np.mod(np.arctan2(look[:, 1], look[:, 0]), 2 * np.pi)

    @property
    def is_arc(self) -> bool:
        return self.aperture is not None


def build_arc_geometry(
    N: int,
    aperture: float = 2 * np.pi,
    receiver_range: float = 10_000.0,
    height: float = 250.0,
    tx_position=(15_800.0, 0.0, 250.0),
) -> Geometry:
    """Place ``N`` receivers on a circular arc at azimuths ``aperture * i / N``.

    ``receiver_range`` is the ground range from the scene center; the
    elevation angle follows from ``height`` and that range.
    """
    if N < 2:
        raise ValueError(f"need at least two receivers to form a pair, got N={N}")
    if not (0 < aperture <= 2 * np.pi):
        raise ValueError(f"aperture must lie in (0, 2*pi], got {aperture}")
    if receiver_range <= 0:
        raise ValueError(f"receiver_range must be positive, got {receiver_range}")
    theta = aperture * np.arange(N) / N
    rx = np.stack(
        [receiver_range * np.cos(theta), receiver_range * np.sin(theta), np.full(N, float(height))],
        axis=1,
    )
    return Geometry(
        receiver_positions=rx,
        transmitter_position=np.asarray(tx_position, dtype=float),
        aperture=float(aperture),
        elevation=float(np.arctan2(height, receiver_range)),
        receiver_range=float(receiver_range),
    )


def build_geometry(receiver_positions, tx_position) -> Geometry:
    """Arbitrary (non-arc) placement, mostly for tests."""
    rx = np.atleast_2d(np.asarray(receiver_positions, dtype=float))
    if rx.shape[0] < 2:
        raise ValueError("need at least two receivers")
    return Geometry(receiver_positions=rx, transmitter_position=np.asarray(tx_position, dtype=float))
