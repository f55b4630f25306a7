"""Smooth Fourier-series coverage trajectories around 2.5D buildings."""

from ringtraj.geometry import HeightMap, VoxelGrid, load_heightmap, voxelize
from ringtraj.slicing import SensorConfig, SlicePlan, plan_slices
from ringtraj.spectral import FourierTrajectory, dft, idft, truncate
from ringtraj.planner import PlannerConfig, plan_inspection

__all__ = [
    "FourierTrajectory",
    "HeightMap",
    "PlannerConfig",
    "SensorConfig",
    "SlicePlan",
    "VoxelGrid",
    "dft",
    "idft",
    "load_heightmap",
    "plan_inspection",
    "plan_slices",
    "truncate",
    "voxelize",
]

__version__ = "0.1.0"
