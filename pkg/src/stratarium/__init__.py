"""Generalized stratified sampling in hypercubes, with latinization and quality metrics."""
from .geometry import Hyperbox, PointSet, Stratification, Stratum, furthest_corner_distance, longest_side, volume
from .latinize import LatinizationInfeasible, PssGrouping, algss, lgss, lh_violations, pss_compose
from .metrics import (covering_radius_general_lower, covering_radius_mc_lower, covering_radius_upper,
                      covering_radius_upper_retro, discrepancy_t, expected_discrepancy_sq, separation_distance)
from .rng import make_rng
from .sample import (INFINITY, KorobovSpec, sample_halton, sample_korobov, sample_lhs, sample_srs,
                     sample_stratified, select_korobov)
from .stratify import GssOptions, aspect_ratio, grid_partition, gss_partition, mean_split_partition

__version__ = "0.1.0"
