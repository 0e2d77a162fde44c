"""Territorial clustering by renewable-energy potential and socioeconomic structure."""

import json as _json

from ._core import (
    ClusterModel,
    RegioError,
    StageError,
    annualize_degree_days,
    complete_linkage,
    compute_centroid,
    downscale_by_proxy,
    hopkins,
    kmeans_fit,
    msw_potential,
    project_2d,
    qualitative_level,
    standardize,
    validity_index,
    vote_k,
    write_fixture,
)
from ._core import run_pipeline as _run_pipeline

__all__ = [
    "ClusterModel",
    "RegioError",
    "StageError",
    "annualize_degree_days",
    "complete_linkage",
    "compute_centroid",
    "downscale_by_proxy",
    "hopkins",
    "kmeans_fit",
    "msw_potential",
    "project_2d",
    "qualitative_level",
    "run_pipeline",
    "standardize",
    "validity_index",
    "vote_k",
    "write_fixture",
]


def run_pipeline(data_dir, out_dir=None, **options):
    """Run the full pipeline on a dataset directory.

    Returns (report, assignment): the run report as a dict and a mapping
    territory_id -> cluster id. Output files are written when out_dir is set.
    """
    report, assignment = _run_pipeline(str(data_dir), None if out_dir is None else str(out_dir), **options)
    return _json.loads(report), assignment
