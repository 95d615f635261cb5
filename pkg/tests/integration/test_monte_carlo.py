import json

import numpy as np
import pytest

from rising_gue.experiments import ExperimentConfig, run
from rising_gue.kernels import BulkScaling, FixedStartKernel
from rising_gue.sampling import sample_rising_from_config
from rising_gue.statistics import estimate_correlation, predict_one_point

pytestmark = pytest.mark.slow


def test_one_point_histogram_matches_the_kernel(two_point_cfg, fast_quad):
    batch = sample_rising_from_config(two_point_cfg, 1, 100_000, seed=2024, workers=4)
    identity = BulkScaling(0.0, 1)

    grid = estimate_correlation(batch, 3, 1, identity, bins=32, window=(-4.0, 4.0))
    grid = predict_one_point(grid, FixedStartKernel(two_point_cfg, fast_quad))

    assert np.mean(grid.within(3.0)) >= 0.95
    assert np.sum(grid.estimates * grid.widths) == pytest.approx(3.0, abs=0.02)


@pytest.mark.parametrize("k", [1, 2])
def test_wigner_matches_gue_in_the_bulk(tmp_path, k):
    config = ExperimentConfig.from_dict(
        {
            "command": "compare-wigner",
            "n": 400,
            "replicas": 10_000,
            "distribution": {"variant": "rademacher_complex"},
            "k": k,
            "bins": 16,
            "seed": 9,
            "out": str(tmp_path),
        }
    )

    _, summary_path = run(config)

    summary = json.loads(summary_path.read_text())
    assert summary["bins"] == 16**k
    assert summary["passed"], summary
