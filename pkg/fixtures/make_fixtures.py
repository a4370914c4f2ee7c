"""Regenerate the CSV fixtures in this directory.

    python fixtures/make_fixtures.py

Sampled fixtures use the Philox generator with the seeds below, so the files
are reproducible bit-for-bit on any platform.
"""

from pathlib import Path

import numpy as np

from proxot.io import write_samples
from proxot.measures import DiscreteMeasure
from proxot.particle_flow import sample_gaussian

HERE = Path(__file__).resolve().parent

GRID = np.linspace(-6.0, 8.0, 400)
FLOW_SOURCE = dict(mean=-2.0, std=0.5, n=200, seed=1)
FLOW_TARGET = dict(mean=2.0, std=1.0, n=200, seed=2)


def density_weights(x, mean, std):
    w = np.exp(-0.5 * ((x - mean) / std) ** 2)
    return w / w.sum()


def main():
    write_samples(HERE / "single_source_p.csv", DiscreteMeasure([0.0]), weights=False)
    write_samples(HERE / "single_source_q.csv", DiscreteMeasure([0.0, 1.0]), weights=False)
    write_samples(HERE / "gaussian_grid_p.csv", DiscreteMeasure(GRID, density_weights(GRID, 0.0, 1.0)))
    write_samples(HERE / "gaussian_grid_q.csv", DiscreteMeasure(GRID, density_weights(GRID, 2.0, 1.0)))
    for name, spec in (("flow_source.csv", FLOW_SOURCE), ("flow_target.csv", FLOW_TARGET)):
        pts = sample_gaussian(spec["mean"], spec["std"], spec["n"], spec["seed"])
        write_samples(HERE / name, DiscreteMeasure(pts), weights=False)


if __name__ == "__main__":
    main()
