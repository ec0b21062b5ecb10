"""Leave-one-out cross-validation of the smoothing bandwidth.

Prints the CV criterion over its default grid for the nonparametric and the
projected-semiparametric geometries, with the fraction of evaluable
leave-one-out terms per candidate.

Run:
    python3 demos/03_bandwidth_selection.py
"""

import numpy as np

from adaweight import (
    EpanechnikovKernel,
    LossFunction,
    cv_bandwidth,
    epsilon_perturbation,
    first_step,
    generate_sample,
    replication_rng,
)


def show(label, result):
    print(f"--- {label} ---")
    print(f"{'h':>8} {'score':>10} {'valid':>7}")
    for h, s, v in zip(result.grid, result.scores, result.valid_fraction):
        marker = "  <- h_cv" if h == result.h_cv else ""
        print(f"{h:>8.3f} {s:>10.4f} {v:>7.1%}{marker}")
    print()


def main():
    rng = replication_rng(3, 0)
    data, _ = generate_sample(500, 4, "smooth", rng)
    fs = first_step(data, LossFunction.square())
    kernel = EpanechnikovKernel(4)

    show("nonparametric (raw covariates, q=4)", cv_bandwidth(data, fs, kernel, "np"))

    eps = epsilon_perturbation(data, fs)
    print(f"projector ridge epsilon = {eps:.4f}\n")
    show(
        "semiparametric (projected geometry)",
        cv_bandwidth(data, fs, kernel, "sp-proj", eps=eps),
    )

    print("the projected geometry concentrates spread along the index, so its")
    print("selected bandwidth is smaller than the raw q-dimensional one")


if __name__ == "__main__":
    main()
