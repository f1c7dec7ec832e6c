#!/usr/bin/env python3
"""Empirical (1/pi) int_D exp(b |arg f_z|) for the K = 2 spiral map under grid refinement.

Below the threshold 4K/(K^2 - 1) = 8/3 the values settle; above it they keep growing.
"""
from dataclasses import dataclass, field

import numpy as np

from _common import parse_config, write_rows
from qclab import beltrami


@dataclass
class Config:
    tau_re: float = 1.25
    tau_im: float = 0.75
    grids: list = field(default_factory=lambda: [128, 256, 512, 1024])
    factors: list = field(default_factory=lambda: [0.5, 0.9, 1.1, 1.2])
    nlam: int = 8


def main(argv=None):
    cfg, out = parse_config(Config, argv, __doc__)
    tau = complex(cfg.tau_re, cfg.tau_im)
    eta = (tau - 1) / (tau + 1)
    K = (1 + abs(eta)) / (1 - abs(eta))
    thr = 4 * K / (K * K - 1)
    rows = []
    for n in cfg.grids:
        g = beltrami.ComplexGrid.square(n)
        mu = beltrami.mu_power(g, tau)
        res = beltrami.continued_log_fz(mu, np.linspace(0, abs(eta), cfg.nlam + 1)[1:])
        for fac in cfg.factors:
            rows.append({"n": n, "b_over_threshold": fac, "b": fac * thr,
                         "integral": beltrami.exp_arg_integral(res, fac * thr)})
    write_rows(rows, out)


if __name__ == "__main__":
    main()
