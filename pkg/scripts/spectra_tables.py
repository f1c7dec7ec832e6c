#!/usr/bin/env python3
"""Tabulate the joint spectrum F_K(alpha, gamma) and the one-parameter rotation spectra."""
from dataclasses import dataclass, field

import numpy as np

from _common import parse_config, write_rows
from qclab import spectra


@dataclass
class Config:
    Ks: list = field(default_factory=lambda: [1.5, 2.0, 4.0])
    n_alpha: int = 41
    gammas: list = field(default_factory=lambda: [0.0, 0.25, 0.5])


def main(argv=None):
    cfg, out = parse_config(Config, argv, __doc__)
    rows = []
    for K in cfg.Ks:
        for g in cfg.gammas:
            for a in np.linspace(1 / K, K, cfg.n_alpha):
                F = spectra.joint_spectrum(K, float(a), g)
                if np.isfinite(F):
                    rows.append({"table": "joint", "K": K, "alpha": float(a), "gamma": g, "value": F})
        gmax = spectra.sharp_bound("qc-gamma-max", K)
        for g in np.linspace(0, gmax, 9):
            rows.append({"table": "rotation-source", "K": K, "alpha": "", "gamma": float(g),
                         "value": spectra.rotation_spectrum(K, float(g), "source")})
    write_rows(rows, out)


if __name__ == "__main__":
    main()
