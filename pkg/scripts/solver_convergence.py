#!/usr/bin/env python3
"""Grid refinement study of the Beltrami solver on the two closed-form coefficients."""
import time
from dataclasses import dataclass, field

import numpy as np

from _common import parse_config, write_rows
from qclab import beltrami


@dataclass
class Config:
    grids: list = field(default_factory=lambda: [128, 256, 512, 1024])
    tau: float = 2.0
    k: float = 1 / 3
    tol: float = 1e-10
    mode: str = "free"


def main(argv=None):
    cfg, out = parse_config(Config, argv, __doc__)
    rows = []
    for n in cfg.grids:
        g = beltrami.ComplexGrid.square(n)
        Z = g.coords()
        mask = np.abs(Z) > 2 * g.spacing
        for name, mu, exact in [
            ("radial", beltrami.mu_power(g, cfg.tau), beltrami.power_map_exact(g, cfg.tau)),
            ("constant", beltrami.mu_constant(g, cfg.k), beltrami.constant_map_exact(Z, cfg.k)),
        ]:
            t0 = time.perf_counter()
            res = beltrami.solve_principal(mu, cfg.tol, cfg.mode)
            dt = time.perf_counter() - t0
            err = np.linalg.norm((Z + res.f.data - exact)[mask]) / np.linalg.norm(exact[mask])
            rows.append({"mu": name, "n": n, "terms": res.series_terms, "residual": res.residual,
                         "rel_l2_error": float(err), "area_ratio": beltrami.area_ratio(res),
                         "seconds": dt})
    write_rows(rows, out)


if __name__ == "__main__":
    main()
