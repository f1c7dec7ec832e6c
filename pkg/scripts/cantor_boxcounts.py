#!/usr/bin/env python3
"""Box-count log-ratios of the nested-annuli Cantor set against the limit 2(1 - t)."""
from dataclasses import dataclass, field

from _common import parse_config, write_rows
from qclab.cantor import MAX_NODES, CantorMap, level_box_counts, solve_cone_parameter


@dataclass
class Config:
    K: float = 2.0
    alpha: float = 1.0
    gamma: float = 0.5
    radii: list = field(default_factory=lambda: [1e-2, 1e-3, 1e-4, 1e-6, 1e-8])
    depth: int = 2


def main(argv=None):
    cfg, out = parse_config(Config, argv, __doc__)
    limit = 2 * (1 - solve_cone_parameter(cfg.K, cfg.alpha, cfg.gamma).t)
    rows = []
    for r in cfg.radii:
        m = CantorMap(cfg.K, cfg.alpha, cfg.gamma, r, cfg.depth)
        levels = [j for j in range(1, cfg.depth + 1) if m.node_count(j) <= MAX_NODES]
        for lc in level_box_counts(m, levels):
            rows.append({"r": r, "N": m.N, "level": lc.level, "count": lc.count,
                         "log_ratio": lc.log_ratio, "limit": limit})
    write_rows(rows, out)


if __name__ == "__main__":
    main()
