#!/usr/bin/env python3
"""Interpolation-lemma integrals for sampled exponents, inside and beyond the ellipse."""
from dataclasses import dataclass

from _common import parse_config, write_rows
from qclab.burkholder import PowerFlowFamily, sample_lemma_betas, verify_interpolation


@dataclass
class Config:
    p: float = 3.0
    k: float = 1 / 3
    p0: float = 2.0
    lam: float = 0.5
    n_inside: int = 50
    n_beyond: int = 10
    seed: int = 0


def main(argv=None):
    cfg, out = parse_config(Config, argv, __doc__)
    fams = {"radial": PowerFlowFamily.extremal(cfg.p, cfg.k), "spiral": PowerFlowFamily.spiral(cfg.k)}
    rows = []
    for name, fam in fams.items():
        for where, n in (("inside", cfg.n_inside), ("beyond-axis", cfg.n_beyond)):
            betas = sample_lemma_betas(cfg.p0, cfg.lam, n, where, cfg.seed)
            for rec in verify_interpolation(fam, cfg.p0, cfg.lam, betas):
                rows.append({"family": name, "sample": where, "beta_re": rec.beta.real,
                             "beta_im": rec.beta.imag, "integral": rec.integral,
                             "passed": rec.passed})
    write_rows(rows, out)


if __name__ == "__main__":
    main()
