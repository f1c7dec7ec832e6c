"""Shared helpers for the experiment scripts: dataclass configs from argv, CSV out."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path


def parse_config(cls, argv=None, description=None):
    """Build a ``cls`` instance, each field overridable by ``--field value``."""
    ap = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        kind = type(default)
        if isinstance(default, (list, tuple)):
            elem = type(default[0]) if default else float
            ap.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=elem,
                            nargs="+", default=default)
        else:
            ap.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=kind, default=default)
    ap.add_argument("--out", type=Path, default=None, help="CSV file (default: stdout)")
    ns = vars(ap.parse_args(argv))
    out = ns.pop("out")
    return cls(**ns), out


def write_rows(rows: list[dict], out: Path | None) -> None:
    header = list(rows[0]) if rows else []
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.DictWriter(fh, header, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: format(v, ".10g") if isinstance(v, float) else v for k, v in r.items()})
    finally:
        if out:
            fh.close()
