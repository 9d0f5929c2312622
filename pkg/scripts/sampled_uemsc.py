"""uEMSC of a net against logs played out from itself, for several log sizes
and seeds. Larger logs should converge towards 1."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from slpn import load_slpn
from slpn.conformance import uemsc
from slpn.oracle import sample_playout

DATA = Path(__file__).resolve().parent.parent / "data"


@dataclass
class Config:
    net: Path = DATA / "order.slpn"
    sizes: list[int] = field(default_factory=lambda: [100, 1000, 10000])
    seeds: int = 5
    max_len: int = 1000


def main(cfg: Config) -> None:
    lsp = load_slpn(cfg.net)
    print("size\tmean\tmin\tmax")
    for n in cfg.sizes:
        vals = []
        for seed in range(cfg.seeds):
            log, _ = sample_playout(lsp, n, seed, cfg.max_len)
            vals.append(uemsc(log, lsp))
        v = np.array(vals)
        print(f"{n}\t{v.mean():.4f}\t{v.min():.4f}\t{v.max():.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--net", type=Path, default=Config.net)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--max-len", type=int, default=1000)
    main(Config(**vars(ap.parse_args())))
