"""Scan random infinitesimals and record how far each jet extends.

    python3 scripts/obstruction_scan.py --fixtures sl2 abelian-3 gl2 --samples 20 --order 3

For each sample a random 2-cocycle m_1 is drawn and extension is attempted up
to the requested order. Output is one JSON line per fixture.
"""

from __future__ import annotations

import argparse
import json
import random
from collections import Counter
from dataclasses import asdict, dataclass, field

from homdef.complex import deformation_complex
from homdef.deform import DeformationJet, check_jet, extend
from homdef.io import fixture_path, load
from homdef.linalg import Q, nullspace_basis


@dataclass
class ScanConfig:
    fixtures: list[str] = field(default_factory=lambda: ["sl2", "heisenberg", "abelian-3", "gl2"])
    samples: int = 20
    order: int = 3
    coeff_range: int = 2
    seed: int = 0


def random_cocycle(cx, rng, r):
    Z = nullspace_basis(cx.delta_matrix(2), cx.dim(2))
    cs = [rng.randint(-r, r) for _ in Z.vectors]
    return cx.cochain(2, [sum((c * v[i] for c, v in zip(cs, Z.vectors)), Q(0)) for i in range(cx.dim(2))])


def scan(cfg: ScanConfig):
    rng = random.Random(cfg.seed)
    for name in cfg.fixtures:
        (s,) = load(fixture_path(name)).structures.values()
        cx = deformation_complex(s)
        reached = Counter()
        for _ in range(cfg.samples):
            jet = DeformationJet(s, (random_cocycle(cx, rng, cfg.coeff_range),))
            while jet.order < cfg.order:
                res = extend(jet, cx)
                if not res.extended:
                    break
                jet = res.jet
            assert check_jet(jet).ok
            reached[jet.order] += 1
        yield {
            "fixture": name,
            "h2": cx.cohomology(2).betti,
            "h3": cx.cohomology(3).betti,
            "reached_order": {str(k): v for k, v in sorted(reached.items())},
        }


def main() -> None:
    d = ScanConfig()
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--fixtures", nargs="+", default=d.fixtures)
    ap.add_argument("--samples", type=int, default=d.samples)
    ap.add_argument("--order", type=int, default=d.order)
    ap.add_argument("--coeff-range", type=int, default=d.coeff_range)
    ap.add_argument("--seed", type=int, default=d.seed)
    cfg = ScanConfig(**vars(ap.parse_args()))
    print(json.dumps({"config": asdict(cfg)}))
    for row in scan(cfg):
        print(json.dumps(row, sort_keys=True))


if __name__ == "__main__":
    main()
