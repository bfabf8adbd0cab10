"""Random joint networks with known region witnesses."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .boxes import Rectangle, ra_index, ra_relation_of
from .interaction import JointNetwork
from .netfile import serialize_network
from .topology import RCC8, RectUnionRegion, rcc8_of_regions

__all__ = ["GeneratedInstance", "gen_instance", "random_region"]

GRID = 12


@dataclass
class GeneratedInstance:
    text: str
    network: JointNetwork
    regions: list[RectUnionRegion]


def _random_rect(rng: random.Random) -> Rectangle:
    x0 = rng.randrange(GRID - 1)
    y0 = rng.randrange(GRID - 1)
    x1 = rng.randrange(x0 + 1, min(GRID, x0 + 6) + 1)
    y1 = rng.randrange(y0 + 1, min(GRID, y0 + 6) + 1)
    return Rectangle.of(x0, x1, y0, y1)


def random_region(rng: random.Random) -> RectUnionRegion:
    """Union of one to three integer rectangles."""
    return RectUnionRegion(_random_rect(rng) for _ in range(rng.randint(1, 3)))


def _region_text(region: RectUnionRegion) -> str:
    return " + ".join(f"[{p.x0},{p.x1}]x[{p.y0},{p.y1}]" for p in region.pieces)


def gen_instance(seed: int, n: int) -> GeneratedInstance:
    """Basic joint network read off ``n`` random regions; same seed, same output."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    regions: list[RectUnionRegion] = []
    while len(regions) < n:
        candidate = random_region(rng)
        # resample to avoid accidental equal regions
        if all(rcc8_of_regions(candidate, r) != "EQ" for r in regions):
            regions.append(candidate)
    names = [f"v{k + 1}" for k in range(n)]
    net = JointNetwork.empty(names)
    mbrs = [r.mbr() for r in regions]
    for i in range(n):
        for j in range(i + 1, n):
            net.top.set(i, j, 1 << RCC8.index[rcc8_of_regions(regions[i], regions[j])])
            x, _, y = ra_relation_of(mbrs[i], mbrs[j]).partition("*")
            net.dir.set(i, j, 1 << ra_index(x, y))
    comments = [f"generated seed={seed} vars={n}"]
    comments += [f"witness {name}: {_region_text(r)}" for name, r in zip(names, regions)]
    return GeneratedInstance(serialize_network(net, comments), net, regions)

