import numpy as np
import pytest

from wvlab.packets import PacketRecipe


@pytest.fixture
def p1() -> PacketRecipe:
    """Narrow-spread, far-separated parameter point used throughout."""
    return PacketRecipe(k0=5.0, k1=1.0, dk_f=0.1, dk_g=0.1, x0=100.0)


@pytest.fixture
def p2() -> PacketRecipe:
    """Wide-spread point where the moving pair overlaps appreciably."""
    return PacketRecipe(k0=5.0, k1=1.0, dk_f=0.5, dk_g=0.5, x0=100.0)


def random_recipes(count: int, seed: int = 20240901, separated: bool = True):
    """Random parameter points;``separated`` keeps the packet groups far
    apart relative to their widths (and inside the default grid)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        dk = float(rng.uniform(0.08, 0.35))
        if separated:
            x0 = float(rng.uniform(10.0, 14.0)) / dk
        else:
            x0 = float(rng.uniform(20.0, 120.0))
        out.append(
            PacketRecipe(
                k0=float(rng.uniform(2.0, 7.0)) * (1.0 if rng.random() < 0.5 else -1.0),
                k1=float(rng.uniform(0.3, 1.8)),
                dk_f=dk,
                dk_g=float(rng.uniform(0.08, 0.35)) if not separated else dk,
                x0=x0,
            )
        )
    return out
