"""Smoke test for the subrad Python extension.

Builds nothing itself: run `cargo build -p subrad-py` first. The script
locates the cdylib under target/, exposes it as the module `subrad` and
exercises every binding once.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    names = ["libsubrad.so", "subrad.so", "libsubrad.dylib"]
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("cdylib not found; run `cargo build -p subrad-py` first")
    tmp = Path(tempfile.mkdtemp(prefix="subrad-py-"))
    shutil.copy2(built, tmp / "subrad.so")
    sys.path.insert(0, str(tmp))
    import subrad

    return subrad


def main():
    subrad = load_module()

    assert subrad.f_rie(1.0, 0.0) == 1.0
    assert subrad.f_sas(1.0, 0.0) == 4.0
    assert abs(subrad.f_rie(1000.0, -1.0) - 1.0) < 1e-6

    j = subrad.bessel_zero(1.5)
    assert abs(j - 4.493409457909064) < 1e-9

    # vertical axis: d((0,0),(0,z)) = sqrt(4 pi |z|)
    d = subrad.cc_distance([0.0, 0.0], [0.25])
    assert abs(d - math.sqrt(math.pi)) < 1e-12
    assert subrad.cc_distance([3.0, 4.0], [0.0]) == 5.0

    model = subrad.Model(2, 0.0, 0.0)
    assert model.drift(2.0) == 2.0  # 4/r with n = 2
    assert model.singular_coefficient() == 4.0
    value, indicator = model.eigen(1.0, 1024)
    assert abs(value - 20.190728556426628) < 1e-3, (value, indicator)
    assert abs(model.mean_exit(1.0, 0.0) - 0.1) < 1e-4

    terminal, hits = model.simulate(0.0, 1.0, 1e-3, 1.0, 500, 7)
    exits = [h for h in hits if h is not None]
    assert len(terminal) == 500 and len(exits) > 450
    mean_exit = sum(exits) / len(exits)
    assert 0.07 < mean_exit < 0.13, mean_exit

    radii, group_hits = subrad.simulate_group_radii(1e-3, 0.25, 400, 11)
    assert len(radii) == 400 and all(h is None for h in group_hits)
    mean_sq = sum(r * r for r in radii) / len(radii)
    assert 4 * 0.25 < mean_sq < 10 * 0.25, mean_sq

    vols = subrad.cc_ball_volume([0.5, 1.0], 50_000, 3)
    slope = math.log(vols[1] / vols[0]) / math.log(2.0)
    assert abs(slope - 4.0) < 0.3, slope

    assert abs(subrad.dkw_margin(100_000, 1e-3) - 6.164779987778186e-3) < 1e-15

    print("smoke test passed")


if __name__ == "__main__":
    main()
