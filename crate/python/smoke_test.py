"""Build the extension module with cargo, import it, and exercise each entry point.

Usage: python3 python/smoke_test.py [--no-build]
"""

import cmath
import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_import():
    if "--no-build" not in sys.argv:
        subprocess.run(
            ["cargo", "build", "--release", "-p", "zerosum-py", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
    lib = ROOT / "target" / "release" / "libpyzerosum.so"
    dest = Path(tempfile.mkdtemp()) / ("pyzerosum" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))
    import pyzerosum

    return pyzerosum


def main():
    z = build_and_import()
    print("pyzerosum", z.__version__)

    # Closed-form zeros of (z-1)^n + (z+1)^n.
    n = 100
    s = z.PolySum([[1] * n, [-1] * n])
    rep = z.find_roots(s)
    assert rep.residual_ok and len(rep.roots) == n
    got = sorted(r.imag for r in rep.roots)
    want = sorted(-1 / math.tan((2 * k + 1) * math.pi / (2 * n)) for k in range(n))
    assert max(abs(a - b) for a, b in zip(got, want)) < 1e-8
    assert max(abs(r.real) for r in rep.roots) < 1e-8
    assert z.certify(s, rep.roots)
    assert not z.certify(s, [r + 0.1 for r in rep.roots])

    assert abs(z.walsh_bound(z.PolySum([[1] * 4, [-1] * 4])) - 2 * math.sqrt(2)) < 1e-12
    small = z.PolySum([[1, 1], [-1, -1]])
    assert abs(small.newton_ratio(2) - 1.25) < 1e-14

    disk_a = z.RootMeasure.uniform_disk(1, 1.0)
    disk_b = z.RootMeasure.uniform_disk(-1, 1.0)
    assert abs(disk_a.potential(4) - math.log(3)) < 1e-15
    assert all(abs(w - 1) <= 1 for w in disk_a.sample(1000, seed=3))
    mix = z.RootMeasure.mixture([(disk_a, 0.5), (z.RootMeasure.uniform_circle(0, 2.0), 0.5)])
    assert mix.support_radius == 2.0

    # Weak integral against the Cauchy reference.
    phi = z.BumpFunction(0, 3.0)
    w = z.weak_integral([disk_a, disk_b], phi, h=0.01)
    c = z.cauchy_reference(phi)
    assert abs(w - c) < 1e-3, (w, c)
    assert abs(phi(0) - math.exp(-1)) < 1e-15
    assert z.lines_reference(z.BumpFunction(0.5 + 0.5j, 0.4)) > 0

    d = z.grid_density([disk_a, disk_b], (-4, 4, -10, 10), 0.05)
    assert len(d["values"]) == d["nx"] * d["ny"]
    assert abs(d["total_mass"] - 2 / math.pi * math.atan(10)) < 0.01
    atoms = z.grid_density([z.RootMeasure.uniform_atoms([1, -1]), z.RootMeasure.uniform_atoms([1j, -1j])], (-8, 8, -8, 8), 0.05)
    assert atoms["masked_cells"] == 0 and atoms["total_mass"] > 0.99

    parts, zeros, certified = z.simulate([disk_a, disk_b], 200, seed=11)
    assert certified and len(zeros) == 200 and len(parts) == 2
    assert z.linear_statistic([1j, -1j], z.BumpFunction(0, 2.0)) == z.BumpFunction(0, 2.0)(1j)
    ks, max_re = z.ks_distance_to_cauchy(zeros)
    assert ks < 0.15, ks

    point = z.RootMeasure.point_mass(0)
    assert z.ratio_event_probability(point, point, 20, (-1, 1, -1, 1), 100, 1) == (1.0, 0.0)
    p, se = z.ratio_event_probability(disk_a, disk_b, 100, (0j, 0.5), 500, 1)
    assert 0 <= p <= 1 and se >= 0
    assert abs(z.gap_set_measure(disk_a, disk_a, (-1, 1, -1, 1), 100, 0.01) - 4.0) < 1e-12
    m, _ = z.concentration_second_moment(z.RootMeasure.point_mass(5), (-1, 1, -1, 1), 50, 100, 2)
    assert m < 1e-25

    for bad in (lambda: z.RootMeasure.uniform_disk(0, -1.0), lambda: z.PolySum([[1], [1, 2]])):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    print("smoke test passed")


if __name__ == "__main__":
    main()
