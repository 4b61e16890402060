"""Smoke test for the pytrpnet extension module.

Build the module first, e.g. `maturin develop -m crates/py/Cargo.toml`, or
copy `target/release/libpytrpnet.so` to `pytrpnet.so` next to this script.
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytrpnet as t


def check(cond, msg):
    if not cond:
        raise SystemExit(f"FAIL: {msg}")
    print(f"ok   {msg}")


def main():
    cell = t.UnitCell.bundled()
    check(len(cell) == 8, "bundled cell has 8 dipoles")
    check(t.UnitCell.parse(cell.to_text()).positions() == cell.positions(), "unit cell text round trip")

    mt = t.Lattice("mt", spirals=1)
    check(len(mt) == 104, "one spiral has 104 dipoles")
    check(len(t.Lattice("centriole", 1)) == 2808, "centriole layer has 2808 dipoles")

    single = t.diagonalize(mt.prefix(1))
    check(abs(single.widths[0] - t.GAMMA) < 1e-15, "isolated dipole decays at gamma")
    check(abs(single.thermal_qy() - 0.1298) < 1e-3, "single-emitter quantum yield")

    s = t.diagonalize(mt)
    m = s.metrics()
    check(m["max_ratio"] > 10, f"superradiant state, max Gamma/gamma = {m['max_ratio']:.2f}")
    check(abs(sum(s.widths) / (len(s) * t.GAMMA) - 1) < 1e-8, "width sum rule")

    omega, upsilon = t.coupling((0, 0, 0), (0, 0, 1), (10, 0, 0), (0, 0, 1))
    check(omega > 0 and 0 < upsilon < t.GAMMA, "pair couplings")

    stats = t.disorder_sweep(mt, [0.0, 200.0], realizations=2, seed=1)
    check(stats[0]["std_qy"] == 0.0 and stats[1]["mean_qy"] > 0.12, "disorder sweep")

    value, valid = t.fit_curve("cent1jff", math.inf)
    check(value == 4200.0 and valid, "centriole saturation value")
    check(t.reference_qy(1, 1, 0.1, 0.1, 1.33, 1.33, 0.14) == 0.14, "reference quantum yield identity")

    grid = [t.E0 + x for x in range(-200, 201, 5)]
    check(max(s.absorption(grid, 20.0)) == 1.0, "absorption is peak normalized")

    try:
        t.Lattice("mt", spirals=0)
    except ValueError:
        check(True, "zero spirals rejected")
    else:
        raise SystemExit("FAIL: zero spirals accepted")
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
