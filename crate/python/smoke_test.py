#!/usr/bin/env python3
"""Smoke test for the admissible_py extension module.

Builds nothing itself: expects `cargo build -p admissible-python` (or
--release) to have produced libadmissible_py.so, which is copied next to
this script as admissible_py.so and imported.
"""

import pathlib
import shutil
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def locate_cdylib():
    candidates = [
        ROOT / "target" / "release" / "libadmissible_py.so",
        ROOT / "target" / "debug" / "libadmissible_py.so",
        ROOT / "target" / "release" / "libadmissible_py.dylib",
        ROOT / "target" / "debug" / "libadmissible_py.dylib",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("build the extension first: cargo build -p admissible-python")


def main():
    lib = locate_cdylib()
    suffix = ".so" if lib.suffix == ".so" else ".so"  # CPython loads .so on mac too
    target = HERE / f"admissible_py{suffix}"
    shutil.copyfile(lib, target)
    sys.path.insert(0, str(HERE))
    import admissible_py as ap

    checks = 0

    def check(name, got, want):
        nonlocal checks
        assert got == want, f"{name}: got {got!r}, want {want!r}"
        checks += 1
        print(f"ok {name}: {got!r}")

    # ball cardinalities of the free group
    check("free_ball_count(2, 1)", ap.free_ball_count(2, 1), 5)
    check("free_ball_count(2, 2)", ap.free_ball_count(2, 2), 17)

    # sublattice indices
    check("sublattice_index unit", ap.sublattice_index([(1, 0), (0, 1)]), 1)
    check("sublattice_index det", ap.sublattice_index([(2, 0), (0, 3)]), 6)
    check("sublattice_index rank1", ap.sublattice_index([(2, 4)]), None)

    # cyclic subgroup membership
    check("cyclic_power power", ap.cyclic_power("x x x x", "x x"), 2)
    check("cyclic_power miss", ap.cyclic_power("y", "x"), None)

    # horoball shortcut distance over the 9-vertex path
    check(
        "horoball_path_distance",
        ap.horoball_path_distance(9, 5, 0, 0, 8, 0),
        6,
    )

    # deltas: trees are 0-hyperbolic, the 4-cycle is 1-hyperbolic
    path_edges = [(i, i + 1) for i in range(7)]
    check("graph_delta path", ap.graph_delta(8, path_edges), 0.0)
    check("graph_delta C4", ap.graph_delta(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), 1.0)

    # cusped space of (F2, <x>)
    d = ap.cusp_delta("free2", 4, 3, peripheral="x")
    check("cusp_delta (4,3)", d["delta"], 1.0)
    d = ap.cusp_delta("abelian2", 4, 0)
    check("grid delta (r=4)", d["delta"], 2.0)

    # projection bound in the quotient tree
    p = ap.proj_bound(2, "x", 4)
    check("proj_bound max_diameter", p["max_diameter"], 0)

    # the shipped torus complex end to end
    wb = ap.Workbench.from_path(str(ROOT / "configs" / "torus-complex-3.cfg"))
    check("validate", wb.validate(), [])
    rep = wb.check_admissible(4)
    check("admissible", rep["passed"], True)
    check("kernel index", rep["kernel_indices"], [("e1", 1)])

    ball = wb.build_ball(3)
    check("ball vertices", ball.vertex_count(), 150)
    d0, certified = ball.distance(0, 1)
    check("ball distance", (d0, certified), (1, True))

    prof = wb.distortion("e1", 5, seed=7)
    check("distortion k", prof["k"], 1.0)
    dp = wb.dist_projs("e1", 6)
    check("dist_projs violations", dp["violations"], 0)

    # the word problem through the HNN loop config
    hnn = ap.Workbench.from_path(str(ROOT / "configs" / "hnn-loop.cfg"))
    check("nf pinch", hnn.reduce_word("t1 v0[x] t1^-1"), "v0[z]")
    check("identity word", hnn.is_identity("v0[x y] v0[y^-1 x^-1]"), True)
    check("stable letter nontrivial", hnn.is_identity("t1"), False)

    print(f"\nsmoke test passed: {checks} checks")


if __name__ == "__main__":
    main()
