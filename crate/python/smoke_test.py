#!/usr/bin/env python3
"""Smoke test for the layerfd_py extension module.

Builds the extension with cargo if needed, loads it, and exercises the main
entry points: problem construction, solving, error measurement, convergence
orders, mesh construction and the error function.

Usage: python3 python/smoke_test.py [--profile release|debug]
"""
import argparse
import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_module(profile: str):
    build_dir = ROOT / "python" / "_build"
    build_dir.mkdir(exist_ok=True)
    target = ROOT / "target" / profile / "liblayerfd_py.so"
    if not target.exists():
        cmd = ["cargo", "build", "-p", "layerfd-py"]
        if profile == "release":
            cmd.append("--release")
        subprocess.run(cmd, cwd=ROOT, check=True)
    shutil.copy2(target, build_dir / "layerfd_py.so")
    sys.path.insert(0, str(build_dir))
    import layerfd_py

    return layerfd_py


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--profile", choices=["release", "debug"], default="debug")
    args = ap.parse_args()
    lf = load_module(args.profile)

    # error function
    assert lf.erf(0.0) == 0.0
    assert abs(lf.erf(1.0) - 0.8427007929497149) < 1e-15
    assert lf.erf(10.0) == 1.0
    assert lf.erf(-2.5) == -lf.erf(2.5)

    # built-in problems
    p = lf.example1()
    assert p.has_exact and p.alpha == 2.0 and p.beta == 4.0
    assert p.validate() == []
    assert p.exact(0.0, 1e-8) == 1.0 and p.exact(1.0, 1e-8) == 1.0

    # mesh
    nodes = lf.mesh_nodes(16, 1e-4, 0.8, (0.0, 1.0))
    assert len(nodes) == 17
    assert nodes[0] == 0.0 and nodes[-1] == 1.0
    assert all(a < b for a, b in zip(nodes, nodes[1:]))

    # solve + error
    sol = lf.solve(p, 1e-8, 64)
    assert sol.values[0] == 1.0 and sol.values[-1] == 1.0
    assert sol.scheme == "hybrid" and 0.0 < sol.tau <= 0.25
    err = lf.max_error(p, sol)
    assert abs(err / 4.3120e-3 - 1.0) < 1e-3, err

    # hybrid beats upwind in the layer regime
    up = lf.solve(p, 1e-8, 64, scheme="upwind")
    assert lf.max_error(p, up) > err

    # convergence orders climb past 1.4 in the small-epsilon regime
    entries, uniform = lf.convergence_table(p, "hybrid", [1e-8], [64, 128, 256])
    orders = [e[3] for e in entries if e[3] is not None]
    assert len(orders) == 2 and all(o > 1.4 for o in orders), orders
    assert uniform[64] == entries[0][2]

    # user-defined polynomial problem mirrors the built-in coefficients
    q = lf.Problem(a=[2.0, -4.0], b=[4.0], f=[0.0], domain=(0.0, 1.0),
                   bc=(1.0, 1.0), alpha=2.0, beta=4.0, name="poly")
    assert q.validate() == []
    qs = lf.solve(q, 1e-8, 64)
    diff = max(abs(a - b) for a, b in zip(qs.values, sol.values))
    assert diff < 1e-12, diff

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
