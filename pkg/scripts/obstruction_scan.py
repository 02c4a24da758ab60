"""Central-unit search across the built-in groups for a range of radii."""

import argparse
import time

from cywork.groups import FreeAbelian, KleinBottle, ProductWithZ, SurfaceGroup, central_unit_search

GROUPS = {
    "Z3": FreeAbelian(3),
    "klein": KleinBottle(),
    "klein_x_Z": ProductWithZ(KleinBottle()),
    "genus2": SurfaceGroup(2),
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-radius", type=int, default=5)
    p.add_argument("--groups", nargs="*", default=list(GROUPS))
    args = p.parse_args(argv)
    print(f"{'group':>10} {'R':>2} {'examined':>9} {'nontrivial':>10}  verdict")
    for name in args.groups:
        G = GROUPS[name]
        for R in range(1, args.max_radius + 1):
            t = time.perf_counter()
            rep = central_unit_search(G, R)
            dt = time.perf_counter() - t
            print(f"{name:>10} {R:>2} {rep.examined:>9} {len(rep.nontrivial):>10}  {rep.verdict}  ({dt:.1f}s)")


if __name__ == "__main__":
    main()
