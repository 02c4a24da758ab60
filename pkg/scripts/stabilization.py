"""Track per-class Hochschild betti numbers as the word-length cutoff grows.

Exact classes settle immediately; truncated ones (every nontrivial class of the
genus-2 surface group, the b-classes of the Klein bottle) are printed so the
plateau can be eyeballed.
"""

import argparse
import json

from cywork.linalg import Field
from cywork.loops import build_model, class_representatives, hochschild_component
from cywork.manifolds import builtin


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--model", default="genus2")
    p.add_argument("--field", default="q")
    p.add_argument("--class-radius", type=int, default=1)
    p.add_argument("--max-radius", type=int, default=5)
    args = p.parse_args(argv)

    m = build_model(builtin(args.model), Field.parse(args.field))
    G = m.group
    rows = []
    for c in class_representatives(G, args.class_radius):
        series = []
        for R in range(max(1, G.length(c)), args.max_radius + 1):
            comp = hochschild_component(m, c, R)
            series.append({"radius": R, "betti": list(comp.betti), "flag": comp.flag})
            if comp.flag == "EXACT":
                break
        rows.append({"class": G.label(c), "series": series})
        print(f"{G.label(c):>12}  " + "  ".join(f"R={s['radius']}:{s['betti']}" for s in series))
    print(json.dumps({"model": args.model, "classes": rows}, sort_keys=True))


if __name__ == "__main__":
    main()
