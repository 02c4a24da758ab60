"""Write the JSON inputs used in the README and the CLI tests into inputs/."""

import json
from pathlib import Path

from cywork.manifolds import builtin
from cywork.quiver import Potential, Quiver
from cywork.tiling import genus2_modified_qp, genus2_tiling, tiling_to_qp

OUT = Path(__file__).resolve().parent.parent / "inputs"


def dump(name, data):
    (OUT / name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    t3 = Quiver.one_vertex("xyz")
    dump("torus3_quiver.json", t3.to_json())
    dump("torus3_potential.json", Potential.parse("xyz - xzy").to_json())
    dump("loop_quiver.json", Quiver.one_vertex("x").to_json())
    dump("loop_potential.json", {"terms": []})
    g2 = tiling_to_qp(genus2_tiling())
    dump("genus2_quiver.json", g2.quiver.to_json())
    dump("genus2_potential.json", g2.potential.to_json())
    dump("genus2_qp.json", {"quiver": g2.quiver.to_json(), "potential": g2.potential.to_json()})
    mod = genus2_modified_qp()
    dump("genus2_modified_qp.json", {"quiver": mod.quiver.to_json(), "potential": mod.potential.to_json()})
    dump("genus2_tiling.json", genus2_tiling().to_json())
    raw = builtin("torus")
    dump("torus_simplicial.json", raw.S.to_json())
    dump("torus_group.json", raw.group.spec())
    dump("torus_edges.json", {e: raw.group.label(g) for e, g in raw.edge_map.items()})
    dump("empty.json", {})


if __name__ == "__main__":
    main()
