"""Regenerate the example files under data/ from the test fixtures."""
import sys
from pathlib import Path

root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(root / "tests"))

import scenarios as sc  # noqa: E402
from possible_worlds import CausalStructure, io  # noqa: E402
from possible_worlds.possibilistic import Certificate  # noqa: E402

out = root / "data"
out.mkdir(exist_ok=True)


def put(name, doc):
    (out / name).write_text(io.dumps(doc), encoding="utf-8")


structures = {
    "w_structure": sc.w_structure(),
    "instrumental": sc.instrumental(),
    "bell": sc.bell(),
    "triangle": sc.triangle(),
    "evans": sc.evans(),
    "chain": sc.chain_with_shared_noise(),
    "pair": sc.common_cause_pair(),
    "mixed_parents": sc.mixed_parents(),
    "latent_with_parents": CausalStructure.build(
        sc.binary("v1", "v2", "v3", "v4", "v5"), ["l"],
        [("v1", "l"), ("v2", "l"), ("v3", "l"), ("l", "v4"), ("l", "v5"), ("v1", "v4")]),
}
for name, g in structures.items():
    put(f"{name}.json", io.structure_to_json(g))
# a cycle cannot be built as a structure, so this one is written by hand
(out / "cyclic.json").write_text(
    '{\n  "visible": [{"name": "a", "cardinality": 2}, {"name": "b", "cardinality": 2}],\n'
    '  "latent": [],\n  "edges": [["a", "b"], ["b", "a"]]\n}\n', encoding="utf-8")

put("w_support.json", io.support_to_json(sc.W_SUPPORT))
put("instrumental_support.json", io.support_to_json(sc.INSTRUMENTAL_SUPPORT))
put("pr_box.json", io.distribution_to_json(sc.pr_box()))
put("triangle_support.json", io.support_to_json(sc.TRIANGLE_SUPPORT))
put("evans_support.json", io.support_to_json(sc.EVANS_SUPPORT))
put("pair_distribution.json", io.distribution_to_json(sc.pair_distribution()))
put("chain_certificate.json", io.certificate_to_json(
    Certificate(sc.chain_with_shared_noise(), {"mu": 2, "nu": 2}, sc.chain_tables())))
