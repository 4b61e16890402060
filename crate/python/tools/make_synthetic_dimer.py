"""Write the synthetic tubulin-dimer structure used as the bundled fixture.

The real 1JFF coordinates are not redistributed here. This script places
eight ideal indole rings (chain A: alpha W21/W346/W388/W407, chain B: beta
W21/W103/W346/W407) inside an 8 nm x 5 nm dimer-sized box centred on the
origin, with the long axis along x. Ring orientations come from a seeded
generator so the file is reproducible.

    python3 python/tools/make_synthetic_dimer.py > crates/core/fixtures/tubulin_dimer_synthetic.pdb
"""

import numpy as np
from scipy.spatial.transform import Rotation

BOND = 1.40

# Indole ring in its own plane (z = 0). Shared edge CD2-CE2 along +x,
# pyrrole ring above it, benzene ring below.
_R5 = BOND / (2.0 * np.sin(np.pi / 5.0))
_H6 = BOND * np.sqrt(3.0) / 2.0
RING = {
    "CG": (-BOND * np.cos(2 * np.pi / 5), BOND * np.sin(2 * np.pi / 5)),
    "CD1": (BOND / 2.0, _R5 + _R5 * np.cos(np.pi / 5.0)),
    "CD2": (0.0, 0.0),
    "NE1": (BOND + BOND * np.cos(2 * np.pi / 5), BOND * np.sin(2 * np.pi / 5)),
    "CE2": (BOND, 0.0),
    "CE3": (-BOND / 2.0, -_H6),
    "CZ2": (1.5 * BOND, -_H6),
    "CZ3": (0.0, -2.0 * _H6),
    "CH2": (BOND, -2.0 * _H6),
}
ORDER = ["N", "CA", "C", "O", "CB", "CG", "CD1", "CD2", "NE1", "CE2", "CE3", "CZ2", "CZ3", "CH2"]

SITES = [
    ("A", 21, (20.0, 8.0, -12.0)),
    ("A", 346, (28.0, -10.0, 14.0)),
    ("A", 388, (12.0, 14.0, 18.0)),
    ("A", 407, (33.0, 4.0, -5.0)),
    ("B", 21, (-20.0, 9.0, -11.0)),
    ("B", 103, (-30.0, -12.0, 6.0)),
    ("B", 346, (-12.0, -8.0, 16.0)),
    ("B", 407, (-36.0, 2.0, -9.0)),
]


def residue_atoms(center, rot):
    local = {k: np.array([x, y, 0.0]) for k, (x, y) in RING.items()}
    centroid = np.mean(list(local.values()), axis=0)
    local = {k: v - centroid for k, v in local.items()}
    out = (local["CG"] - local["CD2"]) / np.linalg.norm(local["CG"] - local["CD2"])
    local["CB"] = local["CG"] + 1.50 * out
    local["CA"] = local["CB"] + 1.53 * np.array([out[0], out[1], 0.6]) / np.linalg.norm([out[0], out[1], 0.6])
    local["N"] = local["CA"] + np.array([1.2, 0.8, 0.3])
    local["C"] = local["CA"] + np.array([-0.9, 1.1, 0.4])
    local["O"] = local["C"] + np.array([-0.2, 1.2, 0.0])
    return {k: rot.apply(v) + np.asarray(center) for k, v in local.items()}


def atom_line(serial, name, resname, chain, resseq, xyz, element):
    padded = f" {name:<3}" if len(name) < 4 else name
    return (
        f"ATOM  {serial:5d} {padded:<4} {resname:>3} {chain}{resseq:4d}    "
        f"{xyz[0]:8.3f}{xyz[1]:8.3f}{xyz[2]:8.3f}  1.00 20.00          {element:>2}"
    )


def main():
    rng = np.random.default_rng(20011)
    lines = [
        "HEADER    SYNTHETIC TUBULIN DIMER TRP FIXTURE",
        "REMARK   1 IDEAL INDOLE RINGS, NOT EXPERIMENTAL COORDINATES",
    ]
    serial = 1
    for chain, resseq, center in SITES:
        rot = Rotation.random(random_state=rng)
        atoms = residue_atoms(center, rot)
        for name in ORDER:
            lines.append(atom_line(serial, name, "TRP", chain, resseq, atoms[name], name[0]))
            serial += 1
        # a neighbouring glycine so the parser sees non-TRP records
        gly = atoms["CA"] + np.array([3.8, 0.0, 0.0])
        lines.append(atom_line(serial, "CA", "GLY", chain, resseq + 1, gly, "C"))
        serial += 1
        if chain == "A" and resseq == 407:
            lines.append("TER")
    lines.append("TER")
    lines.append(
        "HETATM" + f"{serial:5d}" + "  PG  GTP A 600      10.000   0.000   0.000  1.00 20.00           P"
    )
    lines.append("END")
    print("\n".join(lines))


if __name__ == "__main__":
    main()
