"""Test-only fixtures data.

``write_surrogate_mushroom`` writes a *stand-in* for the UCI agaricus-lepiota
file: attributes are drawn uniformly from the documented per-attribute
alphabets and labelled with the four published poisonous-mushroom rules.  It
exercises the same parser and one-hot path as the real file but is not the
dataset; criteria that name the real file still require it.
"""
import gzip
import struct

import numpy as np

ALPHABETS = [
    "bcxfks", "fgys", "nbcgrpuewy", "tf", "alcyfmnps", "adfn", "cwd", "bn", "knbhgropuewy", "et",
    "bcuezr?", "fyks", "fyks", "nbcgopewy", "nbcgopewy", "pu", "nowy", "not", "ceflnpsz", "knbhrouwy",
    "acnsvy", "glmpuwd",
]
ODOR, STALK_BELOW, STALK_COLOR_ABOVE, SPORE, CAP_COLOR, HABITAT = 4, 12, 13, 19, 2, 21


def poisonous(rec):
    return (
        rec[ODOR] not in "aln"
        or rec[SPORE] == "r"
        or (rec[ODOR] == "n" and rec[STALK_BELOW] == "y" and rec[STALK_COLOR_ABOVE] != "n")
        or (rec[HABITAT] == "l" and rec[CAP_COLOR] == "w")
    )


def surrogate_mushroom_lines(count=2000, seed=0):
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(count):
        rec = [alpha[rng.integers(len(alpha))] for alpha in ALPHABETS]
        # boost the edible odours so both classes are well represented
        if rng.random() < 0.5:
            rec[ODOR] = "aln"[rng.integers(3)]
        lines.append(",".join(["p" if poisonous(rec) else "e"] + rec))
    return lines


def write_surrogate_mushroom(path, count=2000, seed=0):
    path.write_text("\n".join(surrogate_mushroom_lines(count, seed)) + "\n")
    return path


def write_idx(directory, images, labels, stem="train", compress=False):
    """Write an IDX image/label pair (uint8 arrays) and return their paths."""
    count, rows, cols = images.shape
    img = struct.pack(">IIII", 0x803, count, rows, cols) + images.astype(np.uint8).tobytes()
    lab = struct.pack(">II", 0x801, len(labels)) + np.asarray(labels, dtype=np.uint8).tobytes()
    paths = []
    for name, blob in ((f"{stem}-images-idx3-ubyte", img), (f"{stem}-labels-idx1-ubyte", lab)):
        p = directory / (name + (".gz" if compress else ""))
        p.write_bytes(gzip.compress(blob, mtime=0) if compress else blob)
        paths.append(p)
    return tuple(paths)
