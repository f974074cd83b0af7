"""Regenerate the bundled 512x512 greyscale test corpus from scikit-image.

All images used here are CC0 or public domain (see skimage.data docstrings).
``moon`` is deliberately left out: it is a 2x pixel-replicated upsample, which
block transforms with paired structure reconstruct losslessly.
Requires scikit-image, which the package itself does not depend on.
"""

import argparse
from pathlib import Path

import numpy as np
from skimage import color, data

from approxdct.codec import round_half_away
from approxdct.imageio import ImagePlane, bundled_corpus_dir, save_pgm

SOURCES = {
    "astronaut": lambda: color.rgb2gray(data.astronaut()) * 255.0,
    "brick": data.brick,
    "camera": data.camera,
    "ihc": lambda: color.rgb2gray(data.immunohistochemistry()) * 255.0,
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=bundled_corpus_dir())
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, load in SOURCES.items():
        img = np.asarray(load(), dtype=np.float64)
        assert img.shape == (512, 512), (name, img.shape)
        plane = ImagePlane(np.clip(round_half_away(img), 0, 255))
        save_pgm(plane, args.out / f"{name}.pgm")
        print(f"wrote {args.out / (name + '.pgm')}")


if __name__ == "__main__":
    main()
