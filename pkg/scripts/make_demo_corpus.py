#!/usr/bin/env python3
"""Generate a small synthetic content/style corpus for CLI smoke tests.

Writes N multi-octave noise PNG pairs into content/ and style/
subdirectories of the target folder, sized so the evaluate and bench
subcommands have something to chew on without real photographs.
"""

import argparse
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from nstlab.imageio import write_png
from nstlab.tensor import Image


def noise_image(seed, height, width):
    rng = np.random.default_rng(seed)
    d = np.zeros((height, width, 3))
    for sigma, amp in ((2, 0.3), (6, 0.5), (12, 0.7)):
        d += amp * gaussian_filter(rng.standard_normal((height, width, 3)), (sigma, sigma, 0))
    d = (d - d.min()) / (d.max() - d.min())
    return Image(d.astype(np.float32))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", help="corpus root; content/ and style/ created inside")
    parser.add_argument("--pairs", type=int, default=5)
    parser.add_argument("--height", type=int, default=450)
    parser.add_argument("--width", type=int, default=600)
    args = parser.parse_args()

    root = Path(args.out_dir)
    for sub in ("content", "style"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    for i in range(args.pairs):
        write_png(root / "content" / f"pair{i:02d}.png",
                  noise_image(2 * i, args.height, args.width))
        write_png(root / "style" / f"pair{i:02d}.png",
                  noise_image(1001 + 2 * i, args.height, args.width))
    print(f"wrote {args.pairs} content/style pairs under {root}")


if __name__ == "__main__":
    main()
