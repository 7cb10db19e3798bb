#!/usr/bin/env python3
"""Write the synthetic identity-preserving weight file.

The resulting .nstw file makes the full engine runnable without any
pretrained checkpoints: encoders pass the image through untouched and
decoders invert them, so reconstruction checks and the feature
transforms all behave sensibly.
"""

import argparse

from nstlab.synthetic import synthetic_tensors
from nstlab.weights import save_weights


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", help="output .nstw path")
    args = parser.parse_args()
    tensors = synthetic_tensors()
    save_weights(args.out, tensors)
    total = sum(t.nbytes for t in tensors.values())
    print(f"wrote {len(tensors)} tensors ({total / 1e6:.1f} MB) to {args.out}")


if __name__ == "__main__":
    main()
