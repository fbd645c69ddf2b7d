#!/usr/bin/env python3
"""Regenerate data/networks/toy_quant3.json.

A small 3-layer integer-quantized network (conv 3x3x1 -> conv 3x3x4 -> fc)
with a fixed 8x8 input image, used to exercise the bit-exact stochastic
datapath against an exact integer forward pass. Weights and the input are
drawn from a tiny deterministic LCG so the file reproduces byte-for-byte.

Weight layout per kernel follows the flattening order (r*K + q)*D + d.
Activations are unsigned 8-bit; weights are sign/magnitude with 8-bit
magnitudes. requant_shift is the per-layer right shift applied to the
ReLU-clamped accumulator counts before the next layer.
"""

import json
import sys


class Lcg:
    def __init__(self, seed):
        self.state = seed & 0xFFFFFFFFFFFFFFFF

    def next(self):
        self.state = (self.state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        return self.state >> 33

    def uniform(self, lo, hi):  # inclusive
        return lo + self.next() % (hi - lo + 1)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/networks/toy_quant3.json"
    rng = Lcg(0x5EED)

    H = W = 8
    image = [rng.uniform(0, 255) for _ in range(H * W)]

    def make_weights(count, size):
        # signed magnitudes; biased mildly positive so ReLU keeps signal alive
        return [[rng.uniform(-200, 255) for _ in range(size)] for _ in range(count)]

    net = {
        "name": "toy_quant3",
        "precision_bits": 8,
        "input": {"H": H, "W": W, "D": 1, "data": image},
        "layers": [
            {
                "name": "conv1",
                "kind": "conv",
                "K": 3, "D": 1, "L": 4, "stride": 1, "padding": 0,
                "requant_shift": 4,
                "weights": make_weights(4, 9),
            },
            {
                "name": "conv2",
                "kind": "conv",
                "K": 3, "D": 4, "L": 8, "stride": 1, "padding": 0,
                "requant_shift": 5,
                "weights": make_weights(8, 36),
            },
            {
                "name": "fc",
                "kind": "fully_connected",
                "K": 1, "D": 128, "L": 10, "stride": 1, "padding": 0,
                "requant_shift": 6,
                "weights": make_weights(10, 128),
            },
        ],
    }
    with open(out, "w") as f:
        json.dump(net, f, indent=1)
        f.write("\n")
    print(f"{out}: input {H}x{W}, layers conv(4) conv(8) fc(10)")


if __name__ == "__main__":
    main()
