#!/usr/bin/env python3
# Copyright 2026 The qdenoise Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rebuild data/mnist/ from the `mnist` npm package.

The package ships 1001 MNIST digits per class as JSON arrays of intensity/255
rounded to three decimals; round(v * 255) recovers the original bytes exactly.
Digits are interleaved (0,1,...,9,0,1,...) so any prefix is class balanced.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_subset_from_npm.py package/src/digits data/mnist 500
"""
import json
import pathlib
import struct
import sys


def main() -> int:
    src = pathlib.Path(sys.argv[1])
    dst = pathlib.Path(sys.argv[2])
    per_digit = int(sys.argv[3]) if len(sys.argv) > 3 else 500
    digits = []
    for d in range(10):
        flat = json.loads((src / f"{d}.json").read_text())["data"]
        count = len(flat) // 784
        digits.append([flat[i * 784:(i + 1) * 784] for i in range(min(count, per_digit))])
    images = bytearray()
    labels = bytearray()
    n = 0
    for i in range(per_digit):
        for d in range(10):
            images += bytes(min(255, max(0, round(v * 255))) for v in digits[d][i])
            labels.append(d)
            n += 1
    dst.mkdir(parents=True, exist_ok=True)
    (dst / "subset-images-idx3-ubyte").write_bytes(struct.pack(">IIII", 0x803, n, 28, 28) + images)
    (dst / "subset-labels-idx1-ubyte").write_bytes(struct.pack(">II", 0x801, n) + labels)
    print(f"wrote {n} images to {dst}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
