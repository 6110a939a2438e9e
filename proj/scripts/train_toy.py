#!/usr/bin/env python3
"""Train the 2-16-16-2 toy classifier and write data/toy_model.txt and data/moons.csv.

Weights are stored as integers at 16 fraction bits. The reference accuracy is
measured with float64 arithmetic on those stored integers, so the C++ float
path must reproduce it exactly.

After training, each layer is rescaled by a positive factor so that products,
sums and pre-activations stay below LIMIT in magnitude. ReLU commutes with
positive scaling and argmax ignores it, so the classifier is unchanged while
the values sit inside the 5 integer bits of the fixed-point format.
"""
import argparse
import pathlib

import numpy as np
import torch
from sklearn.datasets import make_moons

FRAC = 16
LIMIT = 15.0


def forward(x, layers):
    h = x
    for w, b, act in layers:
        h = h @ w + b
        if act == "relu":
            h = np.maximum(h, 0.0)
    return h


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--limit", type=float, default=LIMIT)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    x, y = make_moons(n_samples=500, noise=0.1, random_state=args.seed)
    x = np.round(x, 6)
    torch.manual_seed(args.seed)
    net = torch.nn.Sequential(
        torch.nn.Linear(2, 16), torch.nn.ReLU(),
        torch.nn.Linear(16, 16), torch.nn.ReLU(),
        torch.nn.Linear(16, 2),
    )
    opt = torch.optim.Adam(net.parameters(), lr=0.01)
    xt = torch.tensor(x, dtype=torch.float32)
    yt = torch.tensor(y, dtype=torch.long)
    for _ in range(3000):
        opt.zero_grad()
        loss = torch.nn.functional.cross_entropy(net(xt), yt)
        loss.backward()
        opt.step()

    acts = ["relu", "relu", "none"]
    raw = [(m.weight.detach().numpy().T.astype(np.float64), m.bias.detach().numpy().astype(np.float64))
           for m in (net[0], net[2], net[4])]
    h = x.astype(np.float64)
    prev = 1.0
    scaled = []
    for (w, b), act in zip(raw, acts):
        peak = max(np.abs(h[:, :, None] * w[None]).max(), np.abs(h @ w).max(), np.abs(h @ w + b).max())
        c = min(1.0, args.limit / peak)
        scaled.append((w * c / prev, b * c))
        h = h @ w + b
        if act == "relu":
            h = np.maximum(h, 0.0)
        prev = c

    layers = []
    ints = []
    for (wf, bf), act in zip(scaled, acts):
        w = np.round(wf * 2**FRAC).astype(np.int64)
        b = np.round(bf * 2**FRAC).astype(np.int64)
        ints.append((w, b, act))
        layers.append((w / 2**FRAC, b / 2**FRAC, act))
    pred = forward(x, layers).argmax(axis=1)
    acc = float((pred == y).mean())

    with open(out / "toy_model.txt", "w") as f:
        f.write("trunclab-model 1\n")
        f.write(f"# two-moons, 500 points, noise 0.1, seed {args.seed}\n")
        f.write("ring 32\nint 5\nfrac %d\n" % FRAC)
        f.write(f"reference_accuracy {acc:.4f}\n")
        for w, b, act in ints:
            f.write(f"layer {w.shape[0]} {w.shape[1]} {act}\n")
            for row in w:
                f.write("W " + " ".join(str(v) for v in row) + "\n")
            f.write("b " + " ".join(str(v) for v in b) + "\n")
    with open(out / "moons.csv", "w") as f:
        f.write("x0,x1,label\n")
        for (a, c), lab in zip(x, y):
            f.write(f"{a:.6f},{c:.6f},{lab}\n")
    print(f"reference accuracy {acc:.4f}")
    print("max |w|", max(np.abs(w).max() for w, _, _ in layers))


if __name__ == "__main__":
    main()
