#!/usr/bin/env python3
"""Train the local victim classifier and export it in the attack's weights format.

Builds a 28x28 grayscale digit dataset (sklearn digits upscaled with bilinear
interpolation, quantized to 8-bit), trains a dense MLP 784-128-10 with Adam,
and writes:

  data/victim_mlp.json   weights file consumed by the attack CLI / library
  data/test_images.csv   held-out test split, csv-flat rows: label,p0,...,p783 (0..255)

Run from the repository root:  python3 scripts/train_victim.py
"""
import json
import os

import numpy as np
from scipy.ndimage import zoom
from sklearn.datasets import load_digits

SEED = 7
HIDDEN = 128
EPOCHS = 60
BATCH = 64
LR = 1e-3
OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def build_dataset():
    digits = load_digits()
    imgs = digits.images / 16.0  # 8x8 in [0,1]
    # bilinear upscale to 28x28, then quantize to 0..255 so the shipped CSV
    # and the training representation are bit-identical after the loader's /255
    up = np.stack([zoom(img, 28 / 8, order=1) for img in imgs])
    up = np.clip(up, 0.0, 1.0)
    q = np.round(up * 255.0).astype(np.int32)
    x = (q / 255.0).reshape(len(q), -1)
    y = digits.target.astype(np.int64)
    rng = np.random.default_rng(SEED)
    perm = rng.permutation(len(x))
    x, y, q = x[perm], y[perm], q[perm]
    n_test = 500
    return (x[n_test:], y[n_test:]), (x[:n_test], y[:n_test]), q[:n_test]


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def train(x, y, x_te, y_te):
    rng = np.random.default_rng(SEED)
    d, h, c = x.shape[1], HIDDEN, 10
    w1 = rng.normal(0, np.sqrt(2.0 / d), (d, h))
    b1 = np.zeros(h)
    w2 = rng.normal(0, np.sqrt(2.0 / h), (h, c))
    b2 = np.zeros(c)
    params = [w1, b1, w2, b2]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    step = 0
    for epoch in range(EPOCHS):
        order = rng.permutation(len(x))
        for i in range(0, len(x), BATCH):
            idx = order[i:i + BATCH]
            xb, yb = x[idx], y[idx]
            hpre = xb @ w1 + b1
            hact = np.maximum(hpre, 0)
            probs = softmax(hact @ w2 + b2)
            gz = probs.copy()
            gz[np.arange(len(yb)), yb] -= 1.0
            gz /= len(yb)
            gw2 = hact.T @ gz
            gb2 = gz.sum(axis=0)
            gh = gz @ w2.T
            gh[hpre <= 0] = 0
            gw1 = xb.T @ gh
            gb1 = gh.sum(axis=0)
            grads = [gw1, gb1, gw2, gb2]
            step += 1
            for j, (p, g) in enumerate(zip(params, grads)):
                m[j] = 0.9 * m[j] + 0.1 * g
                v[j] = 0.999 * v[j] + 0.001 * g * g
                mh = m[j] / (1 - 0.9 ** step)
                vh = v[j] / (1 - 0.999 ** step)
                p -= LR * mh / (np.sqrt(vh) + 1e-8)
        if (epoch + 1) % 10 == 0:
            acc = accuracy(params, x_te, y_te)
            print(f"epoch {epoch + 1:3d}  test acc {acc:.4f}")
    return params


def accuracy(params, x, y):
    w1, b1, w2, b2 = params
    probs = softmax(np.maximum(x @ w1 + b1, 0) @ w2 + b2)
    return float((probs.argmax(axis=1) == y).mean())


def export(params, q_test, y_test):
    w1, b1, w2, b2 = params
    os.makedirs(OUT_DIR, exist_ok=True)
    model = {
        "input_dim": w1.shape[0],
        "class_count": w2.shape[1],
        "layers": [
            {"rows": w1.shape[0], "cols": w1.shape[1],
             "weights": [round(float(v), 9) for v in w1.ravel()],
             "bias": [round(float(v), 9) for v in b1],
             "activation": "relu"},
            {"rows": w2.shape[0], "cols": w2.shape[1],
             "weights": [round(float(v), 9) for v in w2.ravel()],
             "bias": [round(float(v), 9) for v in b2],
             "activation": "softmax"},
        ],
    }
    with open(os.path.join(OUT_DIR, "victim_mlp.json"), "w") as f:
        json.dump(model, f)
    with open(os.path.join(OUT_DIR, "test_images.csv"), "w") as f:
        for label, row in zip(y_test, q_test):
            f.write(str(int(label)) + "," + ",".join(str(int(p)) for p in row.ravel()) + "\n")


def main():
    (x_tr, y_tr), (x_te, y_te), q_te = build_dataset()
    print(f"train {len(x_tr)}  test {len(x_te)}")
    params = train(x_tr, y_tr, x_te, y_te)
    acc = accuracy(params, x_te, y_te)
    print(f"final test accuracy {acc:.4f}")
    if acc < 0.95:
        raise SystemExit("victim accuracy below 0.95; not exporting")
    export(params, q_te, y_te)
    print("wrote data/victim_mlp.json and data/test_images.csv")


if __name__ == "__main__":
    main()
