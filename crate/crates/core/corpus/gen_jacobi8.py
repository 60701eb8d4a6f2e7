"""Writes jacobi8.json (an `ad` config) and jacobi8_oracle.json.

The base measure is the spectral measure of an 8x8 Jacobi matrix J with
respect to e1; the oracle is the dense eigensolve of J + alpha e1 e1^T.
"""
import json

import numpy as np

a = [0.0, 0.5, -0.3, 1.2, 0.1, -0.8, 0.4, 0.9]
b = [1.0, 0.7, 1.3, 0.6, 0.9, 1.1, 0.8]
alpha = 0.7

J = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)


def measure(m):
    vals, vecs = np.linalg.eigh(m)
    return [{"pos": float(x), "w": float(v[0] ** 2)} for x, v in zip(vals, vecs.T)]


with open("jacobi8.json", "w") as f:
    json.dump({"measure": {"atoms": measure(J)}, "alpha": alpha}, f, indent=1)
    f.write("\n")

P = J.copy()
P[0, 0] += alpha
with open("jacobi8_oracle.json", "w") as f:
    json.dump({"alpha": alpha, "atoms": measure(P)}, f, indent=1)
    f.write("\n")
