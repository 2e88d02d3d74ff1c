"""Flat binary container for problem instances.

Layout: the magic line ``ADMMKIT1\\n``, one JSON header line (UTF-8, ending
in ``\\n``), then the raw little-endian float64 payload. Lasso headers carry
(kind, m, n, rho, seed) with payload row-major A then b; covariance-selection
headers carry (kind, n, tau, seed) with payload row-major S. Round trips are
bitwise exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .covsel import CovselInstance
from .lasso import LassoInstance

MAGIC = b"ADMMKIT1\n"


def save_instance(path, instance, seed: int | None = None) -> Path:
    """Write a Lasso or covariance-selection instance; returns the path."""
    path = Path(path)
    if isinstance(instance, LassoInstance):
        header = {
            "kind": "lasso",
            "m": instance.rows,
            "n": instance.cols,
            "rho": instance.rho,
            "seed": seed,
        }
        payload = (instance.A.astype("<f8").tobytes(), instance.b.astype("<f8").tobytes())
    elif isinstance(instance, CovselInstance):
        header = {"kind": "covsel", "n": instance.n, "tau": instance.tau, "seed": seed}
        payload = (instance.S.astype("<f8").tobytes(),)
    else:
        raise TypeError(f"cannot serialize {type(instance).__name__}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        for chunk in payload:
            fh.write(chunk)
    return path


def load_instance(path):
    """Read an instance container; returns (instance, header dict)."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path}: not an instance container (bad magic {magic!r})")
        header = json.loads(fh.readline().decode("utf-8"))
        payload = fh.read()
    kind = header.get("kind")
    if kind == "lasso":
        m, n = int(header["m"]), int(header["n"])
        expected = (m * n + m) * 8
        if len(payload) != expected:
            raise ValueError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
        A = np.frombuffer(payload[: m * n * 8], dtype="<f8").reshape(m, n)
        b = np.frombuffer(payload[m * n * 8 :], dtype="<f8")
        return LassoInstance(A.copy(), b.copy(), float(header["rho"])), header
    if kind == "covsel":
        n = int(header["n"])
        expected = n * n * 8
        if len(payload) != expected:
            raise ValueError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
        S = np.frombuffer(payload, dtype="<f8").reshape(n, n)
        return CovselInstance(S.copy(), float(header["tau"])), header
    raise ValueError(f"{path}: unknown instance kind {kind!r}")
