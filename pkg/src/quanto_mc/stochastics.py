"""Counter-based random streams for Brownian and compound-Poisson increments.

Draws are addressed by ``(seed, process tag, step, path)``. Paths are grouped
into fixed blocks of :data:`BLOCK_SIZE`; block ``b`` at step ``j`` of tag
``g`` is produced by a Philox generator keyed on ``(seed, g)`` with its
counter set to ``(0, j, b, 0)``. No generator state survives between calls,
so any draw can be recomputed in isolation and results do not depend on how
paths are split across workers.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numpy.random import Generator, Philox

from .models import JumpParams

BLOCK_SIZE = 4096
_MASK64 = (1 << 64) - 1
# lam * dt is far below this at daily steps; guards the inversion loop
_POISSON_MAX_MEAN = 10.0


class Tag(IntEnum):
    """One stream per Brownian motion and per jump process in the largest (Case 2) model."""

    Z_USD = 0  # independent part of the USD asset noise
    Z_GBP = 1  # base asset noise
    Z_EUR = 2  # independent part of the EUR asset noise
    WV_USD = 3
    WV_GBP = 4
    WV_EUR = 5
    W_RHO = 6
    Z_FX_GBP = 7
    Z_FX_EUR = 8
    JV_USD = 9
    JV_GBP = 10
    JV_EUR = 11
    JF_GBP = 12
    JF_EUR = 13


ASSET_NOISE = (Tag.Z_USD, Tag.Z_GBP, Tag.Z_EUR)
VOL_NOISE = (Tag.WV_USD, Tag.WV_GBP, Tag.WV_EUR)
VOL_JUMPS = (Tag.JV_USD, Tag.JV_GBP, Tag.JV_EUR)
FX_NOISE = (Tag.Z_FX_GBP, Tag.Z_FX_EUR)
FX_JUMPS = (Tag.JF_GBP, Tag.JF_EUR)


@dataclass(frozen=True)
class PathStream:
    seed: int
    path: int
    tag: Tag


@dataclass(frozen=True)
class JumpIncrement:
    count: int
    total: float

    def __post_init__(self):
        if self.count == 0 and self.total != 0.0:
            raise ValueError("a zero jump count must carry a zero total")


def _generator(seed: int, tag: int, step: int, block: int) -> Generator:
    key = np.array([seed & _MASK64, int(tag)], dtype=np.uint64)
    counter = np.array([0, step, block, 0], dtype=np.uint64)
    return Generator(Philox(key=key, counter=counter))


def _blocks(start: int, stop: int):
    """Yield (block index, lo, hi) slices covering paths [start, stop)."""
    b = start // BLOCK_SIZE
    while b * BLOCK_SIZE < stop:
        lo = max(start - b * BLOCK_SIZE, 0)
        hi = min(stop - b * BLOCK_SIZE, BLOCK_SIZE)
        yield b, lo, hi
        b += 1


def standard_normals(seed: int, tag: int, step: int, start: int, stop: int) -> np.ndarray:
    """Standard normal draws Z for paths ``start .. stop-1`` at one step of one stream."""
    parts = [_generator(seed, tag, step, b).standard_normal(BLOCK_SIZE)[lo:hi]
             for b, lo, hi in _blocks(start, stop)]
    return parts[0] if len(parts) == 1 else np.concatenate(parts)


def _poisson_inverse(u: np.ndarray, mean: float) -> np.ndarray:
    counts = np.zeros(u.shape, dtype=np.int64)
    if mean <= 0.0:
        return counts
    if mean >= _POISSON_MAX_MEAN:
        raise ValueError(f"Poisson mean {mean} too large for inversion sampling")
    p = math.exp(-mean)
    cdf = np.full(u.shape, p)
    active = u > cdf
    k = 0
    while active.any():
        k += 1
        p *= mean / k
        counts[active] += 1
        cdf = cdf + p
        active &= u > cdf
        if p < 1e-300:
            break
    return counts


def jump_draws(seed: int, tag: int, step: int, start: int, stop: int, dt: float,
               p: JumpParams) -> tuple[np.ndarray, np.ndarray]:
    """Jump counts N ~ Poisson(lam*dt) and totals for paths ``start .. stop-1``.

    The total of N i.i.d. Normal(mu_j, sigma_j^2) sizes is drawn as
    N*mu_j + sigma_j*sqrt(N)*Z, which has exactly that law.
    """
    counts, totals = [], []
    mean = p.lam * dt
    for b, lo, hi in _blocks(start, stop):
        g = _generator(seed, tag, step, b)
        u = g.random(BLOCK_SIZE)[lo:hi]
        z = g.standard_normal(BLOCK_SIZE)[lo:hi]
        n = _poisson_inverse(u, mean)
        total = n * p.mu_j + p.sigma_j * np.sqrt(n) * z
        counts.append(n)
        totals.append(np.where(n > 0, total, 0.0))
    if len(counts) == 1:
        return counts[0], totals[0]
    return np.concatenate(counts), np.concatenate(totals)


def gaussian_increment(stream: PathStream, step: int, dt: float) -> float:
    """sqrt(dt) * Z for one (seed, path, tag, step) coordinate."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    z = standard_normals(stream.seed, stream.tag, step, stream.path, stream.path + 1)
    return math.sqrt(dt) * float(z[0])


def jump_increment(stream: PathStream, step: int, dt: float, p: JumpParams) -> JumpIncrement:
    if not dt > 0:
        raise ValueError("dt must be positive")
    n, total = jump_draws(stream.seed, stream.tag, step, stream.path, stream.path + 1, dt, p)
    return JumpIncrement(int(n[0]), float(total[0]))


def mix_correlated(dw_base, dz_indep, rho):
    """rho * dW_base + sqrt(1 - rho^2) * dZ."""
    return rho * dw_base + np.sqrt(np.maximum(1.0 - rho * rho, 0.0)) * dz_indep


def antithetic_of(increment):
    """Mirror a Gaussian increment. Jump increments are shared, never mirrored."""
    return -increment


class StreamFingerprint:
    """Running digest of every increment array a simulation consumes."""

    def __init__(self):
        self._h = hashlib.blake2b(digest_size=16)

    def update(self, tag: int, step: int, arr: np.ndarray):
        self._h.update(np.array([tag, step], dtype=np.int64).tobytes())
        self._h.update(np.ascontiguousarray(arr).tobytes())

    def merge(self, other_hex: str):
        self._h.update(bytes.fromhex(other_hex))

    def hexdigest(self) -> str:
        return self._h.hexdigest()
