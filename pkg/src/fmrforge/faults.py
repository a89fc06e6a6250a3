"""Truth-cum-fault enumeration and fault masking ratio (FMR).

The exhaustive space is every (input vector, nonzero internal fault mask)
pair.  The engine treats the ``m`` mask bits as ``m`` extra pseudo-inputs and
simulates all ``2**(n+m)`` patterns bit-parallel, where pattern index
``vector * 2**m + mask`` gives the canonical vector-major, mask-minor order.
Both vectors and masks are read most-significant-bit first in declaration
order, so input ``A`` of ``A,B,C,D`` is the top bit.

FMR = k / (2**n * (2**m - 1)), with k the number of faulty combinations whose
primary outputs all equal the fault-free outputs.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .circuit import (
    Netlist,
    bits_str,
    index_bit_words,
    pack_bits,
    simulate,
    unpack_bits,
    words_for,
)
from .errors import CapExceededError

DEFAULT_CAP = 24
CAP_ENV = "FMRFORGE_CAP"

# patterns simulated per chunk; chunks are contiguous vector ranges
_CHUNK_PATTERNS = 1 << 20
# samples per Monte Carlo partition; fixed so results never depend on workers
_MC_PARTITION = 1 << 16
_Z95 = 1.959963984540054


def resolve_cap(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get(CAP_ENV)
    return int(env) if env else DEFAULT_CAP


def check_cap(net: Netlist, cap: int | None = None) -> None:
    limit = resolve_cap(cap)
    if net.n + net.m > limit:
        raise CapExceededError(net.n, net.m, limit)


class RowState(enum.Enum):
    ACTUAL = "Actual"
    CORRECT = "Correct"
    ERROR = "Error"

    def __str__(self):
        return self.value


class FaultKind(enum.Enum):
    RISE = "0→1"
    FALL = "1→0"

    @property
    def ascii(self) -> str:
        return self.value.replace("→", "->")

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class EnumerationRow:
    vector: tuple[bool, ...]
    mask: tuple[bool, ...]
    node_values: tuple[bool, ...]
    fault_kinds: tuple[tuple[str, FaultKind], ...]
    outputs: tuple[bool, ...]
    state: RowState


@dataclass(frozen=True)
class FmrReport:
    n: int
    m: int
    k: int
    denominator: int
    per_vector: tuple[tuple[int, int], ...]  # (masked, error) per input vector

    @property
    def fmr_exact(self) -> Fraction:
        if self.denominator == 0:
            return Fraction(1)
        return Fraction(self.k, self.denominator)

    @property
    def fmr_decimal(self) -> float:
        return round(float(self.fmr_exact), 4)

    def to_document(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "denominator": self.denominator,
            "fmr_exact": f"{self.k}/{self.denominator}",
            "fmr": self.fmr_decimal,
            "per_vector": [
                {"vector": bits_str(_vec_bits(v, self.n)), "masked": c, "error": e}
                for v, (c, e) in enumerate(self.per_vector)
            ],
        }


@dataclass(frozen=True)
class McEstimate:
    samples: int
    hits: int
    seed: int

    @property
    def estimate(self) -> float:
        return self.hits / self.samples

    @property
    def ci95(self) -> tuple[float, float]:
        """Normal-approximation interval widened by a 0.5/N continuity term."""
        p = self.estimate
        half = _Z95 * math.sqrt(p * (1.0 - p) / self.samples) + 0.5 / self.samples
        return max(0.0, p - half), min(1.0, p + half)

    @property
    def ci95_low(self) -> float:
        return self.ci95[0]

    @property
    def ci95_high(self) -> float:
        return self.ci95[1]

    def to_document(self) -> dict:
        lo, hi = self.ci95
        return {
            "samples": self.samples,
            "hits": self.hits,
            "estimate": self.estimate,
            "ci95_low": lo,
            "ci95_high": hi,
            "seed": self.seed,
        }


def _vec_bits(v: int, width: int) -> tuple[bool, ...]:
    return tuple(bool((v >> (width - 1 - i)) & 1) for i in range(width))


# ---------------------------------------------------------------------------
# bulk engine


def _chunks(net: Netlist):
    """Yield ``(first_vector, vector_count)`` for contiguous chunks."""
    per_chunk = max(1, _CHUNK_PATTERNS >> net.m)
    total = 1 << net.n
    for v0 in range(0, total, per_chunk):
        yield v0, min(per_chunk, total - v0)


def _simulate_chunk(net: Netlist, v0: int, nvec: int):
    """Fault-free and faulty net values for vectors ``v0..v0+nvec`` x all masks."""
    n, m = net.n, net.m
    start = v0 << m
    npat = nvec << m
    pi = [index_bit_words(m + n - 1 - i, start, npat) for i in range(n)]
    flips = [index_bit_words(m - 1 - j, start, npat) for j in range(m)]
    golden = simulate(net, pi, nwords=words_for(npat))
    faulty = simulate(net, pi, flips, nwords=words_for(npat))
    return npat, golden, faulty


def _error_words(net: Netlist, golden, faulty) -> np.ndarray:
    err = None
    for o in net.outputs:
        i = net.net_index[o]
        diff = golden[i] ^ faulty[i]
        err = diff if err is None else err | diff
    return err


def _count_chunk(net: Netlist, v0: int, nvec: int) -> np.ndarray:
    """Per-vector (masked, error) counts over nonzero masks for one chunk."""
    npat, golden, faulty = _simulate_chunk(net, v0, nvec)
    err = unpack_bits(_error_words(net, golden, faulty), npat).reshape(nvec, 1 << net.m)
    errors = err[:, 1:].sum(axis=1)
    masked = ((1 << net.m) - 1) - errors
    return np.stack([masked, errors], axis=1)


def compute_fmr(net: Netlist, cap: int | None = None, workers: int = 1) -> FmrReport:
    """Exhaustive FMR.  ``workers > 1`` evaluates chunks on a thread pool."""
    check_cap(net, cap)
    n, m = net.n, net.m
    if m == 0:
        return FmrReport(n, 0, 0, 0, tuple((0, 0) for _ in range(1 << n)))
    chunks = list(_chunks(net))
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _count_chunk(net, *c), chunks))
    else:
        parts = [_count_chunk(net, *c) for c in chunks]
    counts = np.concatenate(parts)
    k = int(counts[:, 0].sum())
    per_vector = tuple((int(c), int(e)) for c, e in counts)
    return FmrReport(n, m, k, (1 << n) * ((1 << m) - 1), per_vector)


def enumerate_faults(net: Netlist, cap: int | None = None) -> Iterator[EnumerationRow]:
    """Stream all ``2**(n+m)`` rows in canonical order."""
    check_cap(net, cap)
    n, m = net.n, net.m
    nodes = net.internal_nodes
    node_idx = [net.net_index[u] for u in nodes]
    out_idx = [net.net_index[o] for o in net.outputs]
    masks = [_vec_bits(f, m) for f in range(1 << m)]
    for v0, nvec in _chunks(net):
        npat, golden, faulty = _simulate_chunk(net, v0, nvec)
        nodes_bits = np.stack([unpack_bits(faulty[i], npat) for i in node_idx], axis=1) if m else None
        outs_bits = np.stack([unpack_bits(faulty[i], npat) for i in out_idx], axis=1)
        err = unpack_bits(_error_words(net, golden, faulty), npat)
        for p in range(npat):
            f = p & ((1 << m) - 1)
            mask = masks[f]
            values = tuple(bool(b) for b in nodes_bits[p]) if m else ()
            if f == 0:
                state = RowState.ACTUAL
            else:
                state = RowState.ERROR if err[p] else RowState.CORRECT
            kinds = tuple(
                (nodes[j], FaultKind.RISE if values[j] else FaultKind.FALL)
                for j in range(m)
                if mask[j]
            )
            yield EnumerationRow(
                vector=_vec_bits(v0 + (p >> m), n),
                mask=mask,
                node_values=values,
                fault_kinds=kinds,
                outputs=tuple(bool(b) for b in outs_bits[p]),
                state=state,
            )


@dataclass(frozen=True)
class SingleFaultError:
    vector: tuple[bool, ...]
    node: str
    kind: FaultKind
    golden: tuple[bool, ...]
    faulty: tuple[bool, ...]


def single_fault_outcomes(net: Netlist, cap: int | None = None):
    """Every single-node fault as ``(vector, node, kind, golden, faulty)``.

    Vector-major, node-minor.  Uses one bit-parallel pass per node.
    """
    check_cap(net, cap)
    n, m = net.n, net.m
    total = 1 << n
    pi = [index_bit_words(n - 1 - i, 0, total) for i in range(n)]
    golden = simulate(net, pi)
    out_idx = [net.net_index[o] for o in net.outputs]
    gold_bits = np.stack([unpack_bits(golden[i], total) for i in out_idx], axis=1)
    nwords = words_for(total)
    per_node = []
    for j, u in enumerate(net.internal_nodes):
        flips = [None] * m
        flips[j] = np.full(nwords, np.uint64(0xFFFF_FFFF_FFFF_FFFF), dtype=np.uint64)
        faulty = simulate(net, pi, flips)
        node_bits = unpack_bits(golden[net.net_index[u]], total)
        out_bits = np.stack([unpack_bits(faulty[i], total) for i in out_idx], axis=1)
        per_node.append((u, node_bits, out_bits))
    for v in range(total):
        vec = _vec_bits(v, n)
        gold = tuple(bool(b) for b in gold_bits[v])
        for u, node_bits, out_bits in per_node:
            kind = FaultKind.FALL if node_bits[v] else FaultKind.RISE
            yield SingleFaultError(vec, u, kind, gold, tuple(bool(b) for b in out_bits[v]))


def single_fault_errors(net: Netlist, cap: int | None = None) -> list[SingleFaultError]:
    """Single-node faults that change at least one primary output.

    For a single fault, the flipped node's local value equals its fault-free
    value, so ``kind`` is taken from the fault-free node value.
    """
    return [r for r in single_fault_outcomes(net, cap) if r.golden != r.faulty]


# ---------------------------------------------------------------------------
# Monte Carlo


def _mc_partition(net: Netlist, count: int, seed: int, index: int) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))
    n, m = net.n, net.m
    vectors = rng.integers(0, 1 << n, size=count, dtype=np.uint64) if n else np.zeros(count, np.uint64)
    masks = rng.integers(1, 1 << m, size=count, dtype=np.uint64, endpoint=False)
    pi = [pack_bits((vectors >> np.uint64(n - 1 - i)) & np.uint64(1)) for i in range(n)]
    flips = [pack_bits((masks >> np.uint64(m - 1 - j)) & np.uint64(1)) for j in range(m)]
    nwords = words_for(count)
    golden = simulate(net, pi, nwords=nwords)
    faulty = simulate(net, pi, flips, nwords=nwords)
    err = unpack_bits(_error_words(net, golden, faulty), count)
    return int(count - err.sum())


def estimate_fmr_mc(net: Netlist, samples: int, seed: int, workers: int = 1) -> McEstimate:
    """Sampled FMR over i.i.d. uniform (vector, nonzero mask) pairs.

    Samples are drawn in fixed-size partitions, each seeded from
    ``(seed, partition index)``; the result is identical for any ``workers``.
    """
    if net.m == 0:
        raise ValueError("netlist has no internal nodes; nothing to sample")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if net.m > 63 or net.n > 63:
        raise ValueError("Monte Carlo sampling supports at most 63 inputs and 63 internal nodes")
    parts = [
        (min(_MC_PARTITION, samples - s), i)
        for i, s in enumerate(range(0, samples, _MC_PARTITION))
    ]
    if workers > 1 and len(parts) > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(lambda p: _mc_partition(net, p[0], seed, p[1]), parts))
    else:
        hits = sum(_mc_partition(net, c, seed, i) for c, i in parts)
    return McEstimate(samples=samples, hits=hits, seed=seed)
