"""Noise models and exact sector-probability tables by exhaustive enumeration.

The central objects are SectorDistribution tables: the exact probability that
a random error lands in each (syndrome, logical-parity) sector. For
independent bit/phase flips the X and Z error species factorize and each side
is a table over (b, kz) or (a, kx); a general single-qubit Pauli channel
correlates the species and needs the joint table over (a, b, kx, kz).

Enumeration is exact and vectorized: the sector label of an error string is
F2-linear in its bits, so per-bit label contributions are XOR-folded into a
label array (iterative doubling), weights come from a popcount lookup, and
numpy.bincount accumulates each fixed-size chunk. Chunks are merged in index
order whatever the worker count, so results are bit-identical for any
thread_count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .css import CssCode, SectorKey, TooLarge, code_hash
from .gf2 import BitVector

MAX_FACTORIZED_QUBITS = 26  # 2^n single-species error strings
MAX_JOINT_QUBITS = 13  # 4^n (Ex, Ez) pairs
_CHUNK_BITS = 20  # fixed chunk grid; must not depend on thread_count

MODE_X = "factorized-x"
MODE_Z = "factorized-z"
MODE_JOINT = "joint"


class InternalInvariantError(AssertionError):
    """A computed table violated one of its own invariants."""


@dataclass(frozen=True)
class IndependentNoise:
    """Independent per-qubit bit-flip (px) and phase-flip (pz) rates."""

    px: float
    pz: float

    def __post_init__(self) -> None:
        for name, p in (("px", self.px), ("pz", self.pz)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} = {p} is not a probability")


@dataclass(frozen=True)
class PauliNoise:
    """Single-qubit Pauli channel rates (ptx, pty, ptz); identity rest."""

    ptx: float
    pty: float
    ptz: float

    def __post_init__(self) -> None:
        for name, p in (("ptx", self.ptx), ("pty", self.pty), ("ptz", self.ptz)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} = {p} is not a probability")
        if self.ptot > 1.0 + 1e-15:
            raise ValueError(f"total error rate {self.ptot} exceeds 1")

    @property
    def ptot(self) -> float:
        return self.ptx + self.pty + self.ptz


def depolarizing_from_independent(px: float, pz: float) -> PauliNoise:
    """The Pauli channel equal to independent X(px) ∘ Z(pz) noise.

    Composing the two independent flips yields X with px(1−pz), Z with
    pz(1−px), and Y with px·pz (both flips on the same qubit).
    """
    return PauliNoise(px * (1.0 - pz), px * pz, pz * (1.0 - px))


def error_weight_prob(weight: int, n: int, p: float) -> float:
    """p^weight · (1−p)^(n−weight), in log space, with 0^0 = 1.

    Args:
        weight: number of flipped qubits (0 ≤ weight ≤ n).
        n: total qubits.
        p: per-qubit flip probability.
    """
    if not 0 <= weight <= n:
        raise ValueError(f"weight {weight} outside [0, {n}]")
    if p == 0.0:
        return 1.0 if weight == 0 else 0.0
    if p == 1.0:
        return 1.0 if weight == n else 0.0
    return math.exp(weight * math.log(p) + (n - weight) * math.log1p(-p))


@dataclass(frozen=True)
class SectorDistribution:
    """Exact probability table over sector labels.

    mode fixes which SectorKey fields are populated: factorized-x uses
    (b, kz), factorized-z uses (a, kx), joint all four. Tables are dense:
    every realizable sector appears, including zero-probability ones.
    """

    code_hash: str
    n: int
    k: int
    mode: str
    widths: Dict[str, int]  # field name -> bit width, in (a, b, kx, kz) order
    table: Dict[SectorKey, float]
    noise: Dict[str, float] = field(default_factory=dict)

    def total(self) -> float:
        return math.fsum(self.table.values())

    def check(self) -> None:
        for key, p in self.table.items():
            if p < 0.0:
                raise InternalInvariantError(f"negative probability at {key}")
        if abs(self.total() - 1.0) > 1e-12:
            raise InternalInvariantError(
                f"table sums to {self.total():.17g}, not 1 within 1e-12"
            )


def _label_columns(rows: Iterable[int], n: int) -> np.ndarray:
    """Per-error-bit label contributions for a stack of F2 functionals.

    rows are packed functional supports (length-n ints); the label of error
    E is the bit-vector of parities <row_j, E>, encoded with functional j at
    bit j. Returns an (n,)-array where entry i is the label of unit error i.
    """
    cols = np.zeros(n, dtype=np.uint64)
    for j, bits in enumerate(rows):
        for i in range(n):
            if (bits >> i) & 1:
                cols[i] |= np.uint64(1 << j)
    return cols


def _x_side_functionals(code: CssCode):
    """(rows, widths) for the (b, kz) label of an X error: kz low, b high."""
    rows = [code.logical_z.row_bits[i] for i in range(code.k)]
    rows += [code.Hz_red.row_bits[j] for j in range(code.rank_z)]
    return rows, {"b": code.rank_z, "kz": code.k}


def _z_side_functionals(code: CssCode):
    """(rows, widths) for the (a, kx) label of a Z error: kx low, a high."""
    rows = [code.logical_x.row_bits[i] for i in range(code.k)]
    rows += [code.Hx_red.row_bits[j] for j in range(code.rank_x)]
    return rows, {"a": code.rank_x, "kx": code.k}


def _enumerate_labels(n: int, label_cols: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Label and popcount arrays for the low-chunk error indices."""
    ch_bits = min(n, _CHUNK_BITS)
    labels = np.zeros(1 << ch_bits, dtype=np.uint64)
    for i in range(ch_bits):
        half = 1 << i
        labels[half : 2 * half] = labels[:half] ^ label_cols[i]
    pop = np.bitwise_count(np.arange(1 << ch_bits, dtype=np.uint64)).astype(np.int64)
    return labels, pop


def _accumulate_chunks(n, label_cols, wtab, table_size, threads):
    """Sum bincounts over the fixed chunk grid, folded in chunk order."""
    ch_bits = min(n, _CHUNK_BITS)
    labels_low, pop_low = _enumerate_labels(n, label_cols)
    n_chunks = 1 << (n - ch_bits)

    def one_chunk(hi: int) -> np.ndarray:
        hi_label = np.uint64(0)
        hi_pop = 0
        for j in range(n - ch_bits):
            if (hi >> j) & 1:
                hi_label ^= label_cols[ch_bits + j]
                hi_pop += 1
        weights = wtab[pop_low + hi_pop]
        labels = (labels_low ^ hi_label).view(np.int64)  # bincount wants signed
        return np.bincount(labels, weights=weights, minlength=table_size)

    total = np.zeros(table_size, dtype=np.float64)
    if threads <= 1 or n_chunks == 1:
        for hi in range(n_chunks):
            total += one_chunk(hi)
        return total
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(one_chunk, range(n_chunks)):
            total += part  # pool.map preserves submission order
    return total


def _factorized_distribution(code, p, rows, widths, mode, noise, threads):
    n = code.n
    if n > MAX_FACTORIZED_QUBITS:
        raise TooLarge(
            f"factorized enumeration bound is n <= {MAX_FACTORIZED_QUBITS}, "
            f"got n = {n}"
        )
    label_cols = _label_columns(rows, n)
    wtab = np.array([error_weight_prob(w, n, p) for w in range(n + 1)])
    table_bits = sum(widths.values())
    probs = _accumulate_chunks(n, label_cols, wtab, 1 << table_bits, threads)

    k = code.k
    table: Dict[SectorKey, float] = {}
    for idx in range(1 << table_bits):
        low = BitVector(k, idx & ((1 << k) - 1))
        high = BitVector(table_bits - k, idx >> k)
        if mode == MODE_X:
            key = SectorKey(b=high, kz=low)
        else:
            key = SectorKey(a=high, kx=low)
        table[key] = float(probs[idx])
    dist = SectorDistribution(
        code_hash=code_hash(code),
        n=n,
        k=k,
        mode=mode,
        widths=widths,
        table=table,
        noise=noise,
    )
    dist.check()
    return dist


def sector_distribution_x(code: CssCode, px: float, threads: int = 1) -> SectorDistribution:
    """Exact (b, kz) table for independent X errors at rate px.

    Enumerates all 2^n X-error strings; n ≤ 26. The table has exactly
    2^(rank_z + k) entries (each sector is realized by 2^rank_x strings)
    and sums to 1 within 1e-12.
    """
    if not 0.0 <= px <= 1.0:
        raise ValueError(f"px = {px} is not a probability")
    rows, widths = _x_side_functionals(code)
    return _factorized_distribution(
        code, px, rows, widths, MODE_X, {"px": px}, threads
    )


def sector_distribution_z(code: CssCode, pz: float, threads: int = 1) -> SectorDistribution:
    """Exact (a, kx) table for independent Z errors at rate pz (mirror of X)."""
    if not 0.0 <= pz <= 1.0:
        raise ValueError(f"pz = {pz} is not a probability")
    rows, widths = _z_side_functionals(code)
    return _factorized_distribution(
        code, pz, rows, widths, MODE_Z, {"pz": pz}, threads
    )


def sector_distribution_joint(
    code: CssCode, noise: PauliNoise, threads: int = 1
) -> SectorDistribution:
    """Exact (a, b, kx, kz) table for a general Pauli channel.

    Enumerates all 4^n pairs (Ex, Ez); n ≤ 13. An error applies X where
    Ex-only, Z where Ez-only, and Y where both overlap, so a pair's
    probability is (1−ptot)^(n−wx−wy−wz) · ptx^wx · pty^wy · ptz^wz with the
    species weights read off the element-wise overlaps.
    """
    n = code.n
    if n > MAX_JOINT_QUBITS:
        raise TooLarge(
            f"joint enumeration bound is n <= {MAX_JOINT_QUBITS}, got n = {n}"
        )
    x_rows, x_widths = _x_side_functionals(code)
    z_rows, z_widths = _z_side_functionals(code)
    x_cols = _label_columns(x_rows, n)
    z_cols = _label_columns(z_rows, n)
    x_bits = sum(x_widths.values())  # width of the (b, kz) part
    z_bits = sum(z_widths.values())

    # Labels of every Ex in one shot (n ≤ 13 keeps this at 8192 entries).
    labels_x = np.zeros(1 << n, dtype=np.uint64)
    for i in range(n):
        half = 1 << i
        labels_x[half : 2 * half] = labels_x[:half] ^ x_cols[i]
    ex_arr = np.arange(1 << n, dtype=np.uint64)

    # Per-species log weights with 0-rate handling: weight(wx, wy | Ez) =
    # prefix(wz) · ptx^wx · pty^wy where wz = popcount(Ez) − wy.
    rest = 1.0 - noise.ptot

    def pow_or_zero(p: float, w: int) -> float:
        if w == 0:
            return 1.0
        return p**w if p > 0.0 else 0.0

    weight_of = np.zeros((n + 1, n + 1, n + 1))  # [pc_ez, wx, wy]
    for pc_ez in range(n + 1):
        for wx in range(n + 1 - pc_ez):
            for wy in range(pc_ez + 1):
                wz = pc_ez - wy
                weight_of[pc_ez, wx, wy] = (
                    pow_or_zero(rest, n - wx - wy - wz)
                    * pow_or_zero(noise.ptx, wx)
                    * pow_or_zero(noise.pty, wy)
                    * pow_or_zero(noise.ptz, wz)
                )

    probs = np.zeros((1 << z_bits, 1 << x_bits), dtype=np.float64)
    z_label = 0
    prev_ez = 0
    for ez in range(1 << n):
        # Incremental Gray-style label update is unnecessary at 2^13; recompute
        # the XOR directly from the flipped bits for clarity.
        flipped = ez ^ prev_ez
        while flipped:
            low = (flipped & -flipped).bit_length() - 1
            z_label ^= int(z_cols[low])
            flipped &= flipped - 1
        prev_ez = ez
        ez64 = np.uint64(ez)
        wx = np.bitwise_count(ex_arr & ~ez64).astype(np.int64)
        wy = np.bitwise_count(ex_arr & ez64).astype(np.int64)
        weights = weight_of[ez.bit_count()][wx, wy]
        probs[z_label] += np.bincount(
            labels_x.view(np.int64), weights=weights, minlength=1 << x_bits
        )

    k = code.k
    table: Dict[SectorKey, float] = {}
    for zi in range(1 << z_bits):
        kx = BitVector(k, zi & ((1 << k) - 1))
        a = BitVector(code.rank_x, zi >> k)
        for xi in range(1 << x_bits):
            kz = BitVector(k, xi & ((1 << k) - 1))
            b = BitVector(code.rank_z, xi >> k)
            table[SectorKey(a=a, b=b, kx=kx, kz=kz)] = float(probs[zi, xi])
    widths = {"a": code.rank_x, "b": code.rank_z, "kx": k, "kz": k}
    dist = SectorDistribution(
        code_hash=code_hash(code),
        n=n,
        k=k,
        mode=MODE_JOINT,
        widths=widths,
        table=table,
        noise={"ptx": noise.ptx, "pty": noise.pty, "ptz": noise.ptz},
    )
    dist.check()
    return dist


def marginalize(dist: SectorDistribution, keep: Iterable[str]) -> SectorDistribution:
    """Sum probabilities over every sector field not in `keep`.

    Accumulation follows the source table's canonical iteration order, so
    results are deterministic. The result's mode is the canonical one when
    the kept fields match it, else 'marginal'.
    """
    keep_set = frozenset(keep)
    present = frozenset(dist.widths)
    if not keep_set <= present:
        raise ValueError(f"cannot keep {sorted(keep_set - present)}: absent")
    out: Dict[SectorKey, float] = {}
    for key, p in dist.table.items():
        reduced = SectorKey(
            a=key.a if "a" in keep_set else None,
            b=key.b if "b" in keep_set else None,
            kx=key.kx if "kx" in keep_set else None,
            kz=key.kz if "kz" in keep_set else None,
        )
        out[reduced] = out.get(reduced, 0.0) + p
    if keep_set == {"b", "kz"}:
        mode = MODE_X
    elif keep_set == {"a", "kx"}:
        mode = MODE_Z
    elif keep_set == {"a", "b", "kx", "kz"}:
        mode = dist.mode
    else:
        mode = "marginal"
    widths = {f: w for f, w in dist.widths.items() if f in keep_set}
    return SectorDistribution(
        code_hash=dist.code_hash,
        n=dist.n,
        k=dist.k,
        mode=mode,
        widths=widths,
        table=out,
        noise=dist.noise,
    )


# ---------------------------------------------------------------------------
# JSON round-tripping
# ---------------------------------------------------------------------------

def _key_bitstring(key: SectorKey, widths: Dict[str, int]) -> str:
    parts = []
    for name in ("a", "b", "kx", "kz"):
        if name in widths:
            vec: BitVector = getattr(key, name)
            parts.append(vec.to01())
    return "".join(parts)


def to_json_dict(dist: SectorDistribution) -> dict:
    """JSON-ready dict: keys as hex of the concatenated (a|b|kx|kz) bits."""
    total_bits = sum(dist.widths.values())
    hex_width = max(1, (total_bits + 3) // 4)
    entries = {}
    for key, p in dist.table.items():
        bits = _key_bitstring(key, dist.widths)
        # First character of the bitstring is the lowest-order bit.
        value = int(bits[::-1], 2) if bits else 0
        entries[f"{value:0{hex_width}x}"] = p
    return {
        "code_hash": dist.code_hash,
        "n": dist.n,
        "k": dist.k,
        "mode": dist.mode,
        "widths": dict(dist.widths),
        "noise": dict(dist.noise),
        "table": entries,
    }


def from_json_dict(data: dict) -> SectorDistribution:
    """Inverse of to_json_dict (bit-exact on probabilities)."""
    widths = {str(f): int(w) for f, w in data["widths"].items()}
    total_bits = sum(widths.values())
    table: Dict[SectorKey, float] = {}
    for hex_key, p in data["table"].items():
        packed = int(hex_key, 16)
        bits = "".join(str((packed >> i) & 1) for i in range(total_bits))
        fields = {}
        pos = 0
        for name in ("a", "b", "kx", "kz"):
            if name in widths:
                w = widths[name]
                fields[name] = BitVector.from01(bits[pos : pos + w])
                pos += w
        table[SectorKey(**fields)] = float(p)
    return SectorDistribution(
        code_hash=str(data["code_hash"]),
        n=int(data["n"]),
        k=int(data["k"]),
        mode=str(data["mode"]),
        widths=widths,
        table=table,
        noise={str(k): float(v) for k, v in data.get("noise", {}).items()},
    )


def save_json(dist: SectorDistribution, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(to_json_dict(dist), fh, indent=1)
        fh.write("\n")


def load_json(path: str) -> SectorDistribution:
    with open(path, "r", encoding="ascii") as fh:
        return from_json_dict(json.load(fh))
