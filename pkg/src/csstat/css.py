"""CSS code construction, logical-operator extraction, and sector labels.

A CSS code is a pair of classical parity-check matrices (Hz, Hx) over F2 with
Hx·Hz^T = 0: rows of Hz are Z-type stabilizer supports, rows of Hx X-type.
Logical qubit count is k = n − rank(Hx) − rank(Hz); redundancy among the raw
check rows is tracked by Dx = dim ker(Hx^T) and Dz = dim ker(Hz^T).

Logical operators come from a symplectic Gram–Schmidt pass over the kernel
bases of Hx (Z-type candidates) and Hz (X-type candidates): the procedure
extracts k anticommuting pairs while keeping every operator pure X- or pure
Z-type. The choice of basis is fixed by canonical kernel bases plus the
pairing order, making every derived quantity reproducible; basis independence
of the physical quantities is established by tests, not assumed.

An error pair (Ex, Ez) is classified by its sector label: the syndrome of Ex
against the independent Z checks (b), the syndrome of Ez against the
independent X checks (a), and the logical parities kz_i = <logical_z[i], Ex>,
kx_i = <logical_x[i], Ez>.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    dot,
    kernel_basis,
    matvec,
    rank as gf2_rank,
    row_reduce,
    row_space_basis,
)


class CommutationViolation(Exception):
    """Hx and Hz rows that anticommute; carries the offending row pair."""

    def __init__(self, row_x: int, row_z: int):
        self.row_x = row_x
        self.row_z = row_z
        super().__init__(
            f"X check row {row_x} and Z check row {row_z} overlap on an odd "
            f"number of qubits"
        )


class TooLarge(Exception):
    """An exhaustive enumeration would exceed its documented bound."""


class EmptyCodeWarning(UserWarning):
    """Issued when a valid check pair encodes zero logical qubits."""


class CodeFormatError(ValueError):
    """Malformed code file; carries the 1-based offending line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


@dataclass(frozen=True)
class SymplecticOp:
    """A Pauli support in binary symplectic form (phases are not tracked).

    z_part marks qubits carrying Z, x_part qubits carrying X. An operator is
    Z-type iff x_part = 0 and X-type iff z_part = 0.
    """

    z_part: BitVector
    x_part: BitVector

    def __mul__(self, other: "SymplecticOp") -> "SymplecticOp":
        return SymplecticOp(self.z_part ^ other.z_part, self.x_part ^ other.x_part)


def symplectic_product(g: SymplecticOp, h: SymplecticOp) -> int:
    """1 if g and h anticommute, else 0."""
    return dot(g.z_part, h.x_part) ^ dot(g.x_part, h.z_part)


@dataclass(frozen=True)
class SectorKey:
    """Sector label (a, b, kx, kz); fields absent from a mode are None.

    a has length rank_x, b rank_z, kx and kz length k, all fixed by the
    owning code.
    """

    a: Optional[BitVector] = None
    b: Optional[BitVector] = None
    kx: Optional[BitVector] = None
    kz: Optional[BitVector] = None

    def fields(self) -> Tuple[str, ...]:
        return tuple(
            name for name in ("a", "b", "kx", "kz") if getattr(self, name) is not None
        )


@dataclass(frozen=True)
class CssCode:
    """A validated CSS code with derived structure. Immutable."""

    n: int
    Hz: BitMatrix
    Hx: BitMatrix
    rank_z: int
    rank_x: int
    k: int
    Dx: int
    Dz: int
    logical_x: BitMatrix  # k × n, X-type supports, rows in ker(Hz)
    logical_z: BitMatrix  # k × n, Z-type supports, rows in ker(Hx)
    # Canonical independent checks: the nonzero rows of RREF(Hz) / RREF(Hx).
    # Syndromes are reported against these, so sector keys have fixed width.
    Hz_red: BitMatrix = field(repr=False, default=None)
    Hx_red: BitMatrix = field(repr=False, default=None)

    def syndrome_z(self, ex: BitVector) -> BitVector:
        """Syndrome of an X-error against the independent Z checks (b)."""
        return matvec(self.Hz_red, ex)

    def syndrome_x(self, ez: BitVector) -> BitVector:
        """Syndrome of a Z-error against the independent X checks (a)."""
        return matvec(self.Hx_red, ez)

    def logical_parities_z(self, ex: BitVector) -> BitVector:
        """kz: overlap parities of an X-error with the Z-type logicals."""
        return BitVector.from_bits(
            dot(self.logical_z.row(i), ex) for i in range(self.k)
        )

    def logical_parities_x(self, ez: BitVector) -> BitVector:
        """kx: overlap parities of a Z-error with the X-type logicals."""
        return BitVector.from_bits(
            dot(self.logical_x.row(i), ez) for i in range(self.k)
        )


def sgsop(ops: List[SymplecticOp]) -> Tuple[List[Tuple[SymplecticOp, SymplecticOp]], List[SymplecticOp]]:
    """Symplectic Gram–Schmidt: split ops into anticommuting pairs + leftovers.

    Scans for the first operator that anticommutes with the current head; the
    two become a pair and every remaining g is replaced by
    g · g1^{f(g,g2)} · g2^{f(g,g1)} (f the symplectic product), which restores
    commutation with the extracted pair. Operator products are XORs of the
    symplectic parts, so pure-X/pure-Z types survive the update.

    Returns:
        (pairs, commuting): each pair anticommutes internally and commutes
        with everything else returned; `commuting` operators mutually commute.
    """
    remaining = list(ops)
    pairs = []
    commuting = []
    while remaining:
        g1 = remaining.pop(0)
        partner_idx = None
        for i, g in enumerate(remaining):
            if symplectic_product(g1, g):
                partner_idx = i
                break
        if partner_idx is None:
            commuting.append(g1)
            continue
        g2 = remaining.pop(partner_idx)
        updated = []
        for g in remaining:
            if symplectic_product(g, g2):
                g = g * g1
            if symplectic_product(g, g1):
                g = g * g2
            updated.append(g)
        remaining = updated
        pairs.append((g1, g2))
    return pairs, commuting


def logical_operators(Hz: BitMatrix, Hx: BitMatrix) -> Tuple[BitMatrix, BitMatrix]:
    """Extract k symplectically paired logical operators.

    Candidates are the full normalizer generators: Z-type ops supported on
    ker(Hx) and X-type ops supported on ker(Hz). Running sgsop over them
    (Z-type block first — the order fixes the canonical basis) yields k
    mixed-type pairs; stabilizer directions are exactly the leftover
    commuting block.

    Returns:
        (logical_x, logical_z): k×n support matrices with
        <logical_z[i], logical_x[j]> = δ_ij.
    """
    n = Hz.cols
    z_candidates = kernel_basis(Hx)  # Z-type supports commute with all X checks
    x_candidates = kernel_basis(Hz)
    zero = BitVector(n)
    ops = [SymplecticOp(z_candidates.row(i), zero) for i in range(z_candidates.rows)]
    ops += [SymplecticOp(zero, x_candidates.row(i)) for i in range(x_candidates.rows)]
    pairs, _ = sgsop(ops)
    lx_rows = []
    lz_rows = []
    for g1, g2 in pairs:
        # With the Z block listed first, g1 is Z-type and g2 X-type; assert
        # rather than assume, since sgsop itself is type-agnostic.
        if not g1.x_part.is_zero() or not g2.z_part.is_zero():
            raise AssertionError("sgsop returned a mixed-type pair")
        lz_rows.append(g1.z_part)
        lx_rows.append(g2.x_part)
    if lx_rows:
        return BitMatrix.from_rows(lx_rows), BitMatrix.from_rows(lz_rows)
    return BitMatrix(n, ()), BitMatrix(n, ())


def new_css(Hz: BitMatrix, Hx: BitMatrix) -> CssCode:
    """Validate a check pair and derive the full CssCode structure.

    Raises:
        CommutationViolation: some X row and Z row overlap oddly (reports the
            first offending pair in row-major scan order).
        ValueError: mismatched widths or n < 1.
    Warns:
        EmptyCodeWarning: the pair is valid but encodes k = 0 qubits.
    """
    if Hz.cols != Hx.cols:
        raise ValueError(f"Hz has {Hz.cols} columns, Hx has {Hx.cols}")
    n = Hz.cols
    if n < 1:
        raise ValueError("a code needs at least one qubit")
    for i, xbits in enumerate(Hx.row_bits):
        for j, zbits in enumerate(Hz.row_bits):
            if (xbits & zbits).bit_count() & 1:
                raise CommutationViolation(i, j)
    Rz, pz = row_reduce(Hz)
    Rx, px = row_reduce(Hx)
    rank_z, rank_x = len(pz), len(px)
    k = n - rank_x - rank_z
    if k == 0:
        warnings.warn("check pair encodes zero logical qubits", EmptyCodeWarning)
    lx, lz = logical_operators(Hz, Hx)
    if lx.rows != k:
        raise AssertionError(f"expected {k} logical pairs, extracted {lx.rows}")
    return CssCode(
        n=n,
        Hz=Hz,
        Hx=Hx,
        rank_z=rank_z,
        rank_x=rank_x,
        k=k,
        Dx=Hx.rows - rank_x,
        Dz=Hz.rows - rank_z,
        logical_x=lx,
        logical_z=lz,
        Hz_red=BitMatrix(n, Rz.row_bits[:rank_z]),
        Hx_red=BitMatrix(n, Rx.row_bits[:rank_x]),
    )


def sector_of(code: CssCode, ex: BitVector, ez: BitVector) -> SectorKey:
    """Full sector label of an error pair (pure, total)."""
    if ex.n != code.n or ez.n != code.n:
        raise ValueError("error length does not match qubit count")
    return SectorKey(
        a=code.syndrome_x(ez),
        b=code.syndrome_z(ex),
        kx=code.logical_parities_x(ez),
        kz=code.logical_parities_z(ex),
    )


def representative_x(code: CssCode, b: BitVector, kz: BitVector) -> BitVector:
    """Canonical X-error with syndrome b and logical parities kz.

    Lift b through the RREF pivots (put bit b_j on pivot column j: unit
    columns of the reduced checks make this an exact solve with free
    variables zero), then XOR in logical_x rows until the kz parities match.
    Deterministic; any other representative differs by an X-stabilizer.
    """
    if b.n != code.rank_z or kz.n != code.k:
        raise ValueError("sector label widths do not match the code")
    _, pivots = row_reduce(code.Hz)
    e0 = 0
    for j, pc in enumerate(pivots):
        if b[j]:
            e0 |= 1 << pc
    e = BitVector(code.n, e0)
    kz0 = code.logical_parities_z(e)
    diff = kz ^ kz0
    for i in range(code.k):
        if diff[i]:
            e = e ^ code.logical_x.row(i)
    return e


def representative_z(code: CssCode, a: BitVector, kx: BitVector) -> BitVector:
    """Mirror of representative_x for Z-errors (syndrome a, parities kx)."""
    if a.n != code.rank_x or kx.n != code.k:
        raise ValueError("sector label widths do not match the code")
    _, pivots = row_reduce(code.Hx)
    e0 = 0
    for j, pc in enumerate(pivots):
        if a[j]:
            e0 |= 1 << pc
    e = BitVector(code.n, e0)
    kx0 = code.logical_parities_x(e)
    diff = kx ^ kx0
    for i in range(code.k):
        if diff[i]:
            e = e ^ code.logical_z.row(i)
    return e


def _min_weight_coset(logicals: BitMatrix, stabilizers: BitMatrix, n: int) -> int:
    """Min weight over (nonzero logical combos) ⊕ (all stabilizer combos)."""
    k = logicals.rows
    r = stabilizers.rows
    if k == 0:
        raise ValueError("no logical operators; distance undefined")
    if n <= 63:
        # Vectorized: all 2^r stabilizer elements once, then XOR each logical
        # combo in and take the min popcount.
        stab = np.zeros(1, dtype=np.uint64)
        for i in range(r):
            stab = np.concatenate([stab, stab ^ np.uint64(stabilizers.row_bits[i])])
        best = n + 1
        for combo in range(1, 1 << k):
            acc = 0
            for i in range(k):
                if (combo >> i) & 1:
                    acc ^= logicals.row_bits[i]
            w = int(np.bitwise_count(stab ^ np.uint64(acc)).min())
            best = min(best, w)
        return best
    # Wide-code fallback on Python ints (sizes here are small in practice).
    stab_elems = [0]
    for i in range(r):
        stab_elems += [s ^ stabilizers.row_bits[i] for s in stab_elems]
    best = n + 1
    for combo in range(1, 1 << k):
        acc = 0
        for i in range(k):
            if (combo >> i) & 1:
                acc ^= logicals.row_bits[i]
        for s in stab_elems:
            w = (s ^ acc).bit_count()
            if w < best:
                best = w
    return best


def distance(code: CssCode) -> Tuple[int, int]:
    """(dx, dz) by exhaustive coset search.

    dz = min weight over ker(Hx) \\ rowspace(Hz): the lightest Z-type logical;
    dx mirrors with the roles swapped. Enumerates (2^k − 1)·2^rank cosets, so
    both kernel dimensions must be ≤ 24.

    Raises:
        TooLarge: a kernel dimension exceeds 24.
    """
    dim_ker_hx = code.n - code.rank_x
    dim_ker_hz = code.n - code.rank_z
    if dim_ker_hx > 24 or dim_ker_hz > 24:
        raise TooLarge(
            f"distance enumeration needs kernel dims <= 24 "
            f"(got {dim_ker_hx} and {dim_ker_hz})"
        )
    dz = _min_weight_coset(code.logical_z, row_space_basis(code.Hz), code.n)
    dx = _min_weight_coset(code.logical_x, row_space_basis(code.Hx), code.n)
    return dx, dz


def with_logical_basis(code: CssCode, logical_x: BitMatrix, logical_z: BitMatrix) -> CssCode:
    """The same code with a replacement logical basis, fully re-validated.

    The replacement must satisfy every logical-operator invariant: rows in the
    right kernels, symplectic pairing δ_ij, and no row inside the matching
    stabilizer row space. Used to demonstrate basis independence of derived
    quantities.
    """
    if logical_x.rows != code.k or logical_z.rows != code.k:
        raise ValueError("logical basis must have exactly k rows per type")
    for i in range(code.k):
        if not matvec(code.Hz, logical_x.row(i)).is_zero():
            raise ValueError(f"logical_x[{i}] anticommutes with a Z check")
        if not matvec(code.Hx, logical_z.row(i)).is_zero():
            raise ValueError(f"logical_z[{i}] anticommutes with an X check")
        for j in range(code.k):
            if dot(logical_z.row(i), logical_x.row(j)) != (1 if i == j else 0):
                raise ValueError("symplectic pairing is not the identity")
    if gf2_rank(code.Hx.vstack(logical_x)) != code.rank_x + code.k:
        raise ValueError("an X logical lies in the X stabilizer row space")
    if gf2_rank(code.Hz.vstack(logical_z)) != code.rank_z + code.k:
        raise ValueError("a Z logical lies in the Z stabilizer row space")
    return CssCode(
        n=code.n,
        Hz=code.Hz,
        Hx=code.Hx,
        rank_z=code.rank_z,
        rank_x=code.rank_x,
        k=code.k,
        Dx=code.Dx,
        Dz=code.Dz,
        logical_x=logical_x,
        logical_z=logical_z,
        Hz_red=code.Hz_red,
        Hx_red=code.Hx_red,
    )


# ---------------------------------------------------------------------------
# Code file format (css-code v1)
# ---------------------------------------------------------------------------

def to_text(code: CssCode) -> str:
    """Serialize to the css-code v1 line format (deterministic, byte-exact)."""
    lines = [
        "css-code v1",
        f"n {code.n}",
        f"Hz {code.Hz.rows}",
        *code.Hz.to01_lines(),
        f"Hx {code.Hx.rows}",
        *code.Hx.to01_lines(),
    ]
    return "\n".join(lines) + "\n"


def code_hash(code: CssCode) -> str:
    """Short content hash of the canonical file form, for provenance lines."""
    return hashlib.sha256(to_text(code).encode("ascii")).hexdigest()[:12]


def _parse_count(line_no: int, line: str, keyword: str) -> int:
    parts = line.split(" ")
    if len(parts) != 2 or parts[0] != keyword:
        raise CodeFormatError(line_no, f"expected '{keyword} <int>', got {line!r}")
    try:
        value = int(parts[1])
    except ValueError:
        raise CodeFormatError(line_no, f"expected an integer, got {parts[1]!r}")
    if value < 0 or parts[1] != str(value):
        raise CodeFormatError(line_no, f"invalid count {parts[1]!r}")
    return value


def from_text(text: str) -> CssCode:
    """Parse the css-code v1 format; rejects any stray characters.

    Raises:
        CodeFormatError: with the offending 1-based line number.
        CommutationViolation: the parsed pair is not a valid CSS code.
    """
    if text.endswith("\n"):
        text = text[:-1]
    lines = text.split("\n")
    pos = 0

    def next_line() -> str:
        nonlocal pos
        if pos >= len(lines):
            raise CodeFormatError(len(lines) + 1, "unexpected end of file")
        pos += 1
        return lines[pos - 1]

    header = next_line()
    if header != "css-code v1":
        raise CodeFormatError(1, f"expected 'css-code v1', got {header!r}")
    n = _parse_count(pos + 1, next_line(), "n")
    if n < 1:
        raise CodeFormatError(pos, "n must be >= 1")

    def read_block(keyword: str) -> BitMatrix:
        count = _parse_count(pos + 1, next_line(), keyword)
        rows = []
        for _ in range(count):
            line = next_line()
            if len(line) != n or any(c not in "01" for c in line):
                raise CodeFormatError(pos, f"expected {n} chars of 0/1, got {line!r}")
            rows.append(line)
        return BitMatrix.from01(rows, cols=n)

    hz = read_block("Hz")
    hx = read_block("Hx")
    if pos != len(lines):
        raise CodeFormatError(pos + 1, f"trailing content {lines[pos]!r}")
    return new_css(hz, hx)
