"""Entropic quantities and optimal-decoder success from sector tables.

Everything here is a pure function of exact SectorDistribution tables. All
entropies are in bits, so the noiseless limits are integers: the coherent
information runs from +k (perfect channel) down to −k (maximally mixed), and
the distinguishability of two logical sectors is +infinity at zero noise.

Conventions for degenerate terms: 0·log(0/x) = 0, and a positive numerator
over a zero denominator marks the whole sum as +infinity (returned as
math.inf; serialization layers tag it rather than emitting float specials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .channels import (
    MODE_JOINT,
    MODE_X,
    MODE_Z,
    SectorDistribution,
    marginalize,
)
from .css import SectorKey
from .gf2 import BitVector

# Inequalities below hold exactly in exact arithmetic; this absolute slack
# covers pure rounding from sums of up to 2^26 doubles.
BOUND_SLACK = 1e-10

FactorizedPair = Tuple[SectorDistribution, SectorDistribution]
DistOrPair = Union[SectorDistribution, FactorizedPair]


@dataclass(frozen=True)
class InfoResult:
    """A scalar information quantity in bits, with its context echoed."""

    value: float
    k: int
    noise: Dict[str, float] = field(default_factory=dict)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


def _conditional_term(dist: SectorDistribution, syndrome_field: str) -> float:
    """Σ P·log2(P / P_syndrome) — minus the conditional logical entropy."""
    syn = marginalize(dist, [syndrome_field])
    acc = 0.0
    for key, p in dist.table.items():
        if p <= 0.0:
            continue
        p_syn = syn.table[SectorKey(**{syndrome_field: getattr(key, syndrome_field)})]
        acc += p * math.log2(p / p_syn)
    return acc


def coherent_information_factorized(
    dist_x: SectorDistribution, dist_z: SectorDistribution, k: int
) -> InfoResult:
    """Coherent information in bits for independent X/Z noise.

    value = k + Σ_(a,kx) P·log2(P/P_a) + Σ_(b,kz) P·log2(P/P_b); each sum is
    minus a conditional entropy, so the result lies in [−k, k], equals k at
    zero noise and −k at px = pz = 1/2.
    """
    if dist_x.mode != MODE_X:
        raise ValueError(f"dist_x must be {MODE_X}, got {dist_x.mode}")
    if dist_z.mode != MODE_Z:
        raise ValueError(f"dist_z must be {MODE_Z}, got {dist_z.mode}")
    if dist_x.code_hash != dist_z.code_hash:
        raise ValueError("dist_x and dist_z come from different codes")
    value = (
        k
        + _conditional_term(dist_z, "a")
        + _conditional_term(dist_x, "b")
    )
    noise = {**dist_x.noise, **dist_z.noise}
    return InfoResult(value=value, k=k, noise=noise)


def coherent_information_general(dist: SectorDistribution, k: int) -> InfoResult:
    """Coherent information in bits from a joint (correlated-species) table.

    value = k + Σ P·log2(P / P_(a,b)) with the syndrome marginal taken over
    both logical labels. Reduces to the factorized form when the table is a
    product.
    """
    if dist.mode != MODE_JOINT:
        raise ValueError(f"dist must be {MODE_JOINT}, got {dist.mode}")
    syn = marginalize(dist, ["a", "b"])
    acc = 0.0
    for key, p in dist.table.items():
        if p <= 0.0:
            continue
        p_syn = syn.table[SectorKey(a=key.a, b=key.b)]
        acc += p * math.log2(p / p_syn)
    return InfoResult(value=k + acc, k=k, noise=dict(dist.noise))


def relative_entropy(
    dist_x: SectorDistribution, k0: BitVector, k0p: BitVector
) -> InfoResult:
    """Relative entropy (bits) between the sectors of two logical labels.

    value = Σ_(b,kz) P(b, kz⊕k0) · log2[P(b, kz⊕k0) / P(b, kz⊕k0p)], which
    depends on (k0, k0p) only through the shift k0⊕k0p. Returns +infinity
    when some shifted sector has positive mass where its partner has none
    (orthogonal sectors — always the case at zero noise).
    """
    if dist_x.mode != MODE_X:
        raise ValueError(f"dist_x must be {MODE_X}, got {dist_x.mode}")
    shift = k0 ^ k0p
    noise = dict(dist_x.noise)
    if shift.is_zero():
        return InfoResult(value=0.0, k=dist_x.k, noise=noise)
    acc = 0.0
    for key, p in dist_x.table.items():
        if p <= 0.0:
            continue
        partner = dist_x.table[SectorKey(b=key.b, kz=key.kz ^ shift)]
        if partner <= 0.0:
            return InfoResult(value=math.inf, k=dist_x.k, noise=noise)
        acc += p * math.log2(p / partner)
    return InfoResult(value=acc, k=dist_x.k, noise=noise)


def _syndrome_and_logical_fields(dist: SectorDistribution):
    syndromes = [f for f in ("a", "b") if f in dist.widths]
    logicals = [f for f in ("kx", "kz") if f in dist.widths]
    return syndromes, logicals


def _grouped_by_syndrome(dist: SectorDistribution):
    """Iterate sectors grouped by syndrome, in canonical table order."""
    syndromes, _ = _syndrome_and_logical_fields(dist)
    groups: Dict[tuple, List[float]] = {}
    for key, p in dist.table.items():
        gk = tuple(getattr(key, f) for f in syndromes)
        groups.setdefault(gk, []).append(p)
    return groups


def ml_success(dist: SectorDistribution) -> float:
    """Success probability of the most-likely-sector decoder.

    Σ over syndromes of the largest sector probability. On a factorized
    single side this is the per-side success; multiply the two sides for the
    total (bound_report does).
    """
    return math.fsum(max(ps) for ps in _grouped_by_syndrome(dist).values())


def sampling_success(dist: SectorDistribution) -> float:
    """Success probability of the posterior-sampling decoder.

    Σ P² / P_syndrome — the chance that an error and an independent sample
    from the same posterior share a sector. Never exceeds ml_success.
    """
    total = 0.0
    for ps in _grouped_by_syndrome(dist).values():
        p_syn = math.fsum(ps)
        if p_syn > 0.0:
            total += math.fsum(p * p / p_syn for p in ps)
    return total


@dataclass(frozen=True)
class BoundReport:
    """The decoder/entropy inequality chain evaluated at one noise point."""

    ic_bits: float
    jensen_lower: float  # 2^(ic_bits − k)
    sampling: float
    ml: float
    appendix_lower: float  # 2·ml − 1
    violations: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def bound_report(dist: DistOrPair, k: int) -> BoundReport:
    """Evaluate ic, decoder successes, and their inequality chain.

    Args:
        dist: a joint SectorDistribution, or a (dist_x, dist_z) pair for
            factorized noise (both sides are needed for the coherent
            information, and the per-side successes multiply).
        k: logical qubit count.

    Checks 2·ml − 1 ≤ sampling ≤ ml ≤ 1 and 2^(ic−k) ≤ sampling ≤ 1 plus
    |ic| ≤ k, reporting violations as flags instead of raising, so sweeps can
    use this as a property harness.
    """
    if isinstance(dist, SectorDistribution):
        ic = coherent_information_general(dist, k).value
        ml = ml_success(dist)
        samp = sampling_success(dist)
    else:
        dist_x, dist_z = dist
        ic = coherent_information_factorized(dist_x, dist_z, k).value
        ml = ml_success(dist_x) * ml_success(dist_z)
        samp = sampling_success(dist_x) * sampling_success(dist_z)
    jensen = 2.0 ** (ic - k)
    lower = 2.0 * ml - 1.0
    violations = []
    if not -k - BOUND_SLACK <= ic <= k + BOUND_SLACK:
        violations.append(f"ic_bits {ic} outside [-k, k]")
    if ml > 1.0 + BOUND_SLACK:
        violations.append(f"ml {ml} exceeds 1")
    if samp > ml + BOUND_SLACK:
        violations.append(f"sampling {samp} exceeds ml {ml}")
    if jensen > samp + BOUND_SLACK:
        violations.append(f"jensen lower bound {jensen} exceeds sampling {samp}")
    if lower > samp + BOUND_SLACK:
        violations.append(f"2·ml − 1 = {lower} exceeds sampling {samp}")
    return BoundReport(
        ic_bits=ic,
        jensen_lower=jensen,
        sampling=samp,
        ml=ml,
        appendix_lower=lower,
        violations=tuple(violations),
    )


# ---------------------------------------------------------------------------
# Sweep rows (shared by the CLI and tests)
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = (
    "p_x",
    "p_z",
    "ic_bits",
    "ml_success",
    "sampling_success",
    "jensen_lower",
    "rel_entropy_bits",
)


def format_cell(value: float) -> str:
    """CSV cell: repr-exact floats, with the literal 'inf' for infinity."""
    if math.isinf(value):
        return "inf"
    return repr(float(value))
