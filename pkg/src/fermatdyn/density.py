"""Prime selections, coprime sieves, and multi-index density bounds.

All inequalities here are evaluated in exact rational arithmetic; floats
appear only when a report is rendered.  The machinery mirrors a sieve
argument: pick consecutive primes until the product of (1 - 1/p) dips
under eps/(4n), assemble a starting multi-index M0 from per-prime
witnesses, and bound the density of the complement of an upward-stable
index set inside a growing box.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .points import MultiIndex
from .primes import factorize, primes_from

__all__ = [
    "PrimeSelection",
    "SigmaOracle",
    "M0Witness",
    "DensityReport",
    "choose_primes",
    "coprime_count",
    "coprime_count_bound",
    "assemble_M0",
    "complement_bound",
    "lemma_thresholds",
    "chain_inequality_holds",
    "claim1_spot_check",
    "empirical_density",
    "gcd_pattern_oracle",
    "shifted_oracle",
]

_SELECTION_CAP = 200000


class SelectionInfeasibleError(ValueError):
    """The greedy prime selection would not fit in desk-scale memory."""


@dataclass(frozen=True)
class PrimeSelection:
    """Consecutive primes >= p0 with prod(1 - 1/p) <= epsilon/(4 arity)."""

    epsilon: Fraction
    arity: int
    floor: int
    primes: tuple[int, ...]
    product: Fraction

    @property
    def modulus(self) -> int:
        """e = p_1 ... p_l."""
        return math.prod(self.primes)

    def target(self) -> Fraction:
        return self.epsilon / (4 * self.arity)

    def to_json(self) -> dict:
        return {
            "epsilon": _frac_json(self.epsilon),
            "arity": self.arity,
            "floor": self.floor,
            "primes": list(self.primes),
            "product": _frac_json(self.product),
            "modulus": str(self.modulus),
        }


def _frac_json(q: Fraction) -> dict:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def choose_primes(epsilon: Fraction | int | str, n: int, p0: int) -> PrimeSelection:
    """Greedy consecutive primes from the first prime >= p0.

    Terminates because the harmonic sum over primes diverges; rejects
    epsilon outside (0, 1] and selections beyond desk scale.
    """
    eps = Fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if n < 1 or p0 < 2:
        raise ValueError("need arity >= 1 and p0 >= 2")
    target = eps / (4 * n)
    chosen: list[int] = []
    product = Fraction(1)
    for p in primes_from(p0):
        chosen.append(p)
        product *= Fraction(p - 1, p)
        if product <= target:
            return PrimeSelection(eps, n, p0, tuple(chosen), product)
        if len(chosen) >= _SELECTION_CAP:
            raise SelectionInfeasibleError(
                f"selection for epsilon={eps} needs more than "
                f"{_SELECTION_CAP} primes")
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# coprime sieve


def _count_coprime(m: int, primes: Sequence[int]) -> int:
    """#{1 <= i <= m : no prime of the list divides i}, by inclusion-exclusion."""
    if m <= 0:
        return 0
    total = m
    for k, p in enumerate(primes):
        q = m // p
        if q:
            total -= _count_coprime(q, primes[k + 1:])
    return total


def coprime_count(m: int, e: int) -> int:
    """Exact #{1 <= i <= m : gcd(i, e) = 1} for squarefree e."""
    if m < 0 or e < 1:
        raise ValueError("need m >= 0 and e >= 1")
    fac = factorize(e)
    if any(v > 1 for v in fac.values()):
        raise ValueError(f"{e} is not squarefree")
    return _count_coprime(m, sorted(fac))


def coprime_count_bound(m: int, selection: PrimeSelection) -> Fraction:
    """prod(1 - 1/p_j) * (m + e), an upper bound for coprime_count."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return selection.product * (m + selection.modulus)


# ---------------------------------------------------------------------------
# oracles and M0 assembly


@dataclass(frozen=True)
class SigmaOracle:
    """Decidable index set with witnesses M_Q for prime multi-indices Q.

    Contract: for every prime Q with min Q >= p0 and every M >= witness(Q),
    Q * M belongs to the set.  Synthetic generators below honor it by
    construction; spot checks exercise it.
    """

    arity: int
    p0: int
    member: Callable[[MultiIndex], bool]
    witness: Callable[[MultiIndex], MultiIndex]
    description: str = ""


class IncompleteOracleError(ValueError):
    """Oracle lacks a witness for a required prime multi-index."""


def gcd_pattern_oracle(n: int, primes: Sequence[int]) -> SigmaOracle:
    """All I with gcd(I(i), p_1...p_l) != 1 for every i; witnesses are 1s.

    Honors the witness contract for prime indices drawn from the listed
    primes (which is what the M0 assembly consumes).
    """
    ps = tuple(sorted(set(primes)))
    e = math.prod(ps)
    ones = MultiIndex((1,) * n)

    def member(i: MultiIndex) -> bool:
        return all(math.gcd(i(k + 1), e) != 1 for k in range(n))

    def witness(q: MultiIndex) -> MultiIndex:
        if any(entry not in ps for entry in q.entries):
            raise IncompleteOracleError(f"no witness for prime index {q}")
        return ones

    return SigmaOracle(n, min(ps), member, witness,
                       description=f"gcd-pattern mod {e}")


def shifted_oracle(n: int, p0: int, shifts: Sequence[int]) -> SigmaOracle:
    """All I with I(i) >= shift_i and some prime factor >= p0 in each entry.

    Valid for every prime Q with min Q >= p0: any multiple Q(i)*M(i) at or
    above the shift keeps the prime factor Q(i) >= p0.
    """
    if len(shifts) != n:
        raise ValueError("one shift per component required")
    sh = tuple(int(s) for s in shifts)

    def has_large_factor(v: int) -> bool:
        for p in range(2, p0):
            while v % p == 0:
                v //= p
        return v > 1

    def member(i: MultiIndex) -> bool:
        return all(i(k + 1) >= sh[k] and has_large_factor(i(k + 1))
                   for k in range(n))

    def witness(q: MultiIndex) -> MultiIndex:
        if q.min_entry() < p0 or not q.is_prime_index():
            raise IncompleteOracleError(f"no witness for {q}")
        return MultiIndex(tuple(max(1, -(-s // q(k + 1)))
                                for k, s in enumerate(sh)))

    return SigmaOracle(n, p0, member, witness,
                       description=f"shifted to {sh}, prime floor {p0}")


@dataclass(frozen=True)
class M0Witness:
    """M0 = sum over Q in primes^n of Q * M_Q, componentwise."""

    m0: MultiIndex
    terms: int

    def to_json(self) -> dict:
        return {"m0": self.m0.to_json(), "terms": self.terms}


def assemble_M0(oracle: SigmaOracle, selection: PrimeSelection) -> M0Witness:
    if oracle.arity != selection.arity:
        raise ValueError("oracle and selection arity differ")
    n = oracle.arity
    total = [0] * n
    count = 0
    for combo in itertools.product(selection.primes, repeat=n):
        q = MultiIndex(combo)
        mq = oracle.witness(q)
        count += 1
        for k in range(n):
            total[k] += combo[k] * mq(k + 1)
    return M0Witness(MultiIndex(tuple(total)), count)


def claim1_spot_check(oracle: SigmaOracle, selection: PrimeSelection,
                      m0: M0Witness, trials: int, seed: int = 0) -> int:
    """Random I >= M0 with every entry sharing a factor with e must be members.

    Returns the number of failures (0 on success)."""
    rng = random.Random(seed)
    n = oracle.arity
    failures = 0
    for _ in range(trials):
        entries = []
        for k in range(n):
            p = rng.choice(selection.primes)
            lo = -(-m0.m0(k + 1) // p)
            entries.append(p * rng.randint(lo, lo + 50))
        if not oracle.member(MultiIndex(tuple(entries))):
            failures += 1
    return failures


# ---------------------------------------------------------------------------
# the complement bound and its thresholds


def complement_bound(box: Sequence[int], m0: MultiIndex,
                     selection: PrimeSelection) -> Fraction:
    """sum (a_i - 1)/m_i + prod(1 - 1/p_j) * sum (m_i + e)/m_i, exactly."""
    if len(box) != m0.arity:
        raise ValueError("box arity mismatch")
    if any(m < a for m, a in zip(box, m0.entries)):
        raise ValueError("box must dominate M0 componentwise")
    e = selection.modulus
    first = sum(Fraction(a - 1, m) for m, a in zip(box, m0.entries))
    second = selection.product * sum(Fraction(m + e, m) for m in box)
    return first + second


def lemma_thresholds(selection: PrimeSelection, m0: MultiIndex) -> tuple[int, ...]:
    """Minimal b_i with (a_i - 1)/b_i <= eps/(2n) and e/b_i <= eps."""
    eps = selection.epsilon
    n = selection.arity
    e = selection.modulus
    out = []
    for a in m0.entries:
        b1 = -(-((a - 1) * 2 * n * eps.denominator) // eps.numerator) if a > 1 else 1
        b2 = -(-(e * eps.denominator) // eps.numerator)
        out.append(max(1, b1, b2))
    return tuple(out)


def chain_inequality_holds(epsilon: Fraction | int | str) -> bool:
    """eps/2 + (eps/4)(1 + eps) <= eps, the lemma's closing arithmetic."""
    eps = Fraction(epsilon)
    return eps / 2 + (eps / 4) * (1 + eps) <= eps


# ---------------------------------------------------------------------------
# densities over boxes


@dataclass(frozen=True)
class DensityReport:
    box: tuple[int, ...]
    start: tuple[int, ...]
    member_count: int
    complement_count: int
    density: Fraction
    bound: Optional[Fraction] = None
    bound_holds: Optional[bool] = None
    m0: Optional[MultiIndex] = None
    thresholds: Optional[tuple[int, ...]] = None
    per_index: Optional[tuple[dict, ...]] = None

    def to_json(self) -> dict:
        out: dict = {
            "box": list(self.box),
            "start": list(self.start),
            "member_count": self.member_count,
            "complement_count": self.complement_count,
            "density": _frac_json(self.density),
        }
        if self.bound is not None:
            out["complement_bound"] = _frac_json(self.bound)
            out["bound_holds"] = self.bound_holds
        if self.m0 is not None:
            out["m0"] = self.m0.to_json()
        if self.thresholds is not None:
            out["thresholds"] = list(self.thresholds)
        if self.per_index is not None:
            out["per_index"] = list(self.per_index)
        return out


def empirical_density(member: Callable[[MultiIndex], bool],
                      box: Sequence[int],
                      start: Optional[Sequence[int]] = None,
                      selection: Optional[PrimeSelection] = None,
                      m0: Optional[MultiIndex] = None,
                      collect: Optional[Callable[[MultiIndex, bool], dict]] = None,
                      ) -> DensityReport:
    """Exact member/complement counts of a decidable set over a box.

    With a selection and M0 given (and the box starting at 1 and dominating
    M0), the exact complement count is checked against the sieve bound
    times the box volume.
    """
    box = tuple(int(m) for m in box)
    n = len(box)
    lo = tuple(int(s) for s in start) if start is not None else (1,) * n
    if any(l < 1 or l > m for l, m in zip(lo, box)):
        raise ValueError("box must contain its starting corner")
    members = 0
    volume = 1
    details: list[dict] = []
    for m, l in zip(box, lo):
        volume *= m - l + 1
    for combo in itertools.product(*[range(l, m + 1) for l, m in zip(lo, box)]):
        idx = MultiIndex(combo)
        inside = member(idx)
        members += inside
        if collect is not None:
            details.append(collect(idx, inside))
    complement = volume - members
    density = Fraction(members, volume)

    bound = holds = None
    if selection is not None and m0 is not None and lo == (1,) * n:
        bound = complement_bound(box, m0, selection)
        holds = Fraction(complement, volume) <= bound
    return DensityReport(
        box=box, start=lo, member_count=members, complement_count=complement,
        density=density, bound=bound, bound_holds=holds, m0=m0,
        thresholds=lemma_thresholds(selection, m0) if selection and m0 else None,
        per_index=tuple(details) if collect is not None else None)
