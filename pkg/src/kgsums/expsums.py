"""Complete Kloosterman sums, Dirichlet characters, and Gauss sums.

Two evaluation routes exist for each family: a direct summation over the
unit group and a DFT-based row evaluation.  The direct route is the
correctness anchor; the row route is gated by entrywise agreement with it.

Error accounting
----------------
Every scalar sum is returned as a :class:`SumResult` whose ``error_bound``
uses the fixed formula

    error_bound = (terms + 4) * MACHINE_EPS * sum_i |a_i|

where the a_i are the summands.  Each summand is a unit-modulus exponential
scaled by a weight and is computed to within ~4 eps relative error; naive or
pairwise accumulation of ``terms`` values adds at most terms * eps * L1
since every partial sum is bounded by L1 = sum |a_i|.  Sums of 1024 or more
terms are accumulated with exactly rounded compensated summation
(math.fsum), which only tightens the true error; the reported bound keeps
the uniform formula.
"""

from __future__ import annotations

import cmath
import itertools
import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import DomainRestriction
from .modmath import (
    MACHINE_EPS,
    TWO_PI,
    Modulus,
    inverse_table,
    unit_group,
    unit_mask,
    unit_residues,
)

_COMPENSATED_THRESHOLD = 1024

_lock = threading.Lock()
_char_table_cache: dict[int, "_CharTables"] = {}


@dataclass(frozen=True)
class SumResult:
    """A complex sum value with its accumulated rounding budget.

    ``error_bound`` follows the documented formula
    (terms + 4) * eps * sum|summands|; it always dominates
    terms * eps * (max partial magnitude) because every partial sum of the
    summands is bounded by their total absolute mass.
    """

    value: complex
    error_bound: float
    terms: int

    def __abs__(self) -> float:
        return abs(self.value)


def _sum_terms(terms: np.ndarray) -> SumResult:
    """Sum an array of complex summands with the documented error bound."""
    n = int(terms.size)
    if n == 0:
        return SumResult(value=0j, error_bound=0.0, terms=0)
    l1 = float(np.sum(np.abs(terms)))
    if n >= _COMPENSATED_THRESHOLD:
        value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    else:
        value = complex(np.sum(terms))
    return SumResult(value=value, error_bound=(n + 4) * MACHINE_EPS * l1, terms=n)


def _unit_angles(q: int, coeff: int, residues: np.ndarray) -> np.ndarray:
    """exp(2*pi*i * coeff*residues / q) with exact integer reduction."""
    red = (coeff % q) * residues % q
    return np.exp(2j * np.pi * red / q)


def kloosterman(q: "Modulus | int", m: int, n: int) -> SumResult:
    """Complete sum of exp(2*pi*i*(m*x + n*x^-1)/q) over units x mod q.

    The value is real up to rounding (terms pair off conjugately under
    x -> -x) but is reported as a complex :class:`SumResult`.
    """
    mod = Modulus.of(q)
    units = unit_residues(mod)
    inv = inverse_table(mod)
    phase = ((m % mod.q) * units + (n % mod.q) * inv[units]) % mod.q
    return _sum_terms(np.exp(2j * np.pi * phase / mod.q))


def kloosterman_row(q: "Modulus | int", n: int) -> np.ndarray:
    """All q values K_q(m, n) for m = 0..q-1 as one complex vector.

    Computed as the length-q inverse DFT of the unit-supported sequence
    x -> exp(2*pi*i*n*x^-1/q); numpy handles arbitrary (mixed-radix)
    lengths, so the cost is O(q log q) for every q.  Entries agree with
    :func:`kloosterman` to within q * 2^-45.
    """
    mod = Modulus.of(q)
    units = unit_residues(mod)
    inv = inverse_table(mod)
    a = np.zeros(mod.q, dtype=np.complex128)
    a[units] = _unit_angles(mod.q, n, inv[units])
    return mod.q * np.fft.ifft(a)


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q in exponent form against the fixed generators.

    ``exponents`` is flattened across the prime-power components in factor
    order; entry j lies in [0, order_j).  The conductor is precomputed at
    construction; the character is primitive exactly when conductor == q.
    """

    modulus: Modulus
    exponents: tuple[int, ...]
    conductor: int

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus.q

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.exponents)

    def __call__(self, x: int) -> complex:
        return char_eval(self, x)


class _CharTables:
    """Per-modulus lookup structure for character evaluation.

    For each flattened generator j, ``exp_arrays[j][x]`` is the exponent of
    that generator in the unit x (garbage at non-units, which are masked).
    ``order_lcm`` is the lcm D of all generator orders and ``weights[j]`` is
    D // order_j, so a character with exponents k has angle numerator
    T(x) = sum_j exp_arrays[j][x] * k_j * weights[j]  (mod D).
    """

    def __init__(self, mod: Modulus):
        self.mod = mod
        q = mod.q
        struct = unit_group(mod)
        self.struct = struct
        self.orders: list[int] = []
        self.exp_arrays: list[np.ndarray] = []
        self.mask = unit_mask(mod)
        self.comp_slices: list[tuple[int, int]] = []  # flat index range per component
        self.comp_locals: list[dict] = []

        flat = 0
        for comp in struct.components:
            pe = comp.prime_power
            n_g = len(comp.generators)
            # enumerate local units as products of generator powers
            pows = []
            for g, o in zip(comp.generators, comp.orders):
                pw = np.empty(o, dtype=np.int64)
                pw[0] = 1
                for a in range(1, o):
                    pw[a] = pw[a - 1] * g % pe
                pows.append(pw)
            res = np.array([1], dtype=np.int64)
            for pw in pows:
                res = (res[:, None] * pw[None, :] % pe).reshape(-1)
            if n_g:
                mesh = np.indices(tuple(comp.orders)).reshape(n_g, -1)
            else:
                mesh = np.zeros((0, 1), dtype=np.int64)
            local_arrays = []
            for j in range(n_g):
                arr = np.zeros(pe, dtype=np.int64)
                arr[res] = mesh[j]
                local_arrays.append(arr)
            x_local = np.arange(q, dtype=np.int64) % pe
            for arr in local_arrays:
                self.exp_arrays.append(arr[x_local])
            self.orders.extend(comp.orders)
            self.comp_slices.append((flat, flat + n_g))
            flat += n_g
            # residues of local units congruent to 1 mod p^c, for conductors
            local_units = np.sort(res)
            unit_sets = []
            for c in range(comp.exponent + 1):
                pc = comp.prime**c
                if pc == 1:
                    unit_sets.append(local_units)  # x = 1 mod 1 holds everywhere
                else:
                    unit_sets.append(local_units[local_units % pc == 1])
            self.comp_locals.append(
                {
                    "pe": pe,
                    "p": comp.prime,
                    "e": comp.exponent,
                    "local_arrays": local_arrays,
                    "unit_sets": unit_sets,
                    "order_lcm": math.lcm(*comp.orders) if comp.orders else 1,
                }
            )
        self.order_lcm = math.lcm(*self.orders) if self.orders else 1
        self.weights = [self.order_lcm // o for o in self.orders]

    def conductor(self, exponents: tuple[int, ...]) -> int:
        cond = 1
        for (lo, hi), info in zip(self.comp_slices, self.comp_locals):
            ks = exponents[lo:hi]
            d_local = info["order_lcm"]
            orders = self.orders[lo:hi]
            c_min = info["e"]
            for c in range(info["e"] + 1):
                us = info["unit_sets"][c]
                t = np.zeros(us.shape, dtype=np.int64)
                for arr, k, o in zip(info["local_arrays"], ks, orders):
                    t += arr[us] * (k * (d_local // o))
                if np.all(t % d_local == 0):
                    c_min = c
                    break
            cond *= info["p"] ** c_min
        return cond

    def angle_numerators(self, exponents: tuple[int, ...]) -> np.ndarray:
        """T(x) over [0, q): character angle numerators mod order_lcm."""
        t = np.zeros(self.mod.q, dtype=np.int64)
        for arr, k, w in zip(self.exp_arrays, exponents, self.weights):
            t += arr * (k * w)
        return t % self.order_lcm


def _char_tables(q: "Modulus | int") -> _CharTables:
    mod = Modulus.of(q)
    with _lock:
        cached = _char_table_cache.get(mod.q)
    if cached is not None:
        return cached
    tables = _CharTables(mod)
    with _lock:
        _char_table_cache.setdefault(mod.q, tables)
    return tables


def character(q: "Modulus | int", exponents: tuple[int, ...]) -> DirichletCharacter:
    """Build the character with the given exponent tuple (validated)."""
    mod = Modulus.of(q)
    tables = _char_tables(mod)
    exponents = tuple(int(k) for k in exponents)
    if len(exponents) != len(tables.orders):
        raise ValueError(
            f"expected {len(tables.orders)} exponents for q={mod.q}, got {len(exponents)}"
        )
    for k, o in zip(exponents, tables.orders):
        if not 0 <= k < o:
            raise ValueError(f"exponent {k} outside [0, {o})")
    return DirichletCharacter(
        modulus=mod, exponents=exponents, conductor=tables.conductor(exponents)
    )


def characters(q: "Modulus | int") -> Iterator[DirichletCharacter]:
    """All phi(q) characters mod q, in lexicographic exponent order."""
    mod = Modulus.of(q)
    tables = _char_tables(mod)
    ranges = [range(o) for o in tables.orders]
    for exps in itertools.product(*ranges):
        yield DirichletCharacter(
            modulus=mod, exponents=exps, conductor=tables.conductor(exps)
        )


def primitive_characters(q: "Modulus | int") -> list[DirichletCharacter]:
    """The subset of characters with conductor q, in enumeration order."""
    return [chi for chi in characters(q) if chi.is_primitive]


@lru_cache(maxsize=2048)
def char_values(chi: DirichletCharacter) -> np.ndarray:
    """chi(x) for x = 0..q-1 as a complex vector (0 at non-units)."""
    tables = _char_tables(chi.modulus)
    t = tables.angle_numerators(chi.exponents)
    vals = np.exp(2j * np.pi * t / tables.order_lcm)
    vals[~tables.mask] = 0.0
    return vals


def char_eval(chi: DirichletCharacter, x: int) -> complex:
    """chi(x): zero at non-units, otherwise the exact root of unity."""
    q = chi.modulus.q
    r = x % q
    if math.gcd(r, q) != 1:
        return 0j
    tables = _char_tables(chi.modulus)
    t = 0
    for arr, k, w in zip(tables.exp_arrays, chi.exponents, tables.weights):
        t += int(arr[r]) * k * w
    t %= tables.order_lcm
    if t == 0:
        return complex(1.0, 0.0)
    return cmath.exp(complex(0.0, TWO_PI * t / tables.order_lcm))


# ---------------------------------------------------------------------------
# Gauss sums
# ---------------------------------------------------------------------------


def gauss(q: "Modulus | int", chi: DirichletCharacter, n: int) -> SumResult:
    """Direct O(phi(q)) evaluation of sum_x chi(x) exp(2*pi*i*n*x/q).

    The twisting relation (for primitive chi and gcd(n, q) = 1 this equals
    conj(chi)(n) times the n = 1 value) is used as a cross-check in tests,
    never as the evaluation path.
    """
    mod = Modulus.of(q)
    if chi.modulus.q != mod.q:
        raise ValueError(f"character modulus {chi.modulus.q} != {mod.q}")
    units = unit_residues(mod)
    vals = char_values(chi)
    terms = vals[units] * _unit_angles(mod.q, n, units)
    return _sum_terms(terms)


def gauss_row(q: "Modulus | int", chi: DirichletCharacter) -> np.ndarray:
    """All q Gauss sum values over n = 0..q-1 via one length-q inverse DFT.

    Entry n agrees with :func:`gauss` within q * 2^-45 (same gate as the
    Kloosterman row).
    """
    mod = Modulus.of(q)
    if chi.modulus.q != mod.q:
        raise ValueError(f"character modulus {chi.modulus.q} != {mod.q}")
    return mod.q * np.fft.ifft(char_values(chi))


def weil_ratio(q: "Modulus | int", m: int, n: int) -> float:
    """|K_q(m, n)| / (2*sqrt(q)) for prime q and unit m, n.

    The 2*sqrt(q) normalization is only asserted for prime modulus; for
    composite q or non-unit arguments a :class:`DomainRestriction` is raised
    (callers wanting composite data should report raw magnitudes instead).
    """
    mod = Modulus.of(q)
    if not mod.is_prime():
        raise DomainRestriction(f"weil_ratio requires a prime modulus, got {mod.q}")
    if math.gcd(m * n, mod.q) != 1:
        raise DomainRestriction(
            f"weil_ratio requires gcd(m*n, q) = 1, got gcd = {math.gcd(m * n, mod.q)}"
        )
    return abs(kloosterman(mod, m, n).value) / (2.0 * math.sqrt(mod.q))
