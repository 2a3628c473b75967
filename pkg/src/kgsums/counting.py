"""Exact counting of reciprocal-sum and product congruence solutions.

Counts the 2r-tuples from {x <= K : gcd(x, q) = 1} whose r-fold inverse
sums (or r-fold products) agree mod q, plus the integer-equation analogues
over [1, K] without a modulus.  All arithmetic is exact: the fold tables
hold machine integers while provably below the int64 overflow line and fall
back to Python big-int dictionaries otherwise; final tallies are Python
ints.  Exhaustive tuple enumeration is kept alongside every folded route as
an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ResourceLimit
from .modmath import Modulus, inverse_table

#: exhaustive oracles refuse beyond this many tuple comparisons
EXHAUSTIVE_TUPLE_CAP = 10**8

#: folded (convolution) route caps
CONVOLUTION_Q_CAP = 10**6
CONVOLUTION_R_CAP = 4

#: equation counters refuse beyond this many enumerated r-tuples
EQUATION_TUPLE_CAP = 2 * 10**7

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class CountTable:
    """Dense distribution of r-fold sums or products over residues mod q.

    ``counts[s]`` is the number of r-tuples folding to residue s; the total
    mass is always base_size ** depth.
    """

    modulus: Modulus
    counts: tuple[int, ...]
    depth: int
    base_size: int

    def total(self) -> int:
        return sum(self.counts)

    def check_mass(self) -> bool:
        return self.total() == self.base_size**self.depth


def _admissible(q: Modulus, K: int) -> list[int]:
    if not 1 <= K <= q.q:
        raise ValueError(f"K must lie in [1, q] = [1, {q.q}], got {K}")
    return [x for x in range(1, K + 1) if math.gcd(x, q.q) == 1]


def _fold_additive(q: int, base: list[int], r: int) -> list[int]:
    """Counts of r-fold sums of ``base`` residues mod q, exact."""
    if max(len(base), 1) ** r < _INT64_SAFE:
        v = np.zeros(q, dtype=np.int64)
        for s in base:
            v[s % q] += 1
        acc = v.copy()
        for _ in range(r - 1):
            nxt = np.zeros(q, dtype=np.int64)
            for s in base:
                nxt += np.roll(acc, s % q)
            acc = nxt
        return [int(c) for c in acc]
    acc_d: dict[int, int] = {}
    for s in base:
        acc_d[s % q] = acc_d.get(s % q, 0) + 1
    start = dict(acc_d)
    for _ in range(r - 1):
        nxt_d: dict[int, int] = {}
        for t, c in acc_d.items():
            for s in start:
                u = (t + s) % q
                nxt_d[u] = nxt_d.get(u, 0) + c * start[s]
        acc_d = nxt_d
    return [acc_d.get(t, 0) for t in range(q)]


def _fold_multiplicative(q: int, base: list[int], r: int) -> list[int]:
    """Counts of r-fold products of ``base`` residues mod q, exact."""
    idx = np.arange(q, dtype=np.int64)
    if max(len(base), 1) ** r < _INT64_SAFE:
        v = np.zeros(q, dtype=np.int64)
        for s in base:
            v[s % q] += 1
        acc = v.copy()
        for _ in range(r - 1):
            nxt = np.zeros(q, dtype=np.int64)
            for s in base:
                # s is a unit, so multiplication by s permutes residues
                nxt[idx * (s % q) % q] += acc
            acc = nxt
        return [int(c) for c in acc]
    acc_d: dict[int, int] = {}
    for s in base:
        acc_d[s % q] = acc_d.get(s % q, 0) + 1
    start = dict(acc_d)
    for _ in range(r - 1):
        nxt_d: dict[int, int] = {}
        for t, c in acc_d.items():
            for s in start:
                u = t * s % q
                nxt_d[u] = nxt_d.get(u, 0) + c * start[s]
        acc_d = nxt_d
    return [acc_d.get(t, 0) for t in range(q)]


def _check_convolution_caps(q: Modulus, r: int) -> None:
    if q.q > CONVOLUTION_Q_CAP or r > CONVOLUTION_R_CAP:
        raise ResourceLimit(
            f"convolution route capped at q <= {CONVOLUTION_Q_CAP}, "
            f"r <= {CONVOLUTION_R_CAP}; got q = {q.q}, r = {r}"
        )


def _exhaustive_pair_count(vals: np.ndarray, q: int, r: int, additive: bool) -> int:
    """Literal 2r-tuple enumeration: fold r-tuples directly, compare all pairs."""
    n = int(vals.size)
    if n**(2 * r) > EXHAUSTIVE_TUPLE_CAP:
        raise ResourceLimit(
            f"exhaustive oracle needs {n ** (2 * r)} tuple comparisons, "
            f"cap is {EXHAUSTIVE_TUPLE_CAP}"
        )
    folded = vals.copy()
    for _ in range(r - 1):
        if additive:
            folded = (folded[:, None] + vals[None, :]).reshape(-1) % q
        else:
            folded = (folded[:, None] * vals[None, :]).reshape(-1) % q
    total = 0
    chunk = max(1, 10**7 // max(folded.size, 1))
    for start in range(0, folded.size, chunk):
        block = folded[start : start + chunk]
        total += int(np.sum(block[:, None] == folded[None, :]))
    return total


def reciprocal_table(q: "Modulus | int", K: int, r: int) -> CountTable:
    """Distribution of r-fold inverse sums of admissible x <= K."""
    mod = Modulus.of(q)
    base = _admissible(mod, K)
    inv = inverse_table(mod)
    residues = [int(inv[x]) for x in base]
    counts = _fold_additive(mod.q, residues, r) if base else [0] * mod.q
    return CountTable(modulus=mod, counts=tuple(counts), depth=r, base_size=len(base))


def product_table(q: "Modulus | int", K: int, r: int) -> CountTable:
    """Distribution of r-fold products of admissible x <= K."""
    mod = Modulus.of(q)
    base = _admissible(mod, K)
    counts = _fold_multiplicative(mod.q, base, r) if base else [0] * mod.q
    return CountTable(modulus=mod, counts=tuple(counts), depth=r, base_size=len(base))


def jr_congruence(q: "Modulus | int", K: int, r: int, method: str = "convolution") -> int:
    """Solutions of 1/x_1 + .. + 1/x_r = 1/x_{r+1} + .. + 1/x_{2r} mod q
    with 1 <= x_i <= K and gcd(x_i, q) = 1 (inverses require coprimality).
    """
    mod = Modulus.of(q)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    base = _admissible(mod, K)
    if method == "convolution":
        _check_convolution_caps(mod, r)
        table = reciprocal_table(mod, K, r)
        return sum(c * c for c in table.counts)
    if method == "exhaustive":
        if not base:
            return 0
        inv = inverse_table(mod)
        vals = np.array([int(inv[x]) for x in base], dtype=np.int64)
        return _exhaustive_pair_count(vals, mod.q, r, additive=True)
    raise ValueError(f"method must be 'convolution' or 'exhaustive', got {method!r}")


def rr_congruence(q: "Modulus | int", K: int, r: int, method: str = "convolution") -> int:
    """Solutions of x_1 * .. * x_r = x_{r+1} * .. * x_{2r} mod q with
    1 <= x_i <= K and gcd(x_i, q) = 1.
    """
    mod = Modulus.of(q)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    base = _admissible(mod, K)
    if method == "convolution":
        _check_convolution_caps(mod, r)
        table = product_table(mod, K, r)
        return sum(c * c for c in table.counts)
    if method == "exhaustive":
        if not base:
            return 0
        vals = np.array(base, dtype=np.int64)
        return _exhaustive_pair_count(vals, mod.q, r, additive=False)
    raise ValueError(f"method must be 'convolution' or 'exhaustive', got {method!r}")


def jr_equation(K: int, r: int) -> int:
    """Solutions of the reciprocal-sum equation over the integers [1, K].

    Sums 1/x are scaled by lcm(1..K) so every value is an exact integer;
    the count is the sum of squared multiplicities of the r-fold sums.
    """
    if K < 1 or r < 1:
        raise ValueError("K and r must be >= 1")
    if K**r > EQUATION_TUPLE_CAP:
        raise ResourceLimit(f"K^r = {K ** r} exceeds cap {EQUATION_TUPLE_CAP}")
    L = math.lcm(*range(1, K + 1))
    scaled = [L // x for x in range(1, K + 1)]
    if r * L < _INT64_SAFE:
        vals = np.array(scaled, dtype=np.int64)
        folded = vals.copy()
        for _ in range(r - 1):
            folded = (folded[:, None] + vals[None, :]).reshape(-1)
        _, counts = np.unique(folded, return_counts=True)
        return int(sum(int(c) * int(c) for c in counts))
    # big-integer fold via dict accumulation (tighter cap: big ints are wide)
    if K**r > EQUATION_TUPLE_CAP // 10:
        raise ResourceLimit(
            f"big-integer equation path capped at K^r <= {EQUATION_TUPLE_CAP // 10}"
        )
    acc: dict[int, int] = {0: 1}
    for _ in range(r):
        nxt: dict[int, int] = {}
        for s, c in acc.items():
            for w in scaled:
                t = s + w
                nxt[t] = nxt.get(t, 0) + c
        acc = nxt
    return sum(c * c for c in acc.values())


def rr_equation(K: int, r: int) -> int:
    """Solutions of x_1..x_r = x_{r+1}..x_{2r} over the integers [1, K]."""
    if K < 1 or r < 1:
        raise ValueError("K and r must be >= 1")
    if K**r > EQUATION_TUPLE_CAP:
        raise ResourceLimit(f"K^r = {K ** r} exceeds cap {EQUATION_TUPLE_CAP}")
    if K**r < _INT64_SAFE:
        vals = np.arange(1, K + 1, dtype=np.int64)
        folded = vals.copy()
        for _ in range(r - 1):
            folded = (folded[:, None] * vals[None, :]).reshape(-1)
        _, counts = np.unique(folded, return_counts=True)
        return int(sum(int(c) * int(c) for c in counts))
    if K**r > EQUATION_TUPLE_CAP // 10:
        raise ResourceLimit(
            f"big-integer equation path capped at K^r <= {EQUATION_TUPLE_CAP // 10}"
        )
    acc: dict[int, int] = {1: 1}
    for _ in range(r):
        nxt: dict[int, int] = {}
        for s, c in acc.items():
            for x in range(1, K + 1):
                t = s * x
                nxt[t] = nxt.get(t, 0) + c
        acc = nxt
    return sum(c * c for c in acc.values())


def dyadic_average(
    Q: int, K: int, r: int, kind: str = "reciprocal"
) -> tuple[Fraction, dict[int, int]]:
    """Per-q counts over q in [Q, 2Q] and their (1/Q)-normalized mean.

    ``kind`` selects reciprocal-sum or product congruences.  The per-q map
    is returned in full so exceptional moduli can be inspected.
    """
    if kind not in ("reciprocal", "product"):
        raise ValueError(f"kind must be 'reciprocal' or 'product', got {kind!r}")
    if not 1 <= K <= Q:
        raise ValueError(f"need 1 <= K <= Q, got K = {K}, Q = {Q}")
    counter = jr_congruence if kind == "reciprocal" else rr_congruence
    per_q = {q: counter(q, K, r, method="convolution") for q in range(Q, 2 * Q + 1)}
    mean = Fraction(sum(per_q.values()), Q)
    return mean, per_q


def j2_reference_ratio(q: "Modulus | int", K: int) -> float:
    """Observed J_2(q; K) divided by K^(7/2) q^(-1/2) + K^2.

    Used by the regression grid; only frozen baselines are asserted since
    the comparison formula carries an unspecified sub-polynomial factor.
    """
    mod = Modulus.of(q)
    count = jr_congruence(mod, K, 2, method="convolution")
    return count / (K**3.5 / math.sqrt(mod.q) + K**2)
