"""Weighted bilinear forms over Kloosterman and Gauss sums.

The double sum over (weight support) x (interval) admits three routes:

* ``naive``       - literal double sum calling the scalar sum per pair.
                    O(M * N * phi(q)); capped, exists purely as an oracle.
* ``transformed`` - swap summation order and substitute x -> x^-1, giving
                    sum_x f(x^-1) * gamma_x with f(t) = sum_m alpha_m e_q(mt)
                    and gamma_x the closed-form geometric interval sum.
                    O(phi(q) * M).
* ``fast``        - same shape, but f is one length-q DFT of the dense
                    weight vector followed by the inversion permutation.
                    O(q log q + q).

All routes return a :class:`SumResult` and must agree within the sum of
their error bounds; the cross-check is enforced by the experiment harness
and the test suite.  Evaluation is pure and sequential with numpy's
deterministic pairwise reduction, so results are reproducible bit for bit;
the x-loop partitions cleanly (see the dyadic decomposition) if a caller
wants to parallelize by range.

The interval sums gamma_x are localized by a dyadic-scale partition of the
unit representatives in (-q/2, q/2]; on scale i the magnitude of gamma_x is
at most C * exp(-i) * N with the documented constant C = e * pi / 2 (the
tight constant is e/2 for i >= 1 and 1 for i = 0; the larger C keeps one
uniform, empirically asserted value).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DomainRestriction,
    InvalidWeight,
    ModulusMismatch,
    ResourceLimit,
)
from .expsums import (
    DirichletCharacter,
    SumResult,
    char_values,
    gauss,
    kloosterman,
    _sum_terms,
)
from .modmath import (
    MACHINE_EPS,
    TWO_PI,
    Modulus,
    inverse_table,
    unit_residues,
)
from .prng import SplitMix64

#: documented uniform constant in |gamma_x| <= GAMMA_SCALE_C * exp(-i) * N
GAMMA_SCALE_C = math.e * math.pi / 2

#: naive double-sum oracle cap on M * N * phi(q)
NAIVE_COST_CAP = 10**9

#: exhaustive moment-identity enumeration cap on |X|^(2r)
MOMENT_TUPLE_CAP = 10**8


@dataclass(frozen=True)
class Interval:
    """Block of N consecutive integers {L+1, ..., L+N} inside [1, q-1]."""

    L: int
    N: int
    modulus: Modulus

    def __post_init__(self):
        q = self.modulus.q
        if self.N < 1:
            raise ValueError(f"interval length must be >= 1, got {self.N}")
        if self.L < 0 or self.L + self.N > q - 1:
            raise ValueError(
                f"interval [{self.L + 1}, {self.L + self.N}] not inside [1, {q - 1}]"
            )

    @classmethod
    def of(cls, q: "Modulus | int", L: int, N: int) -> "Interval":
        return cls(L=L, N=N, modulus=Modulus.of(q))

    def values(self) -> range:
        return range(self.L + 1, self.L + self.N + 1)


def _norms(values: Iterable[complex]) -> tuple[float, float, float]:
    mags = [abs(v) for v in values]
    if not mags:
        return 0.0, 0.0, 0.0
    return float(math.fsum(mags)), math.sqrt(math.fsum(m * m for m in mags)), max(mags)


@dataclass(frozen=True)
class WeightVector:
    """Sparse complex weights on residues coprime to q.

    Keys are reduced mod q and must be units; exact-zero values are dropped
    so the stored support is the true support.  Treat instances as
    immutable.
    """

    modulus: Modulus
    entries: dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        q = self.modulus.q
        clean: dict[int, complex] = {}
        for m, a in self.entries.items():
            r = int(m) % q
            g = math.gcd(r, q)
            if g != 1:
                raise InvalidWeight(
                    f"weight key {m} is not a unit mod {q} (gcd = {g})"
                )
            a = complex(a)
            if a != 0:
                clean[r] = clean.get(r, 0j) + a
        object.__setattr__(self, "entries", clean)

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def norm1(self) -> float:
        return _norms(self.entries.values())[0]

    @property
    def norm2(self) -> float:
        return _norms(self.entries.values())[1]

    @property
    def norm_inf(self) -> float:
        return _norms(self.entries.values())[2]

    def support(self) -> np.ndarray:
        return np.array(sorted(self.entries), dtype=np.int64)

    def coefficients(self) -> np.ndarray:
        return np.array([self.entries[m] for m in sorted(self.entries)], dtype=np.complex128)

    def scaled(self, c: complex) -> "WeightVector":
        return WeightVector(self.modulus, {m: c * a for m, a in self.entries.items()})

    def __add__(self, other: "WeightVector") -> "WeightVector":
        if other.modulus.q != self.modulus.q:
            raise ModulusMismatch("cannot add weight vectors with different moduli")
        merged = dict(self.entries)
        for m, a in other.entries.items():
            merged[m] = merged.get(m, 0j) + a
        return WeightVector(self.modulus, merged)


@dataclass(frozen=True)
class CharWeightVector:
    """Sparse complex weights on primitive characters mod q."""

    modulus: Modulus
    entries: dict[DirichletCharacter, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[DirichletCharacter, complex] = {}
        for chi, w in self.entries.items():
            if chi.modulus.q != self.modulus.q:
                raise ModulusMismatch(
                    f"character modulus {chi.modulus.q} != {self.modulus.q}"
                )
            if not chi.is_primitive:
                raise InvalidWeight(
                    f"character with conductor {chi.conductor} < {self.modulus.q} "
                    "cannot carry weight"
                )
            w = complex(w)
            if w != 0:
                clean[chi] = clean.get(chi, 0j) + w
        object.__setattr__(self, "entries", clean)

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def norm1(self) -> float:
        return _norms(self.entries.values())[0]

    @property
    def norm2(self) -> float:
        return _norms(self.entries.values())[1]

    @property
    def norm_inf(self) -> float:
        return _norms(self.entries.values())[2]


WEIGHT_KINDS = ("const", "pm1", "unit", "zero")


def make_weights(keys: list, kind: str, seed: int) -> list[complex]:
    """Deterministic weight values for the given ordered keys.

    Kinds: ``const`` (all 1), ``pm1`` (random signs), ``unit`` (random
    points on the unit circle), ``zero`` (all 0, for trivial-case tests).
    Values are drawn sequentially in key order from one SplitMix64 stream
    seeded with ``seed``, so every run is reproducible cross-platform.
    """
    if kind not in WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind {kind!r}; expected one of {WEIGHT_KINDS}")
    rng = SplitMix64(seed)
    out: list[complex] = []
    for _ in keys:
        if kind == "const":
            out.append(1.0 + 0j)
        elif kind == "pm1":
            out.append(complex(rng.sign(), 0.0))
        elif kind == "unit":
            out.append(cmath.exp(complex(0.0, TWO_PI * rng.uniform01())))
        else:
            out.append(0j)
    return out


# ---------------------------------------------------------------------------
# Interval sums gamma_x and the dyadic-scale partition
# ---------------------------------------------------------------------------


#: per-value rounding budget multiplier: |computed - exact| <= this * eps * N
GAMMA_EVAL_ERR = 32.0


def gamma_sum(J: Interval, x: int) -> complex:
    """Closed-form geometric sum of e_q(n*x) over n in J.

    Magnitude satisfies |gamma_x| <= min(N, q / (2 * dist_q(x))) by the
    sine bound sin(pi*t) >= 2*t on [0, 1/2].

    All angles are exact integer multiples of pi/q, reduced symmetrically
    mod 2q against the symmetric representative of x, so every trig
    argument lies in (-pi, pi] and the rounding error stays below
    GAMMA_EVAL_ERR * eps * N uniformly in x (an unreduced phase N*x*pi/q
    would lose ~eps*q*N near x = q).
    """
    q = J.modulus.q
    r = x % q
    if r == 0:
        raise DomainRestriction("gamma_sum is undefined for x = 0 mod q")
    if 2 * r > q:
        r -= q  # symmetric representative in (-q/2, q/2]

    def sym2q(v: int) -> int:  # reduce into (-q, q] so angles stay in (-pi, pi]
        t = v % (2 * q)
        return t - 2 * q if t > q else t

    num_t = sym2q(J.N * r)
    phase_t = sym2q((2 * J.L + J.N + 1) * r)
    ratio = math.sin(math.pi * num_t / q) / math.sin(math.pi * r / q)
    return cmath.exp(complex(0.0, math.pi * phase_t / q)) * ratio


def _gamma_over_units(J: Interval) -> np.ndarray:
    """gamma_x for every unit x, aligned with unit_residues(q).

    Same reduced-angle evaluation as :func:`gamma_sum`.
    """
    q = J.modulus.q
    xs = unit_residues(J.modulus).astype(np.int64)
    r = np.where(2 * xs > q, xs - q, xs)

    def sym2q(v: np.ndarray) -> np.ndarray:
        t = v % (2 * q)
        return np.where(t > q, t - 2 * q, t)

    num_t = sym2q(J.N * r)
    phase_t = sym2q((2 * J.L + J.N + 1) * r)
    ratio = np.sin(np.pi * num_t / q) / np.sin(np.pi * r / q)
    return np.exp(1j * np.pi * phase_t / q) * ratio


@dataclass(frozen=True)
class DyadicSet:
    """Integers at one signed dyadic scale of the representative range.

    Scale 0 holds 0 < +/-x <= q/N; scale i >= 1 holds
    e^(i-1)*q/N < +/-x <= min(q/2, e^i*q/N).  Members are restricted to the
    representative range (-q/2, q/2], the lower bound is strict (boundary
    points belong to the higher scale), and all integers in range are kept,
    units or not.
    """

    index: int
    sign: str  # "+" or "-"
    members: tuple[int, ...]


def dyadic_partition(q: "Modulus | int", N: int) -> list[DyadicSet]:
    """All dyadic sets for scales i = 0..ceil(log(N/2)), both signs.

    The signed sets tile (-q/2, q/2] minus zero, so every unit
    representative lands in exactly one set.
    """
    mod = Modulus.of(q)
    if not 1 <= N <= mod.q - 1:
        raise ValueError(f"N must lie in [1, {mod.q - 1}], got {N}")
    I = max(0, math.ceil(math.log(N / 2.0))) if N >= 2 else 0
    half = mod.q / 2.0
    bounds = [mod.q / N]
    for i in range(1, I + 1):
        bounds.append(math.exp(i) * mod.q / N)
    out: list[DyadicSet] = []
    lo = 0.0
    for i in range(I + 1):
        hi = min(bounds[i], half)
        lo_int = math.floor(lo)  # strict lower bound: members start at lo_int + 1
        hi_int = math.floor(hi)
        pos = tuple(range(lo_int + 1, hi_int + 1))
        neg = tuple(-x for x in reversed(pos) if 2 * x != mod.q)
        out.append(DyadicSet(index=i, sign="+", members=pos))
        out.append(DyadicSet(index=i, sign="-", members=neg))
        lo = bounds[i]
    return out


def representative(x: int, q: "Modulus | int") -> int:
    """The representative of x mod q in (-q/2, q/2]."""
    mod = Modulus.of(q)
    r = x % mod.q
    return r if 2 * r <= mod.q else r - mod.q


# ---------------------------------------------------------------------------
# Bilinear evaluation paths
# ---------------------------------------------------------------------------

_KLOOSTERMAN_METHODS = ("naive", "transformed", "fast")
_GAUSS_METHODS = ("naive", "transformed")

_X_BLOCK = 4096  # row block for the transformed inner product


def _check_shared_modulus(weights, J: Interval) -> Modulus:
    if weights.modulus.q != J.modulus.q:
        raise ModulusMismatch(
            f"weights mod {weights.modulus.q} but interval mod {J.modulus.q}"
        )
    return J.modulus


def _inner_exp_sums(q: int, targets: np.ndarray, ms: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """f(t) = sum_m alpha_m e_q(m t) for each t in targets, blockwise."""
    out = np.empty(targets.shape, dtype=np.complex128)
    for start in range(0, targets.size, _X_BLOCK):
        block = targets[start : start + _X_BLOCK]
        phases = block[:, None] * ms[None, :] % q
        out[start : start + block.size] = np.exp(2j * np.pi * phases / q) @ alphas
    return out


def _transformed_sum(A: WeightVector, J: Interval, inv_power: int) -> SumResult:
    """sum over units x of f((x^-1)^k) * gamma_x with direct inner sums."""
    mod = _check_shared_modulus(A, J)
    q = mod.q
    xs = unit_residues(mod)
    inv = inverse_table(mod)
    if inv_power == 1:
        targets = inv[xs]
    else:
        targets = np.array([pow(int(t), inv_power, q) for t in inv[xs]], dtype=np.int64)
    ms = A.support()
    alphas = A.coefficients()
    f_vals = _inner_exp_sums(q, targets, ms, alphas)
    gam = _gamma_over_units(J)
    outer = _sum_terms(f_vals * gam)
    # propagate inner rounding: each f value carries (M + 4) eps * ||A||_1,
    # each gamma value GAMMA_EVAL_ERR * eps * N
    l1A = A.norm1
    err_inner = float(
        (ms.size + 4) * MACHINE_EPS * l1A * np.sum(np.abs(gam))
        + GAMMA_EVAL_ERR * MACHINE_EPS * J.N * np.sum(np.abs(f_vals))
    )
    return SumResult(
        value=outer.value,
        error_bound=outer.error_bound + err_inner,
        terms=outer.terms,
    )


def _fast_sum(A: WeightVector, J: Interval) -> SumResult:
    """Transformed route with the inner sums done by one length-q DFT."""
    mod = _check_shared_modulus(A, J)
    q = mod.q
    xs = unit_residues(mod)
    inv = inverse_table(mod)
    dense = np.zeros(q, dtype=np.complex128)
    ms = A.support()
    dense[ms] = A.coefficients()
    f_all = q * np.fft.ifft(dense)  # f_all[t] = sum_m alpha_m e_q(m t)
    gam = _gamma_over_units(J)
    f_vals = f_all[inv[xs]]
    outer = _sum_terms(f_vals * gam)
    l1A = A.norm1
    fft_entry_err = (4.0 * math.log2(max(q, 2)) + 8.0) * MACHINE_EPS * l1A
    err_inner = float(
        fft_entry_err * np.sum(np.abs(gam))
        + GAMMA_EVAL_ERR * MACHINE_EPS * J.N * np.sum(np.abs(f_vals))
    )
    return SumResult(
        value=outer.value,
        error_bound=outer.error_bound + err_inner,
        terms=outer.terms,
    )


def _naive_kloosterman(A: WeightVector, J: Interval) -> SumResult:
    mod = _check_shared_modulus(A, J)
    cost = A.support_size * J.N * mod.phi
    if cost > NAIVE_COST_CAP:
        raise ResourceLimit(
            f"naive double sum cost M*N*phi = {cost} exceeds cap {NAIVE_COST_CAP}"
        )
    total = 0j
    err = 0.0
    l1 = 0.0
    count = 0
    for m in sorted(A.entries):
        a = A.entries[m]
        for n in J.values():
            k = kloosterman(mod, m, n)
            term = a * k.value
            total += term
            err += abs(a) * k.error_bound
            l1 += abs(term)
            count += 1
    return SumResult(
        value=total,
        error_bound=err + (count + 4) * MACHINE_EPS * l1,
        terms=count,
    )


def bilinear_kloosterman(A: WeightVector, J: Interval, method: str = "fast") -> SumResult:
    """Weighted double sum of Kloosterman values over supp(A) x J."""
    if method not in _KLOOSTERMAN_METHODS:
        raise ValueError(f"method must be one of {_KLOOSTERMAN_METHODS}, got {method!r}")
    _check_shared_modulus(A, J)
    if A.support_size == 0:
        return SumResult(value=0j, error_bound=0.0, terms=0)
    if method == "naive":
        return _naive_kloosterman(A, J)
    if method == "transformed":
        return _transformed_sum(A, J, inv_power=1)
    return _fast_sum(A, J)


def bilinear_generalized(A: WeightVector, J: Interval, k: int) -> SumResult:
    """Bilinear form with kernel e_q(m * x^-k + n * x), transformed route.

    k = 1 reduces to :func:`bilinear_kloosterman`'s transformed path.
    """
    if k < 1:
        raise ValueError(f"kernel power k must be >= 1, got {k}")
    _check_shared_modulus(A, J)
    if A.support_size == 0:
        return SumResult(value=0j, error_bound=0.0, terms=0)
    return _transformed_sum(A, J, inv_power=k)


def _naive_gauss(W: CharWeightVector, J: Interval) -> SumResult:
    mod = _check_shared_modulus(W, J)
    cost = W.support_size * J.N * mod.phi
    if cost > NAIVE_COST_CAP:
        raise ResourceLimit(
            f"naive double sum cost M*N*phi = {cost} exceeds cap {NAIVE_COST_CAP}"
        )
    total = 0j
    err = 0.0
    l1 = 0.0
    count = 0
    for chi in sorted(W.entries, key=lambda c: c.exponents):
        w = W.entries[chi]
        for n in J.values():
            g = gauss(mod, chi, n)
            term = w * g.value
            total += term
            err += abs(w) * g.error_bound
            l1 += abs(term)
            count += 1
    return SumResult(
        value=total,
        error_bound=err + (count + 4) * MACHINE_EPS * l1,
        terms=count,
    )


def bilinear_gauss(W: CharWeightVector, J: Interval, method: str = "transformed") -> SumResult:
    """Weighted double sum of Gauss sums over supp(W) x J.

    The transformed route evaluates sum_x (sum_chi w_chi chi(x)) * gamma_x;
    no inversion permutation appears because the character already sits on
    the summation variable.
    """
    if method not in _GAUSS_METHODS:
        raise ValueError(f"method must be one of {_GAUSS_METHODS}, got {method!r}")
    mod = _check_shared_modulus(W, J)
    if W.support_size == 0:
        return SumResult(value=0j, error_bound=0.0, terms=0)
    if method == "naive":
        return _naive_gauss(W, J)
    combined = np.zeros(mod.q, dtype=np.complex128)
    for chi in sorted(W.entries, key=lambda c: c.exponents):
        combined += W.entries[chi] * char_values(chi)
    xs = unit_residues(mod)
    gam = _gamma_over_units(J)
    c_vals = combined[xs]
    outer = _sum_terms(c_vals * gam)
    err_inner = float(
        (W.support_size + 4) * MACHINE_EPS * W.norm1 * np.sum(np.abs(gam))
        + GAMMA_EVAL_ERR * MACHINE_EPS * J.N * np.sum(np.abs(c_vals))
    )
    return SumResult(
        value=outer.value,
        error_bound=outer.error_bound + err_inner,
        terms=outer.terms,
    )


# ---------------------------------------------------------------------------
# Moment identity
# ---------------------------------------------------------------------------


def moment_check(
    q: "Modulus | int",
    X: Iterable[int],
    gamma: Mapping[int, complex],
    r: int,
    method: str = "auto",
) -> tuple[float, float]:
    """Both sides of the exact 2r-th moment identity over the full ring.

    lhs = sum over all residues m of |sum_{x in X} gamma_x e_q(m x^-1)|^(2r);
    rhs = q * sum over 2r-tuples from X whose first-r and last-r inverse sums
    agree mod q of the product gamma_{x_1}..gamma_{x_r} *
    conj(gamma_{x_{r+1}}..gamma_{x_2r}), real part.  With m ranging over the
    whole ring this is an equality, which makes it a sharp cross-check of
    the transformed machinery.

    ``method`` selects the rhs route: ``exhaustive`` enumerates all
    |X|^(2r) tuples (capped), ``convolution`` folds the gamma-weighted
    inverse indicator r times; ``auto`` picks by size.
    """
    mod = Modulus.of(q)
    if r < 1:
        raise ValueError(f"moment order r must be >= 1, got {r}")
    xs = sorted({int(x) % mod.q for x in X})
    for x in xs:
        if math.gcd(x, mod.q) != 1:
            raise DomainRestriction(f"moment_check requires X inside Z_{mod.q}^*")
    if not xs:
        return 0.0, 0.0
    g = np.array([complex(gamma[x]) for x in xs], dtype=np.complex128)
    inv = inverse_table(mod)
    xbars = inv[np.array(xs, dtype=np.int64)]

    m_all = np.arange(mod.q, dtype=np.int64)
    phases = m_all[:, None] * xbars[None, :] % mod.q
    inner = np.exp(2j * np.pi * phases / mod.q) @ g
    lhs = float(np.sum(np.abs(inner) ** (2 * r)))

    n_tuples = len(xs) ** (2 * r)
    if method == "auto":
        method = "exhaustive" if n_tuples <= 250_000 else "convolution"
    if method == "exhaustive":
        if n_tuples > MOMENT_TUPLE_CAP:
            raise ResourceLimit(
                f"|X|^(2r) = {n_tuples} exceeds exhaustive cap {MOMENT_TUPLE_CAP}"
            )
        sums = xbars.astype(np.int64)
        prods = g.copy()
        for _ in range(r - 1):
            sums = (sums[:, None] + xbars[None, :]).reshape(-1) % mod.q
            prods = (prods[:, None] * g[None, :]).reshape(-1)
        match = (sums[:, None] - sums[None, :]) % mod.q == 0
        rhs_c = mod.q * np.sum(match * (prods[:, None] * np.conj(prods)[None, :]))
        rhs = float(rhs_c.real)
    elif method == "convolution":
        h = np.zeros(mod.q, dtype=np.complex128)
        for xb, gv in zip(xbars, g):
            h[xb] += gv
        H = h.copy()
        for _ in range(r - 1):
            full = np.convolve(H, h)
            H = full[: mod.q].copy()
            H[: full.size - mod.q] += full[mod.q :]
        rhs = float(mod.q * np.sum(np.abs(H) ** 2))
    else:
        raise ValueError(f"unknown moment method {method!r}")
    return lhs, rhs


# ---------------------------------------------------------------------------
# Dyadic decomposition of the transformed sum
# ---------------------------------------------------------------------------


def dyadic_decomposition(
    A: WeightVector, J: Interval
) -> tuple[list[DyadicSet], list[complex], complex, bool]:
    """Per-scale partial sums of the transformed route plus an exact check.

    The transformed summands f(x^-1) * gamma_x are computed once; each unit
    is routed to its dyadic set by representative, and both the per-set
    partials and the total are accumulated in exact rational arithmetic over
    those float summands.  Reassembly (sum of partials == total) is then an
    exact identity, not a floating-point coincidence; the returned flag
    reports it.

    Returns (sets, partial_sums, total, exact_equal).
    """
    mod = _check_shared_modulus(A, J)
    q = mod.q
    xs = unit_residues(mod)
    inv = inverse_table(mod)
    ms = A.support()
    alphas = A.coefficients()
    if ms.size:
        f_vals = _inner_exp_sums(q, inv[xs], ms, alphas)
    else:
        f_vals = np.zeros(xs.shape, dtype=np.complex128)
    gam = _gamma_over_units(J)
    terms = f_vals * gam

    sets = dyadic_partition(mod, J.N)
    by_member: dict[int, int] = {}
    for idx, ds in enumerate(sets):
        for x in ds.members:
            by_member[x % q] = idx

    partial_re = [Fraction(0)] * len(sets)
    partial_im = [Fraction(0)] * len(sets)
    total_re, total_im = Fraction(0), Fraction(0)
    covered = 0
    for x, t in zip(xs, terms):
        idx = by_member.get(int(x))
        re, im = Fraction(float(t.real)), Fraction(float(t.imag))
        total_re += re
        total_im += im
        if idx is not None:
            partial_re[idx] += re
            partial_im[idx] += im
            covered += 1
    exact = (
        covered == xs.size
        and sum(partial_re, Fraction(0)) == total_re
        and sum(partial_im, Fraction(0)) == total_im
    )
    partials = [
        complex(float(pr), float(pi)) for pr, pi in zip(partial_re, partial_im)
    ]
    total = complex(float(total_re), float(total_im))
    return sets, partials, total, exact
