"""Weight families (a_k, v_k), the integer weights they generate, and the
inequalities those weights satisfy.

Everything that can overflow is carried in the log domain: for the shifted-geometric
family ``omega(-n-1)**2`` passes ``1e308`` well before ``n = 500``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .report import CheckReport

LOG_TINY = -650.0  # below this the linear-domain sum is no longer trustworthy


def _log_sum(log_terms: np.ndarray) -> float:
    """Compensated log-sum-exp: shift by the largest term, then fsum."""
    log_terms = np.asarray(log_terms, dtype=float)
    if log_terms.size == 0:
        return -math.inf
    top = float(np.max(log_terms))
    if top == -math.inf:
        return -math.inf
    scaled = np.sort(np.exp(log_terms - top))[::-1]
    return top + math.log(math.fsum(scaled))


@dataclass(frozen=True)
class FamilyGenerator:
    """Closed-form description of an infinite family, used to extend a
    truncated family on demand (tail masses, indices beyond K)."""

    kind: str  # "shifted-geometric", "geometric" or "one-term"
    a: float
    v1: float = 1.0

    def log_a(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if self.kind == "shifted-geometric":
            return math.log1p(-self.a) + (k - 1) * math.log(self.a)
        if self.kind == "geometric":
            return k * math.log(self.a)
        return np.where(k == 1, math.log(self.a), -np.inf)

    def a_values(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=int)
        if self.kind == "shifted-geometric":
            return (1.0 - self.a) * self.a ** (k - 1).astype(float)
        if self.kind == "geometric":
            return self.a ** k.astype(float)
        return np.where(k == 1, self.a, 0.0)

    def v(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if self.kind == "one-term":
            return np.full_like(k, self.v1)
        return 1.0 / np.log(k + 1.0)

    def log_tail(self, j: int) -> float:
        """log of sum_{k >= j} a_k for the untruncated family."""
        j = max(int(j), 1)
        if self.kind == "shifted-geometric":
            return (j - 1) * math.log(self.a)
        if self.kind == "geometric":
            return j * math.log(self.a) - math.log1p(-self.a)
        return math.log(self.a) if j == 1 else -math.inf

    def first_index_with_v_at_most(self, x: float) -> int | None:
        if self.kind == "one-term":
            return 1 if self.v1 <= x else None
        if x <= 0:
            return None
        k = max(1, math.ceil(math.expm1(1.0 / x)) - 1)
        while k > 1 and 1.0 / math.log(k) <= x:
            k -= 1
        while 1.0 / math.log(k + 1.0) > x:
            k += 1
        return k


@dataclass(frozen=True)
class WeightFamily:
    """Generating data of a weight: masses a_k, heights v_k, cell width alpha.

    ``log_a`` is the source of truth for sums; ``a`` keeps the plain values
    (entries may underflow to 0 for very long families).
    """

    a: np.ndarray
    v: np.ndarray
    alpha: float
    normalized: bool = True
    log_a: np.ndarray | None = None
    generator: FamilyGenerator | None = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        v = np.asarray(self.v, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_a = np.log(a) if self.log_a is None else np.asarray(self.log_a, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "log_a", log_a)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("family is empty")
        if a.shape != v.shape or log_a.shape != a.shape:
            raise ValueError("a and v must have the same length")
        if not np.all(np.isfinite(log_a)) or np.any(a < 0):
            raise ValueError("a_k must be positive")
        if np.any(v <= 0) or not np.all(np.isfinite(v)):
            raise ValueError("v_k must be positive")
        if np.any(np.diff(v) >= 0):
            raise ValueError("v must be strictly decreasing")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be positive")
        if self.normalized and self.log_total() > 1e-15:
            raise ValueError("normalized family requires sum a_k <= 1")

    @property
    def K(self) -> int:
        return int(self.a.size)

    def total(self) -> float:
        return math.fsum(np.sort(self.a)[::-1])

    def log_total(self) -> float:
        return _log_sum(self.log_a)

    def log_tail(self, j: int) -> float:
        """log of sum_{j <= k <= K} a_k (truncated tail, 1-based j)."""
        return _log_sum(self.log_a[max(j, 1) - 1:])

    def log_terms(self, n) -> np.ndarray:
        """log(a_k e^{-2 alpha n v_k}) for each k (rows follow ``n``)."""
        n = np.asarray(n, dtype=float)
        return self.log_a - 2.0 * self.alpha * n[..., None] * self.v


def shifted_geometric(a: float = 0.5, K: int = 64, alpha: float = 1.0) -> WeightFamily:
    """a_k = (1-a) a^{k-1}, v_k = 1/log(k+1)."""
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    gen = FamilyGenerator("shifted-geometric", a)
    k = np.arange(1, K + 1)
    return WeightFamily(gen.a_values(k), gen.v(k), alpha, True, gen.log_a(k), gen)


def geometric(a: float = 0.5, K: int = 64, alpha: float = 1.0) -> WeightFamily:
    """a_k = a^k, v_k = 1/log(k+1); normalized when a <= 1/2."""
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    gen = FamilyGenerator("geometric", a)
    k = np.arange(1, K + 1)
    normalized = a <= 0.5
    return WeightFamily(gen.a_values(k), gen.v(k), alpha, normalized, gen.log_a(k), gen)


def one_term(a1: float = 1.0, v1: float = 1.0, alpha: float = 1.0) -> WeightFamily:
    gen = FamilyGenerator("one-term", a1, v1)
    return WeightFamily(np.array([a1]), np.array([v1]), alpha, a1 <= 1, None, gen)


def explicit(a: Sequence[float], v: Sequence[float], alpha: float) -> WeightFamily:
    return WeightFamily(np.asarray(a, float), np.asarray(v, float), alpha, math.fsum(a) <= 1)


@dataclass(frozen=True)
class WeightSequence:
    """omega(n) on [-N, N], stored as log omega^2(-j) for j = 1..N."""

    alpha: float
    N: int
    log_omega2_neg: np.ndarray  # index j-1 holds log omega^2(-j)
    total: float = 1.0  # sum a_k of the generating family

    def log_omega2(self, n) -> np.ndarray:
        n = np.asarray(n)
        if np.any(n < -self.N):
            raise IndexError(f"index below -{self.N}")
        idx = np.clip(-n - 1, 0, self.N - 1)
        return np.where(n >= 0, 0.0, self.log_omega2_neg[idx])

    def log_omega(self, n) -> np.ndarray:
        return 0.5 * self.log_omega2(n)

    def omega(self, n) -> np.ndarray:
        lo = self.log_omega(n)
        with np.errstate(over="ignore"):
            out = np.exp(lo)
        if not np.all(np.isfinite(out)):
            bad = np.atleast_1d(np.asarray(n))[~np.isfinite(np.atleast_1d(out))]
            raise OverflowError(f"omega overflows double precision at n = {int(bad.max())}")
        return out

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def values(self) -> np.ndarray:
        return self.omega(self.indices)

    @classmethod
    def unit(cls, N: int, alpha: float = 1.0) -> "WeightSequence":
        return cls(alpha, N, np.zeros(N))


def build_weight(family: WeightFamily, N: int) -> WeightSequence:
    """1/omega^2(-n-1) = sum_k a_k e^{-2 alpha n v_k} for 0 <= n < N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    out = np.empty(N)
    for n in range(N):
        decay = np.exp(-2.0 * family.alpha * n * family.v)
        direct = family.a * decay
        top = float(np.max(family.log_terms(n)))
        if top > LOG_TINY:
            s = math.fsum(np.sort(direct)[::-1])
            out[n] = -math.log(s)
        else:
            out[n] = -_log_sum(family.log_terms(n))
    w = WeightSequence(family.alpha, N, out, family.total())
    if np.any(out < -1e-12) and family.normalized:
        raise AssertionError("omega < 1 on a negative index for a normalized family")
    if np.any(np.diff(out) < -1e-12):
        raise AssertionError("omega is not nonincreasing")
    return w


@dataclass(frozen=True)
class StepWeight:
    """Cell values of w on (n alpha, (n+1) alpha), n in [-N, N], in log form.

    Cells are treated as half-open [n alpha, (n+1) alpha) when sampled on a
    grid, so every grid point has a well-defined weight.
    """

    alpha: float
    N: int
    log_cells: np.ndarray  # index n + N

    def log_cell(self, n) -> np.ndarray:
        n = np.asarray(n)
        if np.any(n < -self.N):
            raise IndexError(f"cell index below -{self.N}: weight unknown beyond truncation")
        return np.where(n > self.N, 0.0, self.log_cells[np.clip(n + self.N, 0, 2 * self.N)])

    @property
    def cells(self) -> np.ndarray:
        return np.exp(self.log_cells)

    @classmethod
    def from_weight(cls, omega: WeightSequence, N: int | None = None) -> "StepWeight":
        N = omega.N if N is None else N
        n = np.arange(-N, N + 1)
        return cls(omega.alpha, N, omega.log_omega2(n))

    @classmethod
    def unit(cls, alpha: float, N: int) -> "StepWeight":
        return cls(alpha, N, np.zeros(2 * N + 1))


def submult_constant(family: WeightFamily) -> float:
    return 1.0 + 2.0 * family.total()


def check_submultiplicativity(omega: WeightSequence, C: float, N: int | None = None) -> CheckReport:
    """omega^2(-n-m-1) <= C omega^2(-n-1) omega^2(-m-1) for n+m+1 <= N."""
    N = omega.N if N is None else min(N, omega.N)
    L = np.concatenate([[0.0], omega.log_omega2_neg[:N]])  # L[j] = log omega^2(-j)
    n = np.arange(N)[:, None]
    m = np.arange(N)[None, :]
    valid = n + m + 1 <= N
    j = np.where(valid, n + m + 1, 0)
    log_ratio = np.where(valid, L[j] - math.log(C) - L[n + 1] - L[m + 1], -np.inf)
    worst = np.unravel_index(np.argmax(log_ratio), log_ratio.shape)
    max_ratio = math.exp(float(log_ratio[worst]))
    return CheckReport(
        "submultiplicativity",
        passed=max_ratio <= 1.0 + 1e-12,
        lhs=max_ratio,
        rhs=1.0,
        margin=1.0 - max_ratio,
        witness=(int(worst[0]), int(worst[1])),
        details={"C": C, "N": N, "pairs": int(valid.sum())},
    )


def step_submult_ratio(w: StepWeight, const: float, name: str = "step_submultiplicativity") -> CheckReport:
    """w(t+s) <= const w(t) w(s) over all pairs of cells.

    For t in cell i and s in cell j, t+s sweeps cells i+j and i+j+1; w is
    nonincreasing so cell i+j carries the supremum.
    """
    n = np.arange(-w.N, w.N + 1)
    i = n[:, None]
    j = n[None, :]
    target = i + j
    valid = target >= -w.N
    lw = w.log_cell(np.where(valid, target, 0))
    log_const = math.log(const)
    log_ratio = np.where(valid, lw - log_const - w.log_cell(i) - w.log_cell(j), -np.inf)
    worst = np.unravel_index(np.argmax(log_ratio), log_ratio.shape)
    max_ratio = math.exp(float(log_ratio[worst]))
    return CheckReport(
        name,
        passed=max_ratio <= 1.0 + 1e-12,
        lhs=max_ratio,
        rhs=1.0,
        margin=1.0 - max_ratio,
        witness=(int(n[worst[0]]), int(n[worst[1]])),
        details={"constant": const},
    )


def check_step_submultiplicativity(w: StepWeight, C: float, omega_m2: float) -> CheckReport:
    """w(t+s) <= C^2 omega(-2)^2 w(t) w(s)."""
    return step_submult_ratio(w, C**2 * omega_m2**2)


@dataclass(frozen=True)
class SubexpConstant:
    eps: float
    k_eps: int
    log_C: float
    truncation: int | None  # None when the analytic tail of the generator was used

    @property
    def C(self) -> float:
        return math.exp(self.log_C) if self.log_C < 709 else math.inf


def subexp_constant(family: WeightFamily, eps: float, enlarge: bool = True) -> SubexpConstant:
    """k_eps = least k with 2 alpha v_k <= eps, C_eps = 1/sum_{k >= k_eps} a_k."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    threshold = eps / (2.0 * family.alpha)
    admissible = np.nonzero(family.v <= threshold)[0]
    if admissible.size:
        k = int(admissible[0]) + 1
        return SubexpConstant(eps, k, -family.log_tail(k), family.K)
    if enlarge and family.generator is not None:
        k = family.generator.first_index_with_v_at_most(threshold)
        if k is not None:
            return SubexpConstant(eps, k, -family.generator.log_tail(k), None)
    raise ValueError(
        f"no k <= K={family.K} with 2*alpha*v_k <= {eps}; enlarge the family"
    )


def check_subexponential(omega: WeightSequence, sc: SubexpConstant) -> CheckReport:
    """omega^2(-n-1) <= C_eps e^{eps n} for 0 <= n < N, compared in logs."""
    n = np.arange(omega.N)
    lhs = omega.log_omega2_neg
    rhs = sc.log_C + sc.eps * n
    slack = rhs - lhs
    worst = int(np.argmin(slack))
    tol = 1e-12 * np.maximum(1.0, np.abs(rhs))
    return CheckReport(
        f"subexponential(eps={sc.eps:g})",
        passed=bool(np.all(slack >= -tol)),
        lhs=float(lhs[worst]),
        rhs=float(rhs[worst]),
        margin=float(slack[worst]),
        witness=(worst,),
        details={
            "k_eps": sc.k_eps,
            "log_C_eps": sc.log_C,
            "truncation": "analytic" if sc.truncation is None else sc.truncation,
            "violations": int(np.sum(slack < -tol)),
            "scale": "log",
        },
    )


def quasi_partial_sums(omega: WeightSequence, N: int | None = None) -> np.ndarray:
    """S_N' = sum_{n=0}^{N'} log omega(-n-1)/(n+1)^2 for N' < N."""
    N = omega.N if N is None else min(N, omega.N)
    n = np.arange(N)
    terms = 0.5 * omega.log_omega2_neg[:N] / (n + 1.0) ** 2
    return np.cumsum(terms)


def c_sequence(family: WeightFamily, k: Sequence[int]) -> np.ndarray:
    """c_n = -(1/n) log sum_{k > k_n} a_k, n = 1..len(k), truncated at K."""
    k = np.asarray(k, dtype=int)
    if np.any(k < 1) or np.any(k >= family.K):
        raise ValueError(f"k_n must lie in [1, K) with K={family.K}")
    if np.any(np.diff(k) <= 0):
        raise ValueError("k_n must be strictly increasing")
    out = np.empty(k.size)
    for i, kn in enumerate(k):
        lt = family.log_tail(int(kn) + 1)
        if lt == -math.inf:
            raise ValueError(f"tail sum vanishes at n = {i + 1}")
        out[i] = -lt / (i + 1)
    return out


def threshold_chain_check(
    family: WeightFamily,
    k_of_n: Callable[[int], int] | Sequence[int],
    N: int,
) -> CheckReport:
    """Threshold for 2 alpha v_{k_n} <= c_n and the termwise lower bound

    2 log omega(-n-1) >= -log a_S + 2 alpha n v_{k_n} - e^{-n(c_n - 2 alpha v_{k_n})}/a_S.
    """
    n = np.arange(1, N + 1)
    k = np.array([k_of_n(i) for i in n] if callable(k_of_n) else k_of_n[:N], dtype=int)
    if np.any(k >= family.K) or np.any(k < 1):
        return CheckReport(
            "threshold_chain", True, math.nan, math.nan, math.nan,
            details={"applicable": False, "reason": "tail beyond k_n is empty at truncation"},
        )
    c = c_sequence(family, k)
    alpha = family.alpha
    vk = family.v[k - 1]
    cond = 2 * alpha * vk <= c
    if cond[-1]:
        failing = np.nonzero(~cond)[0]
        n0 = int(n[failing[-1] + 1]) if failing.size else 1
    else:
        n0 = None
    omega = build_weight(family, N + 1)
    lhs = omega.log_omega2_neg[n]  # log omega^2(-n-1)
    log_aS = family.log_total()
    a_S = math.exp(log_aS)
    with np.errstate(over="ignore"):
        rhs = -log_aS + 2 * alpha * n * vk - np.exp(-n * (c - 2 * alpha * vk)) / a_S
    slack = lhs - rhs
    tol = 1e-12 * np.maximum(1.0, np.abs(lhs))
    worst = int(np.argmin(slack))
    rows = tuple(
        {"n": int(n[i]), "k_n": int(k[i]), "c_n": float(c[i]), "condition": bool(cond[i]),
         "lhs": float(lhs[i]), "rhs": float(rhs[i])}
        for i in range(N)
    )
    return CheckReport(
        "threshold_chain",
        passed=bool(np.all(slack >= -tol)),
        lhs=float(lhs[worst]),
        rhs=float(rhs[worst]),
        margin=float(slack[worst]),
        witness=(int(n[worst]),),
        details={"applicable": True, "n0": n0, "truncation": family.K},
        rows=rows,
    )


def log_phi_alpha(family: WeightFamily, n: int, t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    logs = family.log_a - 2.0 * family.v * (family.alpha * n + t[:, None])
    return np.array([_log_sum(row) for row in logs])


def phi_alpha(family: WeightFamily, n: int, t):
    """phi_{alpha,n}(t) = sum_k a_k e^{-2 alpha v_k n} e^{-2 v_k t}."""
    out = np.exp(log_phi_alpha(family, n, t))
    return out if np.ndim(t) else float(out[0])


def check_phi_sandwich(family: WeightFamily, N: int, samples: int = 64) -> CheckReport:
    """e^{-2 v_1 alpha}/omega^2(-n-1) <= 1/omega^2(-n-2) <= phi <= 1/omega^2(-n-1)."""
    alpha = family.alpha
    omega = build_weight(family, N + 1)
    L = omega.log_omega2_neg
    t = alpha * np.arange(1, samples + 1) / (samples + 1)
    worst = (math.inf, None, "")
    rows = []
    tight = 0.0
    for n in range(N):
        lp = log_phi_alpha(family, n, t)
        links = {
            "outer_vs_middle": float((-2 * family.v[0] * alpha - L[n]) + L[n + 1]),
            "middle_vs_phi": float(np.max(-L[n + 1] - lp)),
            "phi_vs_upper": float(np.max(lp + L[n])),
        }
        for name, excess in links.items():
            if -excess < worst[0]:
                worst = (-excess, n, name)
        at_alpha = log_phi_alpha(family, n, [alpha])[0]
        tight = max(tight, abs(math.expm1(at_alpha + L[n + 1])))
        rows.append({"n": n, **links})
    slack = worst[0]
    return CheckReport(
        "phi_sandwich",
        passed=slack >= -1e-12 and tight <= 1e-10,
        lhs=-slack,
        rhs=0.0,
        margin=slack,
        witness=(worst[1], worst[2]),
        details={"tightness_at_alpha": tight, "samples": samples, "scale": "log"},
        rows=tuple(rows),
    )


def series_integral_check(
    M: Callable[[np.ndarray], np.ndarray], alpha: float, N: int, per_unit: int = 64
) -> CheckReport:
    """Series/integral comparison for a nondecreasing M.

    S = sum_{n=1}^N M(n alpha)/n^2, I = int_1^{N alpha} M(u)/u^2 du and the
    envelope M(n alpha)/(n+1)^2 <= int_n^{n+1} M(u alpha)/u^2 du <= M((n+1) alpha)/n^2.
    """
    u = np.linspace(1.0, N + 1.0, N * per_unit + 1)
    Mu = np.asarray(M(u * alpha), dtype=float)
    if np.any(np.diff(Mu) < 0):
        raise ValueError("M is not nondecreasing on the samples")
    n = np.arange(1, N + 1)
    Mn = np.asarray(M(n * alpha), dtype=float)
    S = math.fsum(Mn / n**2)
    x = np.linspace(1.0, N * alpha, max(2, int(math.ceil((N * alpha - 1.0) * per_unit)) + 1))
    I = float(np.trapezoid(np.asarray(M(x), float) / x**2, x)) if N * alpha > 1 else 0.0
    f = (Mu / u**2).reshape(-1)
    h = 1.0 / per_unit
    seg = f[:-1].reshape(N, per_unit) + f[1:].reshape(N, per_unit)
    J = 0.5 * h * seg.sum(axis=1)
    lower = Mn / (n + 1.0) ** 2
    upper = np.asarray(M((n + 1) * alpha), float) / n**2
    tol = 1e-9 * np.maximum(1.0, np.abs(J))
    slack = np.minimum(J - lower, upper - J)
    worst = int(np.argmin(slack))
    return CheckReport(
        "series_integral_envelope",
        passed=bool(np.all(slack >= -tol)),
        lhs=float(J[worst]),
        rhs=float(upper[worst]),
        margin=float(slack[worst]),
        witness=(int(n[worst]),),
        details={"S": S, "I": I},
        rows=tuple({"n": int(n[i]), "lower": float(lower[i]), "integral": float(J[i]),
                    "upper": float(upper[i])} for i in range(N)),
    )
