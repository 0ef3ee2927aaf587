"""Small-divisor condition checks against an eigenvalue sequence.

The condition under test: alpha in R^N satisfies D_{sigma,mu} when for every
eps > 0 there is C_eps > 0 with

    ||tau - alpha lambda_ell|| >= C_eps exp(-eps (||tau||^{1/sigma} + ell^{1/(2 n mu)}))

for all integer vectors tau and modes ell with tau - alpha lambda_ell != 0.
Norms are max-norms, so the minimizing tau is the coordinatewise nearest
integer vector and the per-mode gap collapses to O(1) work.

Failure means the gaps are exponentially small in the budget exponent along
a subsequence ("exponentially Liouville").  On a finite box that is detected
by the rate statistic rho_ell = -log(gap_ell) / x_ell evaluated on the
running minima of the gap sequence: genuinely exponential sequences keep
rho bounded away from zero (the sustained rate), while algebraic gaps like
1/lambda drive rho -> 0.  Verdicts are bounded evidence, never proofs.

Exact rational inputs (Fraction alpha, integer eigenvalues) take an exact
path: gaps are computed as Fractions and only their logarithms enter float
arithmetic, so gaps far below float underflow remain usable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from hypotorus.pool import ordered_map
from hypotorus.spectrum import EigenvalueProvider, enumerate_eigenvalues

__all__ = [
    "DiophantineQuery", "DiophantineReport", "GapRow", "DiophantineWitness",
    "TorusDistanceReport", "check_condition", "torus_distance_scan",
    "continued_fraction_oracle", "witnesses_to_csv",
]

DEFAULT_EPS_GRID = (1e-3, 1e-2, 1e-1, 1.0)
MIN_TREND_POINTS = 4      # nonresonant rows needed before any trend is believed
MIN_RECORDS = 3           # running minima needed to estimate a sustained rate
RATE_STABILITY = 0.8      # tail rate must keep this share of the head rate


@dataclass(frozen=True)
class DiophantineQuery:
    alpha: tuple
    sigma: float
    mu: float
    n: int
    eigenvalues: EigenvalueProvider
    bounds: tuple               # (T_max for ||tau||_inf, L_max for ell)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(self.alpha))
        if not self.alpha:
            raise ValueError("alpha must have at least one coordinate")
        if self.sigma < 1.0:
            raise ValueError(f"sigma = {self.sigma} < 1")
        if self.mu < 0.5:
            raise ValueError(f"mu = {self.mu} < 1/2")
        if self.n < 1:
            raise ValueError(f"n = {self.n} < 1")
        t_max, l_max = self.bounds
        if t_max < 1 or l_max < 1:
            raise ValueError(f"bounds {self.bounds} must be positive")

    @property
    def j_exponent(self) -> float:
        return 1.0 / (2.0 * self.n * self.mu)


@dataclass(frozen=True)
class GapRow:
    """One scanned mode: nearest tau, gap in linear and log form, exponent x."""

    ell: int
    tau: tuple
    gap: float
    log_gap: float
    x: float
    resonant: bool      # whole difference vector exactly zero (gap is the
                        # constrained minimum 1, taken one integer off)


@dataclass(frozen=True)
class DiophantineWitness:
    tau: tuple
    ell: int
    gap: float
    budget: float
    log_gap: float
    log_budget: float


@dataclass(frozen=True)
class DiophantineReport:
    verdict: str                    # HoldsUpToBounds | FailsWithWitness | Inconclusive
    witnesses: tuple
    fitted_eps: float               # critical eps: bound holds with C = 1 iff eps >= this
    reported_eps: float             # grid eps at which the witnesses are evaluated
    sustained_rate: float           # tail rate of -log(gap)/x on running minima
    rows: tuple
    skipped: int                    # modes whose nearest tau fell outside the box
    query: DiophantineQuery

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "fitted_eps": self.fitted_eps,
            "reported_eps": self.reported_eps,
            "sustained_rate": self.sustained_rate,
            "sigma": self.query.sigma,
            "mu": self.query.mu,
            "bounds": list(self.query.bounds),
            "skipped": self.skipped,
            "witnesses": [
                {"tau": list(w.tau), "ell": w.ell, "gap": w.gap,
                 "budget": w.budget, "log_gap": w.log_gap,
                 "log_budget": w.log_budget}
                for w in self.witnesses
            ],
        }


def _nearest_and_dist(x):
    """(nearest integer, distance) with half-integer ties away from zero.

    Both neighbors are evaluated; the distance is their min either way.
    Works for Fraction (exact) and float inputs.
    """
    if isinstance(x, Fraction):
        fl = x.numerator // x.denominator
        frac = x - fl
        half = Fraction(1, 2)
    else:
        fl = math.floor(x)
        frac = x - fl
        half = 0.5
    if frac > half:
        return fl + 1, 1 - frac
    if frac < half:
        return fl, frac
    return (fl + 1 if x >= 0 else fl), frac


def _log_exact(q) -> float:
    """log of a positive Fraction or float without underflow."""
    if isinstance(q, Fraction):
        return math.log(q.numerator) - math.log(q.denominator)
    return math.log(q)


def _gap_rows(query: DiophantineQuery, eigenvalues: Sequence) -> tuple:
    """Per-mode gap data, exact when alpha and the spectrum allow it."""
    t_max, _ = query.bounds
    sigma = query.sigma
    jexp = query.j_exponent
    exact_alpha = all(isinstance(a, (Fraction, int)) for a in query.alpha)
    alpha_q = [Fraction(a) for a in query.alpha] if exact_alpha else None

    def row_for(ell: int):
        lam = eigenvalues[ell - 1]
        use_exact = exact_alpha and (
            isinstance(lam, int)
            or (isinstance(lam, Fraction) and lam.denominator == 1)
            or (isinstance(lam, float) and lam.is_integer() and abs(lam) < 2**53))
        if use_exact:
            lam_q = Fraction(int(lam)) if not isinstance(lam, Fraction) else lam
            prods = [a * lam_q for a in alpha_q]
        else:
            prods = [float(a) * float(lam) for a in query.alpha]
        nearest, dists = [], []
        for p in prods:
            t, d = _nearest_and_dist(p)
            nearest.append(int(t))
            dists.append(d)
        gap = max(dists)
        resonant = gap == 0
        if resonant:
            # constrained minimum over tau - alpha lambda != 0: one step off
            nearest[0] += 1
            gap = Fraction(1) if use_exact else 1.0
        tau = tuple(nearest)
        if max(abs(c) for c in tau) > t_max:
            return None
        x = float(max(abs(c) for c in tau)) ** (1.0 / sigma) + float(ell) ** jexp
        log_gap = _log_exact(gap) if gap > 0 else -math.inf
        return GapRow(ell=ell, tau=tau, gap=float(gap), log_gap=log_gap,
                      x=x, resonant=resonant)

    return tuple(ordered_map(row_for, range(1, len(eigenvalues) + 1)))


def _sustained_rate(rows: Sequence) -> tuple:
    """(rate, confirmed) from running minima of the gap sequence.

    rate is the minimum of rho = -log(gap)/x over the tail half of the
    records; confirmed requires at least MIN_RECORDS records and the tail
    rate holding RATE_STABILITY of the head rate (rules out gaps whose
    smallness is merely algebraic in lambda).
    """
    records = []
    best = 0.0      # log scale; records need log_gap strictly below
    for r in rows:
        if not r.resonant and r.log_gap < best:
            best = r.log_gap
            records.append(r)
    if len(records) < MIN_RECORDS:
        return 0.0, False
    rho = [-r.log_gap / r.x for r in records]
    h = len(rho) // 2
    head, tail = min(rho[:h]), min(rho[h:])
    rate = tail
    confirmed = tail > 0 and tail >= RATE_STABILITY * head
    return rate, confirmed


def check_condition(query: DiophantineQuery,
                    eps_grid: Optional[Sequence] = None) -> DiophantineReport:
    """Bounded-evidence verdict on D_{sigma,mu} for query.alpha.

    HoldsUpToBounds: no sustained exponential smallness found on the box.
    FailsWithWitness: running gap minima keep rho = -log(gap)/x at a stable
    positive rate >= the smallest grid eps; witnesses list every violation
    gap < exp(-eps x) at that eps.  Inconclusive: violations exist but the
    box gives fewer than MIN_TREND_POINTS informative modes.
    """
    eps_grid = tuple(sorted(float(e) for e in (eps_grid or DEFAULT_EPS_GRID)))
    if any(e <= 0 for e in eps_grid):
        raise ValueError("eps grid entries must be positive")
    t_max, l_max = query.bounds
    if len(query.alpha) * l_max > 10**8:
        raise ValueError("scan exceeds the 1e8 candidate budget")
    lam = enumerate_eigenvalues(query.eigenvalues, l_max)
    raw = _gap_rows(query, lam)
    rows = tuple(r for r in raw if r is not None)
    skipped = len(raw) - len(rows)
    live = [r for r in rows if not r.resonant]

    fitted_eps = max((max(-r.log_gap, 0.0) / r.x for r in live), default=0.0)
    rate, confirmed = _sustained_rate(rows)

    def violations(eps: float) -> tuple:
        out = []
        for r in live:
            log_budget = -eps * r.x
            if r.log_gap < log_budget:
                out.append(DiophantineWitness(
                    tau=r.tau, ell=r.ell, gap=r.gap,
                    budget=math.exp(log_budget) if log_budget > -745 else 0.0,
                    log_gap=r.log_gap, log_budget=log_budget))
        return tuple(out)

    if confirmed and rate >= eps_grid[0]:
        reported = eps_grid[0]
        wit = violations(reported)
        if wit:     # rate >= reported guarantees this on the records
            return DiophantineReport("FailsWithWitness", wit, fitted_eps,
                                     reported, rate, rows, skipped, query)
    if len(live) < MIN_TREND_POINTS and violations(eps_grid[0]):
        return DiophantineReport("Inconclusive", (), fitted_eps, eps_grid[0],
                                 rate, rows, skipped, query)
    return DiophantineReport("HoldsUpToBounds", (), fitted_eps, eps_grid[0],
                             rate, rows, skipped, query)


@dataclass(frozen=True)
class TorusDistanceReport:
    verdict: str
    fitted_delta: float
    sustained_rate: float
    degenerate: bool            # every scanned mode was an exact resonance
    companion_verdict: str
    agrees: Optional[bool]      # None when either side is Inconclusive
    values: tuple               # (j, m_j, log_m_j) rows

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "fitted_delta": self.fitted_delta,
            "sustained_rate": self.sustained_rate,
            "degenerate": self.degenerate,
            "companion_verdict": self.companion_verdict,
            "agrees": self.agrees,
        }


def torus_distance_scan(omega: Sequence, eigenvalues: EigenvalueProvider,
                        L_max: int, delta_grid: Optional[Sequence] = None,
                        mu: float = 0.5) -> TorusDistanceReport:
    """Check m_j = max_r |1 - exp(-2 pi i omega_r lambda_j)| >= exp(-delta j^{1/(2 n mu)}).

    Equivalent formulation of the small-divisor condition (the torus-distance
    lemma); the exponent here carries only the mode index.  m_j is computed
    through dist(omega_r lambda_j, Z) as 2 sin(pi dist), which stays accurate
    for tiny distances where the literal complex difference would cancel.
    The companion verdict reruns check_condition on the same data; the
    `agrees` flag records the lemma's claimed equivalence on this box.
    """
    if L_max < 1:
        raise ValueError(f"L_max = {L_max} < 1")
    delta_grid = tuple(sorted(float(d) for d in (delta_grid or DEFAULT_EPS_GRID)))
    omega = tuple(omega)
    n = eigenvalues.meta.n
    jexp = 1.0 / (2.0 * n * mu)
    lam = enumerate_eigenvalues(eigenvalues, L_max)
    exact = all(isinstance(w, (Fraction, int)) for w in omega)

    rows = []
    for j in range(1, L_max + 1):
        lam_j = lam[j - 1]
        use_exact = exact and (
            isinstance(lam_j, int)
            or (isinstance(lam_j, Fraction) and lam_j.denominator == 1)
            or (isinstance(lam_j, float) and lam_j.is_integer() and abs(lam_j) < 2**53))
        dists = []
        for w in omega:
            p = (Fraction(w) * int(lam_j)) if use_exact else float(w) * float(lam_j)
            _t, d = _nearest_and_dist(p)
            dists.append(d)
        dist = max(dists)
        if dist == 0:
            rows.append((j, 0.0, -math.inf))
            continue
        log_dist = _log_exact(dist)
        if log_dist < math.log(1e-8):
            log_m = math.log(2 * math.pi) + log_dist
            m = math.exp(log_m) if log_m > -745 else 0.0
        else:
            m = 2.0 * math.sin(math.pi * float(dist))
            log_m = math.log(m)
        rows.append((j, m, log_m))

    live = [(j, m, lm) for j, m, lm in rows if lm > -math.inf]
    degenerate = not live
    fitted_delta = max((max(-lm, 0.0) / (j ** jexp) for j, _m, lm in live),
                       default=0.0)

    # reuse the rate detector via GapRow shims
    shims = [GapRow(ell=j, tau=(0,), gap=m, log_gap=lm, x=j ** jexp,
                    resonant=(lm == -math.inf)) for j, m, lm in rows]
    rate, confirmed = _sustained_rate(shims)
    if degenerate:
        verdict = "HoldsUpToBounds"
    elif confirmed and rate >= delta_grid[0]:
        verdict = "FailsWithWitness"
    elif len(live) < MIN_TREND_POINTS and any(
            lm < -delta_grid[0] * (j ** jexp) for j, _m, lm in live):
        verdict = "Inconclusive"
    else:
        verdict = "HoldsUpToBounds"

    meta = eigenvalues.meta
    companion = check_condition(DiophantineQuery(
        alpha=omega, sigma=max(float(meta.M) * mu, 1.0), mu=mu, n=n,
        eigenvalues=eigenvalues,
        bounds=(max(1, math.ceil(max((abs(float(w)) for w in omega), default=1.0)
                                 * max(max(abs(float(v)) for v in lam), 1.0)) + 1),
                L_max)),
        eps_grid=delta_grid)
    agrees = None if "Inconclusive" in (verdict, companion.verdict) \
        else (verdict == companion.verdict)
    return TorusDistanceReport(verdict=verdict, fitted_delta=fitted_delta,
                               sustained_rate=rate, degenerate=degenerate,
                               companion_verdict=companion.verdict,
                               agrees=agrees, values=tuple(rows))


def continued_fraction_oracle(alpha, Q_max: int) -> list:
    """Convergents (p, q, |alpha - p/q|) with q <= Q_max.

    Exact termination for Fraction input; float input stops when the
    remainder loses meaning (40 partial quotients is far beyond float
    precision anyway).
    """
    if Q_max < 1:
        raise ValueError(f"Q_max = {Q_max} < 1")
    exact = isinstance(alpha, (Fraction, int))
    x = Fraction(alpha) if exact else float(alpha)
    p_prev, q_prev = 0, 1
    p_cur, q_cur = 1, 0     # 1/0 is the formal (-1)-st convergent
    out = []
    for _ in range(64 if exact else 40):
        a = math.floor(x)
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        if q_cur > Q_max:
            break
        if exact:
            err = abs(Fraction(alpha) - Fraction(p_cur, q_cur))
        else:
            err = abs(float(alpha) - p_cur / q_cur)
        out.append((p_cur, q_cur, err))
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return out


def witnesses_to_csv(report: DiophantineReport, path) -> None:
    """Columns tau_1..tau_N, ell, gap, budget."""
    N = len(report.query.alpha)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"tau_{k}" for k in range(1, N + 1)] + ["ell", "gap", "budget"])
        for wit in report.witnesses:
            w.writerow([*wit.tau, wit.ell, repr(wit.gap), repr(wit.budget)])
