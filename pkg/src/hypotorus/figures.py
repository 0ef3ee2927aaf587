"""PNG figure rendering for the CLI report paths.

Every renderer writes files named <stem>_<what>.png into the given directory
and returns the paths.  Rendering is strictly optional (--figures); the
delimited outputs remain the interface of record.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from hypotorus.coeffs import CoefficientField, trig_sup  # noqa: E402
from hypotorus.system import SystemSpec  # noqa: E402

__all__ = [
    "render_coefficients", "render_diophantine", "render_resonances",
    "render_field_decay", "render_witness",
]

_DPI = 150


def _finish(fig, outdir, stem, what) -> str:
    path = Path(outdir) / f"{stem}_{what}.png"
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def render_coefficients(spec: SystemSpec, outdir, stem) -> str:
    """One row per equation: a_r and b_r over a period, zero line dashed."""
    t = np.linspace(0.0, 2.0 * math.pi, 512)
    fig, axes = plt.subplots(spec.m, 1, figsize=(7, 2.2 * spec.m),
                             squeeze=False)
    for r in range(1, spec.m + 1):
        ax = axes[r - 1][0]
        ax.plot(t, np.real(spec.a(r).evaluate(t)), label=f"a_{r}")
        ax.plot(t, np.real(spec.b(r).evaluate(t)), label=f"b_{r}")
        ax.axhline(0.0, color="gray", lw=0.8, ls="--")
        ax.set_xlim(0.0, 2.0 * math.pi)
        ax.set_ylabel(f"eq {r}")
        ax.legend(loc="upper right", fontsize=8)
    axes[-1][0].set_xlabel("t")
    fig.suptitle("coefficient pair per equation")
    return _finish(fig, outdir, stem, "coefficients")


def render_diophantine(reports, outdir, stem) -> str:
    """log gap against the combined exponent x, one panel per sigma.

    Budget lines -eps x show which rates the scan tested; running minima
    (the trend carriers) are highlighted.
    """
    reports = list(reports)
    fig, axes = plt.subplots(1, len(reports), figsize=(4.5 * len(reports), 3.6),
                             squeeze=False)
    for i, (sigma, rep) in enumerate(reports):
        ax = axes[0][i]
        live = [row for row in rep.rows if not row.resonant]
        if live:
            xs = np.array([row.x for row in live])
            ys = np.array([row.log_gap for row in live])
            ax.scatter(xs, ys, s=12, label="gaps")
            best = -np.inf * np.ones_like(xs)
            running = math.inf
            for k in range(len(live)):
                running = min(running, ys[k])
                best[k] = running
            ax.step(xs, best, where="post", color="tab:red", lw=1.0,
                    label="running min")
            span = np.linspace(0.0, float(np.max(xs)), 64)
            for eps in (1e-3, 1e-2, 1e-1, 1.0):
                ax.plot(span, -eps * span, ls=":", lw=0.8, color="gray")
        ax.set_title(f"sigma = {sigma:g}: {rep.verdict}", fontsize=9)
        ax.set_xlabel("||tau||^(1/sigma) + ell^(1/(2 n mu))")
        ax.set_ylabel("log gap")
        ax.legend(fontsize=7)
    return _finish(fig, outdir, stem, "diophantine")


def render_resonances(rows, outdir, stem) -> str:
    """Per-mode distance to resonance: rows of (j, lambda, gaps per r)."""
    rows = list(rows)
    m = len(rows[0][2]) if rows else 1
    fig, ax = plt.subplots(figsize=(7, 3.6))
    js = [j for j, _lam, _g in rows]
    for r in range(m):
        gaps = [max(g[r], 1e-300) for _j, _lam, g in rows]
        ax.semilogy(js, gaps, marker=".", lw=0.7, label=f"equation {r + 1}")
    ax.set_xlabel("mode j")
    ax.set_ylabel("distance of omega_r lambda_j from Z")
    ax.legend(fontsize=8)
    ax.set_title("resonance gaps")
    return _finish(fig, outdir, stem, "resonances")


def render_field_decay(field: CoefficientField, outdir, stem,
                       what: str = "field") -> str:
    """Two panels: per-mode synthesized sups vs j, shell maxima vs ||tau||."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    js, sups = [], []
    for j in field.mode_indices():
        s = trig_sup(field.slice_coeffs(j), field.m)
        if s > 0:
            js.append(j)
            sups.append(s)
    ax1.semilogy(js, sups, marker="o", lw=0.8)
    ax1.set_xlabel("mode j")
    ax1.set_ylabel("sup_t |u_j(t)|")

    shell: dict = {}
    for (tau, _j), v in field.values.items():
        nu = max((abs(c) for c in tau), default=0)
        shell[nu] = max(shell.get(nu, 0.0), abs(v))
    nus = sorted(shell)
    ax2.semilogy(nus, [shell[nu] for nu in nus], marker=".", lw=0.0)
    ax2.set_xlabel("||tau||")
    ax2.set_ylabel("max |coefficient| on shell")
    fig.suptitle(f"{what}: decay in the two index directions")
    return _finish(fig, outdir, stem, f"{what}_decay")


def render_witness(witness, outdir, stem) -> list:
    """u sups (nondecay) and the forcing decay per equation."""
    paths = [render_field_decay(witness.u_field, outdir, stem, "u")]
    for r, f in enumerate(witness.f_fields, start=1):
        if f.values:
            paths.append(render_field_decay(f, outdir, stem, f"f{r}"))
    return paths
