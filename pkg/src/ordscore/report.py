"""Plain-text coefficient tables in the layout of the worked examples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .glm import FitSummary


@dataclass(frozen=True)
class RenderedTable:
    title: str
    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    footer: str

    def __post_init__(self):
        width = len(self.headers)
        if any(len(r) != width for r in self.rows):
            raise ValueError("table rows must match the header width")

    def __str__(self) -> str:
        cells = [self.headers, *self.rows]
        widths = [max(len(r[j]) for r in cells) for j in range(len(self.headers))]
        lines = [self.title] if self.title else []
        fmt = lambda r: "  ".join(c.rjust(w) for c, w in zip(r, widths))
        rule = "-" * len(fmt(self.headers))
        lines += [rule, fmt(self.headers), rule]
        lines += [fmt(r) for r in self.rows]
        lines += [rule, self.footer.center(len(rule)).rstrip()]
        return "\n".join(lines)


def _num(x: float, digits: int) -> str:
    if not np.isfinite(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.{digits}f}"
    # avoid "-0.000"
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def format_footer(fit: FitSummary) -> str:
    if fit.family == "binomial":
        return f"Residual deviance: {fit.deviance:.3f}"
    return f"Residual std. deviation: {fit.residual_sd:.2f} on {fit.df_residual} degrees of freedom"


def render_fit(fit: FitSummary, title: str = "") -> RenderedTable:
    k = fit.stat_kind
    headers = ("", "Estimate", "Std.Error", f"{k} value", f"Pr(>|{k}|)")
    rows = tuple(
        (name, _num(est, 3), _num(se, 3), _num(st, 2), _num(pv, 3))
        for name, est, se, st, pv in zip(fit.names, fit.estimates, fit.std_errors, fit.statistics, fit.p_values)
    )
    return RenderedTable(title, headers, rows, format_footer(fit))


def render_scores(u, q, rescaled=None, label: str = "rescaled") -> RenderedTable:
    K = len(u)
    baseline = np.arange(1, K + 1) - (K + 1) / 2.0
    headers = ("k", "u_k", "centred k", "q_k") + ((label,) if rescaled is not None else ())
    rows = []
    for i in range(K):
        row = (str(i + 1), f"{u[i]:.6f}", f"{baseline[i]:g}", f"{q[i]:.6g}")
        if rescaled is not None:
            row += (f"{rescaled[i]:.6g}",)
        rows.append(row)
    return RenderedTable("", headers, tuple(rows), f"K = {K}")
