"""Deterministic CSV reporting and convergence-order estimation.

All numbers are written with 17 significant digits, '.' decimal separator
and '\n' line endings; rows follow a fixed order, so re-running a scenario
reproduces the output byte for byte.
"""

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if np.isnan(x):
        return "nan"
    return format(x, ".17g")


@dataclass
class ReportRow:
    """One check at one resolution."""

    name: str
    h: float
    dt: float
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    observed_order: float = np.nan

    def csv(self) -> str:
        return ",".join([
            self.name, fmt(self.h), fmt(self.dt), fmt(self.lhs), fmt(self.rhs),
            fmt(self.abs_residual), fmt(self.rel_residual),
            fmt(self.observed_order),
        ])


CSV_HEADER = "name,h,dt,lhs,rhs,abs_residual,rel_residual,observed_order"


def attach_orders(rows: Sequence[ReportRow]) -> list:
    """Fill pairwise observed orders for repeated check names.

    Rows sharing a name are assumed ordered coarse to fine with halving h;
    each finer row gets log2(previous residual / its residual).
    """
    by_name = {}
    out = []
    for row in rows:
        prev = by_name.get(row.name)
        if prev is not None and row.abs_residual > 0 and prev.abs_residual > 0:
            ratio = np.log2(prev.h / row.h) if row.h > 0 and prev.h > 0 else 1.0
            ratio = ratio if ratio > 0 else 1.0
            row.observed_order = float(
                np.log2(prev.abs_residual / row.abs_residual) / ratio)
        by_name[row.name] = row
        out.append(row)
    return out


def span_order(residuals: Sequence[float]) -> float:
    """Mean order over a full refinement span (assumes halving per level)."""
    r = [float(x) for x in residuals]
    if len(r) < 2 or r[0] <= 0 or r[-1] <= 0:
        return float("nan")
    return float(np.log2(r[0] / r[-1]) / (len(r) - 1))


def write_csv(path: str, rows: Sequence[ReportRow], header: str = CSV_HEADER):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    lines = [header]
    lines.extend(row.csv() for row in rows)
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")


def write_balance_csv(path: str, report):
    """Serialize a BalanceReport time series."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    header = "t,mass,px,py,pz,Lx,Ly,Lz,eA,Ctot,energy_residual"
    lines = [header]
    for k in range(len(report.times)):
        lines.append(",".join([
            fmt(report.times[k]), fmt(report.mass[k]),
            fmt(report.momentum[k][0]), fmt(report.momentum[k][1]),
            fmt(report.momentum[k][2]),
            fmt(report.angular[k][0]), fmt(report.angular[k][1]),
            fmt(report.angular[k][2]),
            fmt(report.total_energy[k]), fmt(report.concentration[k]),
            fmt(report.energy_residual[k]),
        ]))
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")


def write_field_summary_csv(path: str, entries):
    """Serialize residual-field norms: (name, h, dt, linf, l2) tuples."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    header = "name,h,dt,linf,l2"
    lines = [header]
    for name, h, dt, linf, l2 in entries:
        lines.append(",".join([name, fmt(h), fmt(dt), fmt(linf), fmt(l2)]))
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")
