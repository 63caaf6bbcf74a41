"""Expectation gaps at concrete values of delta."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyGrid, MalformedInput, MatchBraessError, Unstable
from .model import ArrivalSpec, MatchingGraph, add_edge, as_fraction, build_model
from .product_form import mean_items
from .report import format_decimal


@dataclass(frozen=True)
class GapResult:
    delta: Fraction | None
    mean_before: Fraction
    mean_after: Fraction

    @property
    def gap(self) -> Fraction:
        return self.mean_after - self.mean_before

    @property
    def sign(self) -> int:
        return (self.gap > 0) - (self.gap < 0)

    @property
    def paradox(self) -> bool:
        return self.gap > 0


def expectation_gap(graph: MatchingGraph, spec: ArrivalSpec, i_star, j_star, delta=None) -> GapResult:
    """``E[Qbar] - E[Q]`` for the edge ``(i_star, j_star)``, exact."""
    gbar = add_edge(graph, str(i_star), str(j_star))
    before = build_model(graph, spec, delta)
    after = build_model(gbar, spec, delta)
    return GapResult(before.delta, mean_items(before), mean_items(after))


def detect_paradox(graph, spec, i_star, j_star, delta=None) -> bool:
    return expectation_gap(graph, spec, i_star, j_star, delta).paradox


def scaled_gap(graph, spec, i_star, j_star, delta) -> Fraction:
    """``delta * (E[Qbar] - E[Q])``; bounded as delta -> 0 when a single
    set saturates at rate ``1/delta``."""
    res = expectation_gap(graph, spec, i_star, j_star, delta)
    return res.delta * res.gap


def parse_grid(text: str) -> list:
    """``"lo:hi:step"`` with exact decimals or fractions; ``hi`` inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise MalformedInput(f"grid must be lo:hi:step, got {text!r}")
    lo, hi, step = (as_fraction(p) for p in parts)
    if step <= 0:
        raise MalformedInput("grid step must be positive")
    out = []
    k = 0
    while lo + k * step <= hi:
        out.append(lo + k * step)
        k += 1
    if not out:
        raise EmptyGrid(f"grid {text!r} is empty")
    return out


@dataclass(frozen=True)
class SweepRow:
    delta: Fraction
    result: GapResult | None
    reason: str = ""

    @property
    def stable(self) -> bool:
        return self.result is not None


def _sweep_point(args):
    graph, spec, i_star, j_star, delta = args
    try:
        return SweepRow(delta, expectation_gap(graph, spec, i_star, j_star, delta))
    except Unstable as exc:
        return SweepRow(delta, None, str(exc))
    except MatchBraessError as exc:
        if exc.code == "DELTA_OUT_OF_DOMAIN":
            return SweepRow(delta, None, str(exc))
        raise


def sweep_gap(graph, spec, i_star, j_star, grid, workers: int = 1) -> list:
    """One row per grid point, ordered by delta; unstable points are kept
    as rows without a result rather than aborting the sweep."""
    grid = sorted({as_fraction(d) for d in grid})
    if not grid:
        raise EmptyGrid("empty delta grid")
    add_edge(graph, str(i_star), str(j_star))
    tasks = [(graph, spec, str(i_star), str(j_star), d) for d in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    return sorted(rows, key=lambda r: r.delta)


SWEEP_COLUMNS = ("delta", "mean_before", "mean_after", "gap", "sign", "stable")


def sweep_records(rows, digits: int = 12) -> list:
    out = []
    for row in rows:
        rec = {"delta": str(row.delta), "stable": row.stable}
        if row.result is None:
            rec.update(mean_before=None, mean_after=None, gap=None, sign=None, reason=row.reason)
        else:
            r = row.result
            rec.update(
                mean_before=str(r.mean_before),
                mean_after=str(r.mean_after),
                gap=str(r.gap),
                gap_decimal=format_decimal(r.gap, digits),
                sign={1: "+", -1: "-", 0: "0"}[r.sign],
            )
        out.append(rec)
    return out


def sweep_to_csv(rows, digits: int = 12) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        if row.result is None:
            writer.writerow([str(row.delta), "", "", "", "", "false"])
        else:
            r = row.result
            writer.writerow([
                str(row.delta),
                format_decimal(r.mean_before, digits),
                format_decimal(r.mean_after, digits),
                format_decimal(r.gap, digits),
                {1: "+", -1: "-", 0: "0"}[r.sign],
                "true",
            ])
    return buf.getvalue()
