"""JSON and CSV renderings of census and moment reports.

JSON is canonical. CSV is a flat projection carrying the same numbers;
floats are written with ``repr`` in both so they round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

from .census import CensusReport, MomentReport

CENSUS_SCHEMA = "ecpoisson.census_report/1"
MOMENT_SCHEMA = "ecpoisson.moment_report/1"

POISSON_CALIBRATION = (
    "Reference law is the uniform mixture over the window of Poisson(lambda_N), "
    "lambda_N the empirical family mean of M_E(N). Acceptance envelope: "
    "relative error <= 0.25 for l = 1, 2 and absolute error <= 0.05 for l = 0. "
    "Asymptotic constants are not expected to be visible at this family size."
)


def _hist(h: dict[int, int]) -> list[dict]:
    return [{"ell": int(k), "count": int(v)} for k, v in sorted(h.items())]


def census_to_dict(report: CensusReport) -> dict:
    N = report.N
    return {
        "schema": CENSUS_SCHEMA,
        "family": {"A": report.family.A, "B": report.family.B, "size": report.family.size},
        "N": {"lo": N[0], "hi": N[1]} if isinstance(N, tuple) else {"lo": N, "hi": N},
        "total": report.total,
        "lambda": report.lam,
        "histogram": _hist(report.histogram),
        "poisson_rows": [
            {"ell": r.ell, "empirical": r.empirical, "poisson_raw": r.poisson_raw,
             "poisson": r.poisson, "ratio": None if math.isnan(r.ratio) else r.ratio}
            for r in report.poisson_rows
        ],
        "per_N": [{"N": n, "lambda": lam, "histogram": _hist(h)} for n, lam, h in report.per_N],
        "excluded": {
            "bad_reduction": report.excluded_bad_reduction,
            "small_primes": report.excluded_small_primes,
        },
        "calibration": POISSON_CALIBRATION,
    }


def moment_to_dict(report: MomentReport) -> dict:
    rel = abs(report.empirical - report.predicted) / report.predicted if report.predicted else None
    return {
        "schema": MOMENT_SCHEMA,
        "family": {"A": report.family.A, "B": report.family.B, "size": report.family.size},
        "x": report.x,
        "ell": report.ell,
        "r": report.r,
        "gamma1": report.gamma1,
        "empirical": report.empirical,
        "predicted": report.predicted,
        "relative_error": rel,
        "terms": [{"m": m, "C": c, "d": d, "li": li} for m, c, d, li in report.terms],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def census_to_csv(report: CensusReport) -> str:
    """One row per l: pooled count followed by the Poisson comparison columns."""
    d = census_to_dict(report)
    counts = {h["ell"]: h["count"] for h in d["histogram"]}
    rows = {r["ell"]: r for r in d["poisson_rows"]}
    ells = sorted(set(counts) | set(rows))
    out = []
    for ell in ells:
        r = rows.get(ell, {})
        out.append([ell, counts.get(ell, 0), r.get("empirical", ""), r.get("poisson_raw", ""),
                    r.get("poisson", ""), "" if r.get("ratio") is None else r["ratio"]])
    return _csv(["ell", "count", "empirical", "poisson_raw", "poisson", "ratio"], out)


def moment_to_csv(report: MomentReport) -> str:
    d = moment_to_dict(report)
    rows = [[t["m"], t["C"], t["d"], t["li"], d["empirical"], d["predicted"]] for t in d["terms"]]
    return _csv(["m", "C", "d", "li", "empirical", "predicted"], rows)


def census_plot_series(report: CensusReport) -> dict[str, list[tuple[float, float]]]:
    return {
        "empirical": [(r.ell, r.empirical) for r in report.poisson_rows],
        "poisson": [(r.ell, r.poisson) for r in report.poisson_rows],
        "lambda_by_N": [(n, lam) for n, lam, _ in report.per_N],
    }


def moment_plot_series(report: MomentReport) -> dict[str, list[tuple[float, float]]]:
    return {"term_contribution": [(m, c * float(Fraction(d)) * li) for m, c, d, li in report.terms]}


def write_series(directory: Path, stem: str, series: dict) -> list[Path]:
    paths = []
    for name, points in series.items():
        path = Path(directory) / f"{stem}.{name}.dat"
        path.write_text("".join(f"{x!r}\t{y!r}\n" for x, y in points))
        paths.append(path)
    return paths

