"""CSV emission. Column order is part of the external interface."""

from __future__ import annotations

import csv
import io
from fractions import Fraction

COUNT_COLUMNS = [
    "q",
    "n",
    "m",
    "pattern",
    "N_S",
    "main_term_num",
    "main_term_den",
    "abs_error",
    "ratio_halfpow",
    "ratio_gamma",
    "fitted_exponent",
    "bound_satisfied",
]


def _float(x) -> str:
    return "" if x is None else repr(float(x))


def report_row(r, ok: bool, fitted: str = "") -> dict:
    return {
        "q": r.q,
        "n": r.n,
        "m": r.m,
        "pattern": r.pattern,
        "N_S": r.N_S,
        "main_term_num": r.main_term.numerator,
        "main_term_den": r.main_term.denominator,
        "abs_error": str(r.abs_error),
        "ratio_halfpow": _float(r.ratio_halfpow),
        "ratio_gamma": _float(r.ratio_gamma),
        "fitted_exponent": fitted,
        "bound_satisfied": "true" if ok else "false",
    }


def count_rows(series) -> list[dict]:
    return [report_row(r, ok, str(series.fit)) for r, ok in zip(series.reports, series.bound_flags)]


def profile_rows(profile) -> list[dict]:
    rows = []
    for sub in sorted(profile.per_subset, key=lambda s: (len(s), s)):
        counts = profile.counts.get(sub, {})
        rows.append(
            {
                "subset": " ".join(map(str, sub)),
                "dimension": profile.per_subset[sub],
                "confidence": profile.confidence[sub],
                "counts": " ".join(f"{e}:{c}" for e, c in sorted(counts.items())),
                "sigma": profile.sigma,
                "l": profile.l,
                "gamma": str(profile.gamma),
            }
        )
    return rows


PROFILE_COLUMNS = ["subset", "dimension", "confidence", "counts", "sigma", "l", "gamma"]
WITNESS_COLUMNS = ["i", "status", "field", "u", "v"]
CLASSIFY_COLUMNS = ["point", "tangent_count", "class", "constant"]


def witness_rows(report) -> list[dict]:
    rows = []
    for i in range(1, report.m + 1):
        cert = report.certificates.get(i)
        if cert is None:
            rows.append({"i": i, "status": "inconclusive", "field": "", "u": "", "v": ""})
        else:
            rows.append(
                {
                    "i": i,
                    "status": "certified",
                    "field": cert.field.name,
                    "u": " ".join(map(str, cert.u)),
                    "v": " ".join(map(str, cert.v)),
                }
            )
    return rows


def classify_rows(table) -> list[dict]:
    const = str(table.constant)
    return [
        {"point": " ".join(map(str, p)), "tangent_count": t, "class": str(c), "constant": const}
        for p, t, c in zip(table.points, table.tangent_counts, table.classes)
    ]


def write_csv(rows, columns, fh) -> None:
    w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)


def to_csv_text(rows, columns) -> str:
    buf = io.StringIO()
    write_csv(rows, columns, buf)
    return buf.getvalue()


def series_csv(series_list) -> str:
    rows = [row for s in series_list for row in count_rows(s)]
    return to_csv_text(rows, COUNT_COLUMNS)


def check_abs_error_column(text: str) -> list[int]:
    """Row numbers whose abs_error differs from |N_S - num/den| recomputed from the file."""
    bad = []
    for i, row in enumerate(csv.DictReader(io.StringIO(text)), 1):
        want = abs(Fraction(int(row["N_S"])) - Fraction(int(row["main_term_num"]), int(row["main_term_den"])))
        if Fraction(row["abs_error"]) != want:
            bad.append(i)
    return bad
