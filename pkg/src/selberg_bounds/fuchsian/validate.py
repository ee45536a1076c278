"""Check enumerated counts against the explicit bounds."""

from __future__ import annotations

from typing import Sequence

from ..bounds import (BoundReport, ExternalConstants, ManifoldParams, cumulative_lower,
                      cumulative_upper, interval_count_lower, interval_count_upper,
                      kiss_upper_bound, pgt_asymptotic)
from .spectrum import Spectrum, empirical_counts

__all__ = ["validate_bounds"]


def validate_bounds(spectrum: Spectrum, params: ManifoldParams, ext: ExternalConstants,
                    L_grid: Sequence[float] = (4, 5, 6, 7, 8)) -> BoundReport:
    """Every applicable inequality on a grid of lengths.

    Lengths beyond the completeness horizon are reported as unchecked.
    Vacuous (non-positive) lower bounds are recorded but never fail.
    """
    if params.n != 2:
        raise ValueError("spectra are only available for surfaces")
    n, vol, delta = params.n, params.vol, params.delta
    checks = []
    failures = []

    kiss = spectrum.kiss
    kb = kiss_upper_bound(params, ext, kiss)
    row = {"check": "kiss", "count": kiss, "bound": kb.bound, "branch": kb.values["branch"],
           "margin": float(kb.bound - kiss), "ok": bool(kiss <= kb.bound)}
    checks.append(row)
    if not row["ok"]:
        failures.append(row)

    big_systole = params.sys >= 2 * delta
    for L in L_grid:
        if L > spectrum.horizon:
            checks.append({"check": "cumulative", "L": L, "status": "unchecked: beyond horizon"})
            continue
        count = empirical_counts(spectrum, (0.0, L), primitive_only=True)
        up = cumulative_upper(n, delta, vol, L, ext).bound
        low_rep = cumulative_lower(n, delta, vol, L, ext)
        low = low_rep.bound
        row = {"check": "cumulative", "L": L, "count": count, "upper": up, "lower": low,
               "lower_vacuous": bool(low <= 0), "pgt": pgt_asymptotic(n, L),
               "applicable": big_systole,
               "ok": bool((not big_systole) or (count <= up and (low <= 0 or count >= low)))}
        checks.append(row)
        if not row["ok"]:
            failures.append(row)

        if L + delta > spectrum.horizon:
            checks.append({"check": "interval", "L": L, "status": "unchecked: beyond horizon"})
            continue
        count = empirical_counts(spectrum, (L - delta, L + delta), primitive_only=True)
        up = interval_count_upper(n, delta, vol, L, ext).bound
        low = interval_count_lower(n, delta, vol, L, ext).bound if L >= delta else None
        ok_low = low is None or low <= 0 or params.sys < delta or count >= low
        row = {"check": "interval", "L": L, "count": count, "upper": up, "lower": low,
               "lower_vacuous": low is None or low <= 0, "applicable": big_systole,
               "ok": bool(ok_low and ((not big_systole) or count <= up))}
        checks.append(row)
        if not row["ok"]:
            failures.append(row)

    values = {"bound": None, "checks": checks, "failures": len(failures),
              "systole": params.sys, "horizon": spectrum.horizon,
              "complete": spectrum.complete}
    verdicts = {"passed": not failures, "kiss": kiss}
    notes = []
    if not big_systole:
        notes.append("systole below 2 delta: upper bounds do not apply and are not enforced")
    return BoundReport("validate_bounds", {"n": n, "vol": vol, "sys": params.sys, "delta": delta,
                                           "L_grid": list(L_grid)},
                       {"kiss_bound": kb.to_dict()}, values, verdicts, notes)
