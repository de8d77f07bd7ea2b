"""Report files: monthly ledger, per-day dispatch dumps, summaries and plot data.

Money is written with 2 decimals and MW with 4; files use UTF-8 and LF endings.
"""

from __future__ import annotations

from pathlib import Path

from .core import HOURS_PER_DAY
from .strategy import Strategy


def _money(x) -> str:
    return f"{x:.2f}"


def _mw(x) -> str:
    return f"{x:.4f}"


def _write(path: Path, lines) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")
    return path


MONTHLY_HEADER = ("month,baseline_peak_mw,mitigated_peak_mw,baseline_charge,mitigated_charge,"
                  "operating_cost,savings,dr_hours,battery_cycles,discharged_mwh,dispatch_days,"
                  "negative_savings,payback_shift")


def monthly_rows(report):
    yield MONTHLY_HEADER
    for m in report.months:
        yield ",".join([
            f"{m.month[0]}-{m.month[1]:02d}", _mw(m.baseline_peak_mw), _mw(m.mitigated_peak_mw),
            _money(m.baseline_charge), _money(m.mitigated_charge), _money(m.operating_cost),
            _money(m.savings), str(m.dr_hours), f"{m.battery_cycles:.4f}", _mw(m.discharged_mwh),
            str(m.dispatch_days), str(int(m.negative)), str(int(m.payback_shift)),
        ])


def dispatch_rows(record):
    s = record.schedule
    targeted = {h: i for i, h in enumerate(s.hours.hours)}
    cvr = dict(zip(s.hours.deployable, s.cvr_column)) if s.cvr_column is not None else {}
    groups = [dict(zip(s.hours.deployable, c)) for c in s.tcl_columns]
    head = ["hour", "targeted", "payback_hour", "forecast_mw", "actual_mw", "bess_mw", "dg_mw",
            "cvr_on"] + [f"tcl{i + 1}_on" for i in range(len(groups))] + \
           ["tcl_delta_mw", "predicted_mw", "mitigated_mw"]
    yield ",".join(head)
    for h in range(HOURS_PER_DAY):
        i = targeted.get(h)
        row = [
            str(h), str(int(i is not None)), str(int(h == s.hours.payback_hour)),
            _mw(record.forecast[h]), _mw(record.actual[h]),
            _mw(s.bess_mw[i] if i is not None else 0.0), _mw(s.dg_mw[i] if i is not None else 0.0),
            str(int(cvr.get(h, 0))),
        ] + [str(int(g.get(h, 0))) for g in groups] + [
            _mw(s.tcl_day[h]), _mw(s.predicted_day[h]), _mw(record.mitigated[h])]
        yield ",".join(row)


def summary_lines(report, title: str = ""):
    yield title or f"strategy {report.label}"
    yield f"annual_savings_dollars = {_money(report.savings)}"
    yield f"operating_cost_dollars = {_money(report.operating_cost)}"
    yield f"battery_cycles = {report.battery_cycles:.4f}"
    ran = sum(1 for d in report.days if d.ran)
    yield f"dispatch_days = {ran}"
    yield "charging energy cost and customer compensation are excluded from savings"
    for flag in report.flags:
        yield f"flag: {flag}"


def emit_reports(report, outdir, title: str = "") -> list:
    out = Path(outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = [_write(out / "monthly.csv", monthly_rows(report))]
    for rec in report.days:
        if rec.ran:
            written.append(_write(out / "dispatch" / f"{rec.date.isoformat()}.csv", dispatch_rows(rec)))
    written.append(_write(out / "summary.txt", summary_lines(report, title)))
    peaks = ["month,baseline_peak_mw,mitigated_peak_mw,savings"] + [
        f"{m.month[0]}-{m.month[1]:02d},{_mw(m.baseline_peak_mw)},{_mw(m.mitigated_peak_mw)},{_money(m.savings)}"
        for m in report.months]
    written.append(_write(out / "plotdata" / "monthly_peaks.csv", peaks))
    return written


def emit_comparison(results, outdir) -> list:
    """``results`` maps (year_label, rating_label) -> StrategyComparison."""
    out = Path(outdir)
    strategies = list(Strategy)
    heat = ["year,rating_mw," + ",".join(s.value for s in strategies)]
    for (year, rating), cmp in results.items():
        heat.append(f"{year},{rating}," + ",".join(f"{cmp.normalized[s]:.6f}" for s in strategies))
    written = [_write(out / "plotdata" / "normalized_savings.csv", heat)]
    for (year, rating), cmp in results.items():
        tag = f"{year}_{rating}"
        table = ["strategy," + ",".join(str(m) for m in range(1, 13)) + ",annual_savings,normalized"]
        marks = ["strategy," + ",".join(str(m) for m in range(1, 13))]
        for s in strategies:
            vals = [cmp.monthly[s].get(m) for m in range(1, 13)]
            table.append(f"{s.value}," + ",".join("" if v is None else _money(v) for v in vals)
                         + f",{_money(cmp.reports[s].savings)},{cmp.normalized[s]:.6f}")
            marks.append(f"{s.value}," + ",".join("T" if cmp.marks[s].get(m) else "" for m in range(1, 13)))
        written.append(_write(out / f"compare_{tag}.csv", table))
        written.append(_write(out / f"best_months_{tag}.csv", marks))
    lines = []
    for (year, rating), cmp in results.items():
        lines.append(f"[{year} / {rating}]")
        for s in strategies:
            lines.append(f"{s.value} {s.label:<16} savings={_money(cmp.reports[s].savings)} "
                         f"normalized={cmp.normalized[s]:.4f}")
        lines.extend(f"flag: {f}" for f in cmp.flags)
    written.append(_write(out / "summary.txt", lines))
    return written


def emit_sweep(rows, outdir, resource: str, label: str = "") -> list:
    out = Path(outdir)
    table = ["rating_mw,annual_savings,marginal_savings_per_mw,battery_cycles,savings_per_cycle"]
    for r in rows:
        table.append(f"{_mw(r.rating_mw)},{_money(r.savings)},{_money(r.marginal_per_mw)},"
                     f"{r.battery_cycles:.4f},{_money(r.savings_per_cycle)}")
    written = [_write(out / f"sweep_{resource}.csv", table)]
    plot = ["rating_mw,annual_savings,marginal_savings_per_mw"] + [
        f"{_mw(r.rating_mw)},{_money(r.savings)},{_money(r.marginal_per_mw)}" for r in rows]
    written.append(_write(out / "plotdata" / f"savings_vs_rating_{resource}.csv", plot))
    lines = [label or f"sensitivity sweep: {resource}"] + [
        f"{r.rating_mw:g} MW: savings={_money(r.savings)} marginal/MW={_money(r.marginal_per_mw)}"
        for r in rows]
    written.append(_write(out / "summary.txt", lines))
    return written
