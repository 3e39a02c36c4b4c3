"""Command-line interface: ``analyze``, ``simulate`` and ``goldens``.

Exit codes: 0 success, 1 golden mismatch, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import fields
from pathlib import Path
from typing import Mapping, Sequence, TextIO

import numpy as np

from . import clinical
from .exact_tests import PoissonPairInput, TwoByTwoInput, binomial_exact, fisher_exact
from .nulls import Family
from .procedures import ALL_PROCEDURES, ProcedureId, apply
from .simulation import SimConfig, estimate

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _fmt(x: float, precision) -> str:
    if precision is None:
        return repr(float(x))
    return f"{x:.{precision}f}"


def _parse_precision(text: str):
    if text == "full":
        return None
    try:
        digits = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("precision must be an integer or 'full'")
    if digits < 0:
        raise argparse.ArgumentTypeError("precision must be nonnegative")
    return digits


def _parse_procedures(text: str) -> list[ProcedureId]:
    names = [t for t in (s.strip() for s in text.split(",")) if t]
    if not names:
        raise UsageError("no procedures given")
    try:
        return [ProcedureId.parse(n) for n in names]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(header: Sequence[str], rows: Sequence[Sequence[str]], fmt: str, out: TextIO) -> None:
    if fmt == "delimited":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for r in rows:
        out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")


# -- analyze -------------------------------------------------------------------

def read_counts(path: Path) -> list[tuple[str, int, int]]:
    """Read ``label,x1,x2`` rows; errors carry the offending line number."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    rows = []
    reader = csv.reader(io.StringIO(text))
    header_seen = False
    for record in reader:
        lineno = reader.line_num
        if not record or all(not c.strip() for c in record):
            continue
        cells = [c.strip() for c in record]
        if not header_seen:
            header_seen = True
            if [c.lower() for c in cells] != ["label", "x1", "x2"]:
                raise UsageError(f"line {lineno}: expected header 'label,x1,x2', got {','.join(cells)!r}")
            continue
        if len(cells) != 3:
            raise UsageError(f"line {lineno}: expected 3 fields, got {len(cells)}")
        try:
            x1, x2 = int(cells[1]), int(cells[2])
        except ValueError:
            raise UsageError(f"line {lineno}: counts must be integers") from None
        if x1 < 0 or x2 < 0:
            raise UsageError(f"line {lineno}: counts must be nonnegative")
        rows.append((cells[0], x1, x2))
    if not rows:
        raise UsageError("no data rows")
    return rows


def build_family(rows, test_kind: str, n1=None, n2=None, alternative=None) -> Family:
    results = []
    for lineno, (label, x1, x2) in enumerate(rows, start=2):
        try:
            if test_kind == "FET":
                results.append(fisher_exact(TwoByTwoInput(x1, x2, n1, n2),
                                            alternative=alternative or "two-sided"))
            else:
                results.append(binomial_exact(PoissonPairInput(x1, x2),
                                              alternative=alternative or "less"))
        except ValueError as exc:
            raise UsageError(f"row {label!r} (data row {lineno - 1}): {exc}") from None
    return Family.from_results(results, labels=[r[0] for r in rows])


def analysis_table(rows, family: Family, procedures, alpha: float, precision):
    decisions = [apply(p, family, alpha) for p in procedures]
    header = ["rank", "label", "x1", "x2", "p"]
    for d in decisions:
        header += [str(d.procedure), f"{d.procedure}_reject"]
    body = []
    for rank, i in enumerate(family.order, start=1):
        label, x1, x2 = rows[i]
        line = [f"({rank})", label, str(x1), str(x2), _fmt(family.observed[i], precision)]
        for d in decisions:
            adj = "NA" if d.adjusted_p is None else _fmt(d.adjusted_p[i], precision)
            line += [adj, "1" if d.rejected[i] else "0"]
        body.append(line)
    return header, body


def cmd_analyze(args, out: TextIO) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise UsageError("--alpha must lie in (0, 1)")
    procedures = _parse_procedures(args.procedures)
    test_kind = args.test.upper()
    if test_kind == "FET" and (args.n1 is None or args.n2 is None):
        raise UsageError("FET analysis needs --n1 and --n2")
    rows = read_counts(args.input)
    family = build_family(rows, test_kind, args.n1, args.n2, args.alternative)
    header, body = analysis_table(rows, family, procedures, args.alpha, args.precision)
    _emit(header, body, args.format, out)
    return EXIT_OK


# -- simulate ------------------------------------------------------------------

_KEY_ALIASES = {"n": "sample_size", "sample_size_n": "sample_size", "lambda0": "lambda_null",
                "lambda1": "lambda_alt"}
_CONFIG_FIELDS = {f.name: f for f in fields(SimConfig)}
_INT_KEYS = {"m", "sample_size", "B", "seed"}


def parse_sim_config(text: str, seed_override=None) -> tuple[SimConfig, list[ProcedureId]]:
    """Parse ``key=value`` lines (``#`` starts a comment) into a config."""
    values: dict[str, str] = {}
    procedures = list(ALL_PROCEDURES)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "procedures":
            procedures = _parse_procedures(value)
            continue
        name = _KEY_ALIASES.get(key.lower(), key)
        if name not in _CONFIG_FIELDS and name.lower() in _CONFIG_FIELDS:
            name = name.lower()
        if name not in _CONFIG_FIELDS:
            raise UsageError(f"line {lineno}: unknown key {key!r}")
        values[name] = value
    for required in ("test_kind", "m", "pi0"):
        if required not in values:
            raise UsageError(f"missing key {required!r}")
    if values["test_kind"].upper() == "FET" and "sample_size" not in values:
        raise UsageError("missing key 'N'")
    kwargs = {}
    for name, value in values.items():
        try:
            if name == "test_kind":
                kwargs[name] = value
            elif name in _INT_KEYS:
                kwargs[name] = int(value)
            else:
                kwargs[name] = float(value)
        except ValueError:
            raise UsageError(f"invalid value for key {name!r}: {value!r}") from None
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        return SimConfig(**kwargs), procedures
    except ValueError as exc:
        raise UsageError(f"invalid config: {exc}") from None


def cmd_simulate(args, out: TextIO) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
    config, procedures = parse_sim_config(text, args.seed)
    if args.procedures:
        procedures = _parse_procedures(args.procedures)
    results = estimate(config, procedures, workers=args.workers)
    prec = args.precision
    header = ["procedure", "fwer_hat", "fwer_se", "minpow_hat", "minpow_se",
              "mean_rejections", "minpow_defined"]
    body = [[str(r.procedure), _fmt(r.fwer_hat, prec), _fmt(r.fwer_se, prec),
             _fmt(r.minpow_hat, prec), _fmt(r.minpow_se, prec),
             _fmt(r.mean_rejections, prec), "1" if r.minpow_defined else "0"]
            for r in results]
    _emit(header, body, args.format, out)
    return EXIT_OK


# -- goldens -------------------------------------------------------------------

def golden_cells(expected: Mapping | None = None):
    """Yield (table, column, row, computed, expected) for every checked cell."""
    if expected is None:
        expected = {"table1": {"P": clinical.RAW_P, **clinical.TABLE1},
                    "table2": clinical.TABLE2, "table3": clinical.TABLE3}
    fam = clinical.family()
    adjusted = {}
    for pid in ALL_PROCEDURES:
        d = apply(pid, fam, 0.05)
        if d.adjusted_p is not None:
            adjusted[str(pid)] = np.asarray(d.adjusted_p)[fam.order]
    adjusted["P"] = fam.observed[fam.order]
    for table, columns in expected.items():
        for column, values in columns.items():
            for rank, want in enumerate(values, start=1):
                yield table, column, rank, float(adjusted[column][rank - 1]), float(want)


def cmd_goldens(args=None, out: TextIO = sys.stdout, expected=None) -> int:
    failures = 0
    total = 0
    for table, column, rank, got, want in golden_cells(expected):
        total += 1
        ok = f"{got:.4f}" == f"{want:.4f}"
        failures += not ok
        out.write(f"{'PASS' if ok else 'FAIL'} {table} {column} ({rank}) "
                  f"computed={got:.4f} expected={want:.4f}\n")
    out.write(f"{total - failures}/{total} cells match\n")
    return EXIT_OK if failures == 0 else EXIT_MISMATCH


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discretefwer",
        description="FWER-controlling multiple testing for discrete p-values.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze a label,x1,x2 count file")
    a.add_argument("input", type=Path)
    a.add_argument("--test", choices=["FET", "BET", "fet", "bet"], default="FET")
    a.add_argument("--n1", type=int, help="group-1 size (FET)")
    a.add_argument("--n2", type=int, help="group-2 size (FET)")
    a.add_argument("--alternative", choices=["two-sided", "less", "greater"],
                   help="tail of the group-1 count (default: two-sided for FET, less for BET)")
    a.add_argument("--procedures", default="MBonf,ModTarone,Sidak,Bonf")
    a.add_argument("--alpha", type=float, default=0.05)
    a.add_argument("--format", choices=["table", "delimited"], default="table")
    a.add_argument("--precision", type=_parse_precision, default=4,
                   help="decimal places, or 'full'")

    s = sub.add_parser("simulate", help="Monte Carlo FWER / minimal power from a config file")
    s.add_argument("config", type=Path)
    s.add_argument("--seed", type=int)
    s.add_argument("--procedures", help="override the config's procedure list")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--format", choices=["table", "delimited"], default="delimited")
    s.add_argument("--precision", type=_parse_precision, default=4)

    sub.add_parser("goldens", help="check the embedded clinical example against published tables")
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "analyze":
            return cmd_analyze(args, out)
        if args.command == "simulate":
            return cmd_simulate(args, out)
        return cmd_goldens(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
