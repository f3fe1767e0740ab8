"""Command-line front end.

Exit codes: 0 success, 1 a check failed (nonzero residual or mismatch),
2 usage error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from gmpy2 import mpq

from tauforge.hierarchy import (EQUATIONS, KP_WEIGHTS, VARIANT_WEIGHTS, ResidualReport,
                                deformed_kp1_residual, dispersionless_residual,
                                h1_linear_residual, hirota_residual, kp_residuals, toda_residual)
from tauforge.maps import (bg_table, hurwitz_asymptotic_check, map_oracle, painleve_check,
                           triangulation_table, triangulation_trend)
from tauforge.partitions import Partition, parse_partition, partitions
from tauforge.schur import schur
from tauforge.series import Series, Truncation, TruncationError, monomial, rational
from tauforge.symmetric_group import (BudgetExceeded, KOElement, bms_oracle,
                                      double_hurwitz_oracle, generalized_oracle, hurwitz_oracle,
                                      ko_multiply, monotonic_oracle)
from tauforge.tau import (TodaFamily, genus_expansion, genus_part, named_params,
                          orlov_shcherbin_tau, toda_tau)

CLI_FAMILIES = ("hurwitz", "generalized", "bms", "monotonic", "double", "n-function", "custom-phi")
ORACLE_FAMILIES = ("hurwitz", "generalized", "bms", "monotonic", "double", "maps")
KP_DEFAULT = tuple(KP_WEIGHTS)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _fmt(x) -> str:
    x = mpq(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- families

def _aux_names(family: str, m: int | None) -> list[str]:
    if family in ("hurwitz", "monotonic", "double", "bms", "n-function"):
        return ["u"]
    if family == "generalized":
        return [f"u{i}" for i in range(1, (m or 2) + 1)]
    return []


def _finite(family: str, m: int | None) -> bool:
    """Whether the content weights are polynomial in the parameters."""
    return family in ("generalized", "n-function", "custom-phi") or (family == "bms" and m >= 0)


def family_params(family: str, m: int | None = None, d=None):
    if family == "double":
        return named_params("hurwitz")
    if family == "generalized":
        return named_params("generalized", m=m or 2)
    if family == "bms":
        if m is None:
            raise UsageError("--family bms needs --m")
        return named_params("bms", m=m)
    if family == "custom-phi":
        if d is None:
            raise UsageError("--family custom-phi needs --d")
        return named_params("custom-phi", d=d)
    if family in ("hurwitz", "monotonic", "n-function"):
        return named_params(family)
    raise UsageError(f"--family: unknown family {family!r}")


def family_trunc(family: str, weight: int, aux_degree: int | None, m: int | None = None,
                 two_sets: bool = False) -> Truncation:
    """Weight bound on p (and q), with the aux degree bound applied to the
    family parameters.  Families with non-polynomial weights default to an aux
    bound equal to the weight; polynomial ones default to exact."""
    if aux_degree is None and not _finite(family, m):
        aux_degree = weight
    aux = {v: aux_degree for v in _aux_names(family, m)} if aux_degree is not None else {}
    return Truncation(p=weight, q=weight if two_sets else None, aux=aux)


def build_tau(family: str, weight: int, aux_degree: int | None = None, m: int | None = None,
              d=None) -> Series:
    y = family_params(family, m, d)
    if family in ("double", "n-function"):
        t = family_trunc(family, weight, aux_degree, m, two_sets=True)
        return toda_tau(0, y, t, v="v" if family == "double" else None)
    return orlov_shcherbin_tau(y, family_trunc(family, weight, aux_degree, m))


# ---------------------------------------------------------------- checks

def run_checks(family: str, equations, weight: int, aux_degree: int | None = None,
               m: int | None = None, d=None, charge: int = 0) -> list[ResidualReport]:
    eqs = []
    for e in equations:
        if e == "kp":
            eqs.extend(KP_DEFAULT)
        elif e in EQUATIONS or e in VARIANT_WEIGHTS:
            eqs.append(e)
        else:
            raise UsageError(f"--equation: unknown equation {e!r}")
    reports: list[ResidualReport] = []
    kp = [e for e in eqs if e in KP_WEIGHTS or e in VARIANT_WEIGHTS]
    if kp:
        F = build_tau(family, weight, aux_degree, m, d).log()
        reports.extend(kp_residuals(F, weight, equations=kp))
        if family in ("double", "n-function"):
            for r in kp_residuals(F, weight, family="q", equations=kp):
                r.equation += "[q]"
                reports.append(r)
    genus_eqs = [e for e in eqs if e in ("kp.deformed", "kp.dispersionless", "kp.h1")]
    if genus_eqs:
        if family in ("double", "n-function"):
            raise UsageError(f"--equation {genus_eqs[0]} needs a one-set family")
        y = family_params(family, m, d)
        Fh = genus_expansion(y, family_trunc(family, weight, aux_degree, m), genus_max=1)
        for e in genus_eqs:
            if e == "kp.deformed":
                reports.append(deformed_kp1_residual(Fh))
            elif e == "kp.dispersionless":
                reports.append(dispersionless_residual(genus_part(Fh, 0)))
            else:
                reports.append(h1_linear_residual(genus_part(Fh, 0), genus_part(Fh, 1)))
    if "hirota.q3" in eqs:
        if family in ("double", "n-function"):
            raise UsageError("--equation hirota.q3 needs a one-set family")
        reports.extend(hirota_residual(build_tau(family, weight, aux_degree, m, d), ["q3"]))
    if "toda.p1q1" in eqs:
        y = family_params(family, m, d)
        fam = TodaFamily(y, family_trunc(family, weight, aux_degree, m, two_sets=True))
        reports.append(toda_residual(fam, charge))
    order = {e: i for i, e in enumerate(EQUATIONS + tuple(VARIANT_WEIGHTS))}
    return sorted(reports, key=lambda r: (order.get(r.equation.split("[")[0].split(".q")[0], 99),
                                          r.equation))


# ---------------------------------------------------------------- oracle vs formula

def _key(mu=(), nu=None, **aux) -> tuple:
    spec = {}
    for part, e in Partition(mu).multiplicities().items():
        spec[f"p{part}"] = e
    if nu is not None:
        for part, e in Partition(nu).multiplicities().items():
            spec[f"q{part}"] = e
    spec.update({k: v for k, v in aux.items() if v})
    return monomial(spec)


def _keys(family: str, n: int, m: int, degeneracies=None):
    """(label, series monomial, scale) for every key an oracle can report;
    the oracle value equals the coefficient of the monomial divided by scale."""
    if family in ("hurwitz", "monotonic"):
        scale = mpq(1, math.factorial(m)) if family == "hurwitz" else mpq(1)
        for mu in partitions(n):
            yield str(mu), _key(mu, u=m), scale
    elif family == "bms":
        for k in range(m * max(n - 1, 0) + 1):
            for mu in partitions(n):
                yield f"k={k} {mu}", _key(mu, u=k), mpq(1)
    elif family == "generalized":
        aux = {f"u{i}": k for i, k in enumerate(_degs(m, degeneracies), 1)}
        for mu in partitions(n):
            yield str(mu), _key(mu, **aux), mpq(1)
    elif family == "double":
        for mu in partitions(n):
            for nu in partitions(n):
                yield f"{mu} {nu}", _key(mu, nu, u=m, v=n), mpq(1, math.factorial(m))
    else:
        raise UsageError(f"--family: no oracle comparison for {family!r}")


def _degs(m: int, degeneracies) -> list[int]:
    return list(degeneracies) if degeneracies is not None else [1] * m


def oracle_values(family: str, n: int, m: int, connected: bool, budget: int | None = None,
                  degeneracies=None) -> dict[str, mpq]:
    """Brute-force values keyed by display label."""
    if family == "hurwitz":
        raw = hurwitz_oracle(n, m, connected, budget)
    elif family == "monotonic":
        raw = monotonic_oracle(n, m, connected, budget)
    elif family == "bms":
        return {f"k={k} {mu}": v for (k, mu), v in bms_oracle(n, m, connected, budget).items()}
    elif family == "generalized":
        raw = generalized_oracle(n, _degs(m, degeneracies), connected, budget)
    elif family == "double":
        return {f"{mu} {nu}": v
                for (mu, nu), v in double_hurwitz_oracle(n, m, connected, budget).items()}
    else:
        raise UsageError(f"--family: no oracle comparison for {family!r}")
    return {str(mu): v for mu, v in raw.items()}


def formula_series(family: str, n: int, m: int, connected: bool, degeneracies=None) -> Series:
    """The tau-function (or its log) whose coefficients the oracle counts."""
    if family in ("hurwitz", "monotonic"):
        tau = orlov_shcherbin_tau(named_params(family), Truncation(p=n, aux={"u": m}))
    elif family == "bms":
        tau = orlov_shcherbin_tau(named_params("bms", m=m), Truncation(p=n))
    elif family == "generalized":
        degs = _degs(m, degeneracies)
        t = Truncation(p=n, aux={f"u{i}": k for i, k in enumerate(degs, 1)})
        tau = orlov_shcherbin_tau(named_params("generalized", m=len(degs)), t)
    elif family == "double":
        t = Truncation(p=n, q=n, aux={"u": m, "v": n})
        tau = toda_tau(0, named_params("hurwitz"), t, v="v")
    else:
        raise UsageError(f"--family: no oracle comparison for {family!r}")
    return tau.log() if connected else tau


def oracle_vs_formula(family: str, n: int, m: int, budget: int | None = None,
                      degeneracies=None, modes=(False, True)) -> list[dict]:
    """Oracle value and series coefficient side by side for every possible key,
    in both connectivity modes."""
    rows = []
    for connected in modes:
        oracle = oracle_values(family, n, m, connected, budget, degeneracies)
        F = formula_series(family, n, m, connected, degeneracies)
        seen = set()
        for label, mono, scale in _keys(family, n, m, degeneracies):
            seen.add(label)
            ov = oracle.get(label, mpq(0))
            fv = F.coefficient(mono) / scale
            if ov or fv:
                rows.append({"mode": "connected" if connected else "all", "key": label,
                             "oracle": ov, "formula": fv, "match": ov == fv})
        for label in sorted(set(oracle) - seen):
            rows.append({"mode": "connected" if connected else "all", "key": label,
                         "oracle": oracle[label], "formula": mpq(0), "match": False})
    return rows


# ---------------------------------------------------------------- output

def _table(header: list[str], rows: list[list], fmt: str) -> str:
    rows = [[_cell(x) for x in r] for r in rows]
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(r, widths)).rstrip()
             for r in [header] + rows]
    return "\n".join(lines) + "\n"


def _cell(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, (mpq, type(mpq(0).numerator))):
        return _fmt(x)
    return str(x)


def _series_out(s: Series, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(s.to_json_obj(), indent=2) + "\n"
    if fmt == "csv":
        from tauforge.series import mono_str
        return _table(["monomial", "coeff"], [[mono_str(m) or "1", c] for m, c in s], "csv")
    return str(s) + "\n"


def _reports_out(reports: list[ResidualReport], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.to_json_obj() for r in reports], indent=2) + "\n"
    if fmt == "csv":
        return _table(["equation", "pass", "max_weight", "residual_terms"],
                      [[r.equation, r.passed, r.max_weight, len(r.residual)] for r in reports], "csv")
    lines = []
    for r in reports:
        lines.append(str(r))
        if not r.passed:
            lines.append(f"  residual: {r.residual}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands

def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")


def _positive(args, *names):
    for name in names:
        v = getattr(args, name)
        if v is not None and v < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")


def _d_list(args):
    if args.d is None:
        return None
    try:
        return [rational(x) for x in args.d.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--d: {exc}") from exc


def cmd_tau(args) -> tuple[str, int]:
    _need(args, "family", "weight")
    _positive(args, "weight")
    tau = build_tau(args.family, args.weight, args.aux_degree, args.m, _d_list(args))
    if args.log:
        tau = tau.log()
    return _series_out(tau, args.format), EXIT_OK


def cmd_check(args) -> tuple[str, int]:
    _need(args, "family", "weight")
    _positive(args, "weight")
    eqs = args.equation or ["kp"]
    reports = run_checks(args.family, eqs, args.weight, args.aux_degree, args.m,
                         _d_list(args), charge=args.n or 0)
    ok = all(r.passed for r in reports)
    return _reports_out(reports, args.format), EXIT_OK if ok else EXIT_CHECK


def _degeneracies(args):
    if args.degeneracies is None:
        return None
    try:
        return [int(x) for x in args.degeneracies.split(",")]
    except ValueError as exc:
        raise UsageError(f"--degeneracies: {exc}") from exc


def cmd_oracle(args) -> tuple[str, int]:
    _need(args, "family", "n")
    fam = args.family
    if fam == "maps":
        vt = parse_partition(args.partition[0]) if args.partition else None
        v = map_oracle(args.n, vertex_type=vt, face_count=args.m, connected=args.connected,
                       rooted=args.rooted, budget=args.budget)
        return _table(["n", "vertex_type", "faces", "value"],
                      [[args.n, str(vt) if vt is not None else "*",
                        args.m if args.m is not None else "*", v]], args.format), EXIT_OK
    if fam not in ORACLE_FAMILIES:
        raise UsageError(f"--family: expected one of {', '.join(ORACLE_FAMILIES)}")
    if fam != "generalized" or args.degeneracies is None:
        _need(args, "m")
    vals = oracle_values(fam, args.n, args.m if args.m is not None else 0, args.connected,
                         args.budget, _degeneracies(args))
    return _table(["key", "value"], [[k, v] for k, v in vals.items()], args.format), EXIT_OK


def cmd_oracle_vs_formula(args) -> tuple[str, int]:
    _need(args, "family", "n")
    if args.family != "generalized" or args.degeneracies is None:
        _need(args, "m")
    rows = oracle_vs_formula(args.family, args.n, args.m if args.m is not None else 0,
                             args.budget, _degeneracies(args))
    ok = all(r["match"] for r in rows)
    out = _table(["mode", "key", "oracle", "formula", "match"],
                 [[r["mode"], r["key"], r["oracle"], r["formula"], r["match"]] for r in rows],
                 args.format)
    return out, EXIT_OK if ok else EXIT_CHECK


def cmd_triangulations(args) -> tuple[str, int]:
    _need(args, "nmax")
    _positive(args, "nmax")
    table = triangulation_table(args.nmax, args.gmax)
    if args.format == "csv":
        return table.to_csv(), EXIT_OK
    return _table(["n", "g", "t", "T"], [list(r) for r in table.rows()], args.format), EXIT_OK


def cmd_bg(args) -> tuple[str, int]:
    _need(args, "gmax")
    table = bg_table(args.gmax)
    if args.format == "csv":
        return table.to_csv(), EXIT_OK
    return _table(["g", "b_g"], [[g, b] for g, b in enumerate(table.b)], args.format), EXIT_OK


def cmd_painleve(args) -> tuple[str, int]:
    _need(args, "gmax")
    r = painleve_check(args.gmax)
    return _reports_out([r], args.format), EXIT_OK if r.passed else EXIT_CHECK


def cmd_asymptotics(args) -> tuple[str, int]:
    _need(args, "g", "nmax")
    kind = args.family or "triangulations"
    if args.nmax < 2:
        raise UsageError("--nmax must be at least 2")
    lo = args.nmax // 2
    if kind == "triangulations":
        rep = triangulation_trend(args.g, [lo, args.nmax])
    elif kind == "hurwitz":
        rep = hurwitz_asymptotic_check(args.nmax, args.g)
    else:
        raise UsageError("--family: expected triangulations or hurwitz")
    improves = rep.improves(lo, args.nmax)
    rows = [[n, repr(float(r)), repr(abs(float(r) - 1))] for n, r in rep.points if n in (lo, args.nmax)]
    out = _table(["n", "ratio", "deviation"], rows, args.format)
    if args.format == "plain":
        out = f"{rep.label}\n" + out + f"improves: {improves}\n"
    return out, EXIT_OK if improves else EXIT_CHECK


def cmd_schur(args) -> tuple[str, int]:
    _need(args, "partition")
    mu = parse_partition(args.partition[0])
    return _series_out(schur(mu, args.weight), args.format), EXIT_OK


def cmd_ko_multiply(args) -> tuple[str, int]:
    if not args.partition or len(args.partition) != 2:
        raise UsageError("ko-multiply needs exactly two --partition arguments")
    a, b = (KOElement.basis(parse_partition(x)) for x in args.partition)
    prod = ko_multiply(a, b)
    return _table(["class", "coeff"], [[str(mu), c] for mu, c in prod.terms()], args.format), EXIT_OK


COMMANDS = {
    "tau": cmd_tau,
    "check": cmd_check,
    "oracle": cmd_oracle,
    "oracle-vs-formula": cmd_oracle_vs_formula,
    "triangulations": cmd_triangulations,
    "bg": cmd_bg,
    "painleve": cmd_painleve,
    "asymptotics": cmd_asymptotics,
    "schur": cmd_schur,
    "ko-multiply": cmd_ko_multiply,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tauforge", description="Exact KP/Toda tau-functions, oracles and map counts.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--weight", type=int, help="weight bound on the p (and q) variables")
    p.add_argument("--aux-degree", type=int, help="degree bound on the family parameters")
    p.add_argument("--family", help="family or kind selector")
    p.add_argument("--partition", action="append", help="partition, e.g. [3,2,2] or '2^2 3^1'")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--g", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--gmax", type=int)
    p.add_argument("--format", choices=("json", "csv", "plain"), default="plain")
    p.add_argument("--out", help="write the result to this file instead of stdout")
    p.add_argument("--budget", type=int, help="enumeration budget (default from TAUFORGE_BUDGET)")
    p.add_argument("--equation", action="append", help=f"equation id ({', '.join(EQUATIONS)}) or 'kp'")
    p.add_argument("--degeneracies", help="comma-separated k_1,...,k_m for the generalized oracle")
    p.add_argument("--d", help="comma-separated phi coefficients d_0,d_1,... for custom-phi")
    p.add_argument("--connected", action="store_true", help="connected counts only")
    p.add_argument("--rooted", action="store_true", help="rooted map counts")
    p.add_argument("--log", action="store_true", help="print log tau instead of tau")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.family is not None and args.command in ("tau", "check") and args.family not in CLI_FAMILIES:
        print(f"tauforge: error: --family: expected one of {', '.join(CLI_FAMILIES)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out, code = COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"tauforge: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, TruncationError, ValueError) as exc:
        print(f"tauforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
