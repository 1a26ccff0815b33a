"""Level-to-curve pipeline: decomposition, periods, theta, reconstruction, verification.

Cache layout (root from ``PipelineConfig.cache_dir``, overridden by the
``MODJAC_CACHE`` environment variable)::

    <root>/N<level>/<label>.eigen     eigenvalue file, ``level N disc D`` then ``p a b``
    <root>/N<level>/<label>.periods   reduced big period matrix, ``level N class K precision B``

All cache writes go through a temporary file and an atomic rename.  A cached
period matrix is used only when its precision equals the current attempt's.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath

from . import hyperelliptic as hy
from . import modsym, periods, reconstruct, table, theta
from .errors import (PRECISION_ERRORS, BadReduction, ModjacError, PrecisionLoss,
                     SignAmbiguous, SingularCurve)
from .exact import RationalPolynomial, parse_polynomial

CACHE_ENV = "MODJAC_CACHE"

# Riemann-relation quality gate on the small period matrix
MAX_SYMMETRY_DEFECT = 1e-10
IGUSA_TOLERANCE = 1e-8


@dataclass
class PipelineConfig:
    precision_bits: int = 128
    n_terms_override: int | None = None
    prime_bound: int = 1000
    lfactor_bound: int = 100
    cache_dir: Path | None = None
    height_bound: int = 10 ** 12
    max_retries: int = 3

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")
        for name in ("prime_bound", "lfactor_bound", "height_bound"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_terms_override is not None and self.n_terms_override < 2:
            raise ValueError("n_terms_override must be at least 2")
        env = os.environ.get(CACHE_ENV)
        if env:
            self.cache_dir = Path(env)
        elif self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)


@dataclass
class CurveRecord:
    """One line of machine output.

    ``coefficients`` are ascending integers of F as strings; ``igusa`` holds
    i1, i2, i3 as exact rationals in string form.  ``status`` is one of
    verified, failed, skipped or ambiguous.
    """

    label: str
    level: int
    status: str
    hecke_field_disc: int
    coefficients: list = field(default_factory=list)
    discriminant: str | None = None
    igusa: list = field(default_factory=list)
    report: dict = field(default_factory=dict)
    known_label: str | None = None
    candidates: list = field(default_factory=list)
    message: str | None = None
    timing: float = 0.0

    def polynomial(self) -> RationalPolynomial:
        return RationalPolynomial([Fraction(c) for c in self.coefficients])

    def to_line(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> "CurveRecord":
        return cls(**json.loads(line))

    def comparable(self) -> dict:
        """Everything except wall-clock timing."""
        d = asdict(self)
        d.pop("timing")
        return d


def write_records(path, records) -> None:
    _atomic_write(Path(path), "".join(r.to_line() + "\n" for r in records))


def read_records(path) -> list[CurveRecord]:
    return [CurveRecord.from_line(ln) for ln in Path(path).read_text().splitlines() if ln.strip()]


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    tmp.replace(path)


def _poly_strings(f: RationalPolynomial) -> list[str]:
    return [str(c) for c in f.coeffs]


def _igusa_strings(f: RationalPolynomial) -> list[str]:
    return [str(x) for x in hy.igusa_algebraic(f).as_tuple()]


def _float_str(x, digits: int = 6) -> str:
    return mpmath.nstr(mpmath.mpf(x), digits)


# ---------------------------------------------------------------------------
# verification

def lfactor_report(f: RationalPolynomial, cls: modsym.NewformClass, bound: int) -> dict:
    """Compare curve and Hecke local factors at odd good primes below ``bound``."""
    checked, mismatches = [], []
    for p in modsym.primes_up_to(bound - 1):
        if p == 2 or cls.level % p == 0 or not hy.is_good_prime(f, p):
            continue
        ok = hy.curve_local_factor(f, p) == hy.frobenius_local_factor(cls, p)
        checked.append(p)
        if not ok:
            mismatches.append(p)
    return {"primes": checked, "mismatches": mismatches,
            "first_failure": mismatches[0] if mismatches else None,
            "passed": bool(checked) and not mismatches}


def igusa_report(f: RationalPolynomial, z) -> dict:
    alg = hy.igusa_algebraic(f)
    num = hy.igusa_from_theta(z)
    worst = 0.0
    for x, y in zip(alg.as_tuple(), num.as_tuple()):
        scale = max(abs(float(x)), 1.0)
        worst = max(worst, abs(complex(y) - float(x)) / scale)
    return {"relative_error": f"{worst:.3e}", "passed": worst < IGUSA_TOLERANCE}


# ---------------------------------------------------------------------------
# one class

class _Cache:
    def __init__(self, root: Path | None):
        self.root = root

    def path(self, level: int, label: str, kind: str) -> Path | None:
        if self.root is None:
            return None
        return self.root / f"N{level}" / f"{label}.{kind}"

    def load_eigenvalues(self, cls: modsym.NewformClass) -> None:
        p = self.path(cls.level, cls.label, "eigen")
        if p is None or not p.exists():
            return
        stored = modsym.ingest_eigenvalues(p, cls.label)
        if stored.radicand == cls.radicand:
            for q, v in stored.eigenvalues.items():
                cls.eigenvalues.setdefault(q, v)

    def store_eigenvalues(self, cls: modsym.NewformClass, bound: int) -> None:
        p = self.path(cls.level, cls.label, "eigen")
        if p is not None:
            p.parent.mkdir(parents=True, exist_ok=True)
            modsym.write_eigenvalues(cls, p, max([bound] + list(cls.eigenvalues)))

    def load_periods(self, cls, precision: int):
        p = self.path(cls.level, cls.label, "periods")
        if p is None or not p.exists():
            return None
        _, _, big = periods.read_period_cache(p)
        return big if big.precision == precision else None

    def store_periods(self, cls, index: int, big) -> None:
        p = self.path(cls.level, cls.label, "periods")
        if p is not None:
            p.parent.mkdir(parents=True, exist_ok=True)
            periods.write_period_cache(p, cls.level, index, big)


def _period_matrix(cls, lattice, index, precision, config, cache):
    big = cache.load_periods(cls, precision)
    if big is None:
        basis = None
        if config.n_terms_override is not None:
            basis = periods.integral_basis(cls, config.n_terms_override)
        big = periods.big_period_matrix(cls, lattice, precision, basis=basis)
        cache.store_periods(cls, index, big)
    return big


def _attempt(cls, lattice, index, precision, config, cache, report):
    with mpmath.workprec(precision):
        big = _period_matrix(cls, lattice, index, precision, config, cache)
        z = periods.small_period_matrix(big)
        eig = z.imag_min_eigenvalue()
        report.update(precision=precision, symmetry_defect=_float_str(z.symmetry_defect, 3),
                      imag_min_eigenvalue=_float_str(eig))
        if not (z.symmetry_defect < MAX_SYMMETRY_DEFECT and eig > 0):
            raise PrecisionLoss("period matrix fails the Riemann relations")
        margin = theta.min_even_thetanullwert(z)
        report["irreducibility_margin"] = _float_str(margin)
        if not theta.is_irreducible(z):
            return None, z
        f0, a = reconstruct.reconstruct_model(big, z, config.height_bound)
        report.update(monic_model=str(f0), leading_coefficient=str(a))
        f1 = RationalPolynomial([a * c for c in f0.coeffs])
        return f1, z


def process_class(cls: modsym.NewformClass, index: int, config: PipelineConfig,
                  cache: _Cache | None = None) -> CurveRecord:
    cache = cache or _Cache(config.cache_dir)
    start = time.perf_counter()
    rec = CurveRecord(cls.label, cls.level, "failed", cls.hecke_field_disc)
    try:
        cache.load_eigenvalues(cls)
        lattice = modsym.integral_homology(cls)
        divs = lattice.intersection.elementary_divisors()
        rec.report["elementary_divisors"] = divs
        if not modsym.is_principally_polarized(lattice.intersection):
            rec.status, rec.message = "skipped", "not principally polarized"
            return rec
        f1 = z = None
        last = None
        for attempt in range(config.max_retries + 1):
            precision = config.precision_bits * 2 ** attempt
            try:
                f1, z = _attempt(cls, lattice, index, precision, config, cache, rec.report)
                break
            except PRECISION_ERRORS as exc:
                last = exc
                rec.report.setdefault("escalations", []).append(f"{precision}: {type(exc).__name__}")
        else:
            raise last
        if f1 is None:
            rec.status, rec.message = "skipped", "period matrix is reducible"
            return rec
        try:
            model = reconstruct.resolve_sign(f1, cls, config.prime_bound)
        except SignAmbiguous as exc:
            rec.status, rec.message = "ambiguous", str(exc)
            rec.candidates = [_poly_strings(reconstruct.integral_model(g)) for g in exc.candidates]
            return rec
        f = reconstruct.integral_model(model.polynomial)
        rec.coefficients = _poly_strings(f)
        rec.discriminant = str(f.discriminant())
        rec.igusa = _igusa_strings(f)
        rec.report.update(sign=model.sign, sign_prime=model.separating_prime,
                          self_twist=model.self_twist)
        with mpmath.workprec(rec.report["precision"]):
            rec.report["igusa"] = igusa_report(f, z)
        rec.report["lfactor"] = lfactor_report(f, cls, config.lfactor_bound)
        rec.known_label = table.match_known(cls.level, f)
        ok = rec.report["igusa"]["passed"] and rec.report["lfactor"]["passed"]
        rec.status = "verified" if ok else "failed"
        if not ok:
            rec.message = "verification failed"
        cache.store_eigenvalues(cls, config.lfactor_bound)
    except ModjacError as exc:
        rec.status, rec.message = "failed", f"{type(exc).__name__}: {exc}"
    finally:
        rec.timing = round(time.perf_counter() - start, 3)
    return rec


# ---------------------------------------------------------------------------
# commands

def cmd_find(levels, config: PipelineConfig) -> list[CurveRecord]:
    cache = _Cache(config.cache_dir)
    records = []
    for n in levels:
        try:
            classes = modsym.decompose(modsym.build_space(n))
        except ModjacError as exc:
            records.append(CurveRecord(f"S{n}", n, "failed", 0, message=f"{type(exc).__name__}: {exc}"))
            continue
        for k, cls in enumerate(classes):
            records.append(process_class(cls, k, config, cache))
    return records


def _period_matrix_for_curve(f: RationalPolynomial, periods_file, precision):
    if periods_file is not None:
        _, _, big = periods.read_period_cache(periods_file)
        return periods.small_period_matrix(big)
    from .curveperiods import curve_period_matrix
    return periods.small_period_matrix(curve_period_matrix(f, precision))


def read_curve_file(path) -> RationalPolynomial:
    lines = [ln.split("#")[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        from .errors import ParseError
        raise ParseError(f"{path}: no polynomial")
    return parse_polynomial(" ".join(lines))


def cmd_verify(curve_file, eigenvalue_file, config: PipelineConfig, periods_file=None) -> dict:
    """Igusa (algebraic against theta) and L-factor checks for one equation.

    The period matrix comes from ``periods_file`` if given, otherwise from direct
    integration on the curve itself.
    """
    f = read_curve_file(curve_file)
    cls = modsym.ingest_eigenvalues(eigenvalue_file)
    report = {"curve": str(f), "level": cls.level}
    try:
        if f.degree not in (5, 6) or f.discriminant() == 0:
            raise SingularCurve("F must be squarefree of degree 5 or 6")
    except SingularCurve as exc:
        report["error"] = f"SingularCurve: {exc}"
        report["passed"] = False
        return report
    try:
        with mpmath.workprec(config.precision_bits):
            z = _period_matrix_for_curve(f, periods_file, config.precision_bits)
            report["igusa"] = igusa_report(f, z)
    except ModjacError as exc:
        report["igusa"] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    try:
        report["lfactor"] = lfactor_report(f, cls, config.lfactor_bound)
    except (ModjacError, BadReduction) as exc:
        report["lfactor"] = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    report["passed"] = report["igusa"]["passed"] and report["lfactor"]["passed"]
    return report


def format_table(records) -> str:
    rows = [("label", "status", "F(x)", "known")]
    for r in records:
        eq = str(r.polynomial()) if r.coefficients else (r.message or "")
        rows.append((r.label, r.status, eq, r.known_label or ""))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    out = []
    for k, row in enumerate(rows):
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def cmd_table(output_path, records) -> tuple[Path, Path]:
    """Human-readable table at ``output_path`` and JSON lines next to it (``.jsonl``)."""
    text_path = Path(output_path)
    data_path = text_path.with_name(text_path.name + ".jsonl")
    _atomic_write(text_path, format_table(records))
    write_records(data_path, records)
    return text_path, data_path
