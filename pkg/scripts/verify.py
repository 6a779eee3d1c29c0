r"""
scripts/verify.py

Mechanical verification of R-matrices and the algebras they define:
Yang-Baxter and braid equations, Hecke and involutivity conditions, the
classical limit, RTT and differential-calculus relations, and entry-by-entry
comparison against the published listings.

Every check returns a VerificationReport; a failed check is a report with
residual entries, never an exception.
"""

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from scripts.contraction import check_equivalence_s, check_map_identities
from scripts.exact_ring import FIELD, Q, as_ratfunc, evaluate, format_scalar
from scripts.golden import load_r_listing
from scripts.qplane import admissibility_scan_gl3, coefficient_term
from scripts.rmatrix import DOMAINS, RATFUNC, RMatrix, tensor_embed
from utils.config import get_settings
from utils.logger import logger

Generator = Tuple[str, int, int]
Monomial = Tuple[Generator, Generator]

GENERATOR_ORDER = {"M": 0, "dM": 1}


@dataclass
class VerificationReport:
    check: str
    passed: bool
    residuals: List[dict] = field(default_factory=list)
    elapsed_ms: int = 0
    total_residuals: int = 0
    details: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        data = {
            "check": self.check,
            "pass": self.passed,
            "residuals": self.residuals,
            "elapsed_ms": self.elapsed_ms,
        }
        if self.total_residuals > len(self.residuals):
            data["total_residuals"] = self.total_residuals
        data.update(self.details)
        return data

    @classmethod
    def from_dict(cls, data: dict, elapsed_ms: int = 0) -> "VerificationReport":
        extra = {k: v for k, v in data.items() if k not in ("check", "pass", "residuals")}
        return cls(data["check"], data["pass"], list(data["residuals"]), elapsed_ms, len(data["residuals"]), extra)


def _term_count(value) -> int:
    value = as_ratfunc(value)
    return len(value.numer) + (len(value.denom) if value.denom != 1 else 0)


def _finish(check: str, residuals: List[dict], started: float, full: bool = False, **details) -> VerificationReport:
    """Sort residuals by size, truncate unless full, and log the outcome."""
    ordered = sorted(residuals, key=lambda item: (-item["terms"], str(item.get("row")), str(item.get("col"))))
    limit = len(ordered) if full else get_settings().residual_limit
    report = VerificationReport(
        check=check,
        passed=not residuals,
        residuals=ordered[:limit],
        elapsed_ms=int((time.perf_counter() - started) * 1000),
        total_residuals=len(residuals),
        details=details,
    )
    if report.passed:
        logger.info(f"{check}: pass ({report.elapsed_ms} ms)")
    else:
        logger.warning(f"{check}: FAIL with {len(residuals)} residual entries")
    return report


def _triple(index: int, dimension: int) -> List[int]:
    a, rest = divmod(index, dimension**2)
    b, c = divmod(rest, dimension)
    return [a + 1, b + 1, c + 1]


def _matrix_residuals(difference: DomainMatrix, dimension: int, unpack: Callable) -> List[dict]:
    residuals = []
    for r, row in difference.to_dod().items():
        for c, value in row.items():
            if value:
                residuals.append({
                    "row": unpack(r, dimension),
                    "col": unpack(c, dimension),
                    "value": format_scalar(value),
                    "terms": _term_count(value),
                })
    return residuals


def _rmatrix_residuals(difference: RMatrix) -> List[dict]:
    return [
        {"row": list(row), "col": list(col), "value": format_scalar(value), "terms": _term_count(value)}
        for (row, col), value in difference.sorted_entries()
    ]


def check_ybe(matrix: RMatrix, full: bool = False) -> VerificationReport:
    """R12 R13 R23 - R23 R13 R12 = 0 on the triple tensor product."""
    started = time.perf_counter()
    logger.info(f"FUNCTION START: check_ybe with N={matrix.dimension}, ring={matrix.ring}")
    r12, r13, r23 = (tensor_embed(matrix, legs) for legs in ("12", "13", "23"))
    difference = r12.matmul(r13).matmul(r23) - r23.matmul(r13).matmul(r12)
    return _finish("ybe", _matrix_residuals(difference, matrix.dimension, _triple), started, full)


def check_ybe_numeric(matrix: RMatrix, v0, h0, full: bool = False) -> VerificationReport:
    """Yang-Baxter check of R specialized at the rational point v = v0, h = h0."""
    specialized = matrix.as_ring(RATFUNC).map_values(lambda value: evaluate(value, v0, h0))
    report = check_ybe(specialized, full)
    report.check = "ybe-numeric"
    report.details = {"v": str(v0), "h": str(h0)}
    return report


def check_braid(matrix: RMatrix, full: bool = False) -> VerificationReport:
    """Rhat12 Rhat23 Rhat12 = Rhat23 Rhat12 Rhat23 with Rhat = P R."""
    started = time.perf_counter()
    rhat = matrix.rhat()
    b12, b23 = tensor_embed(rhat, "12"), tensor_embed(rhat, "23")
    difference = b12.matmul(b23).matmul(b12) - b23.matmul(b12).matmul(b23)
    return _finish("braid", _matrix_residuals(difference, matrix.dimension, _triple), started, full)


def check_hecke(matrix: RMatrix, full: bool = False) -> VerificationReport:
    """(Rhat - q)(Rhat + 1/q) = 0."""
    started = time.perf_counter()
    rhat = matrix.as_ring(RATFUNC).rhat()
    identity = RMatrix.identity(matrix.dimension, RATFUNC)
    product = (rhat - identity.scale(Q)) @ (rhat + identity.scale(1 / Q))
    return _finish("hecke", _rmatrix_residuals(product), started, full)


def check_involutive(matrix: RMatrix, full: bool = False) -> VerificationReport:
    """Rhat^2 = 1."""
    started = time.perf_counter()
    rhat = matrix.rhat()
    difference = rhat @ rhat - RMatrix.identity(matrix.dimension, matrix.ring)
    return _finish("involutive", _rmatrix_residuals(difference), started, full)


def check_classical_limit(matrix: RMatrix, full: bool = False) -> VerificationReport:
    """At h = 0 the contracted matrix is the identity."""
    started = time.perf_counter()
    difference = matrix.specialize_h(0) - RMatrix.identity(matrix.dimension, matrix.ring)
    return _finish("classical-limit", _rmatrix_residuals(difference), started, full)


def golden_compare(matrix: RMatrix, listing: str, size: Optional[int] = None, full: bool = False) -> VerificationReport:
    """
    Compare a contracted matrix with a published listing, both directly and
    through its flip conjugate P R P. The report names the variant that
    matched ("R", "PRP" or "none"); residuals are those of the direct
    comparison.
    """
    started = time.perf_counter()
    target = load_r_listing(listing, size)
    direct = matrix - target
    flipped = matrix.flip_conjugate() - target
    if not direct.entries:
        variant = "R"
    elif not flipped.entries:
        variant = "PRP"
    else:
        variant = "none"
    residuals = [] if variant != "none" else _rmatrix_residuals(direct)
    label = listing if size is None else f"{listing}({size})"
    return _finish(f"golden:{label}", residuals, started, full, variant=variant)


@dataclass(frozen=True)
class FreeQuadRelation:
    """sum c * G1 G2 over generators ("M", a, b) and ("dM", a, b)."""

    coefficients: Dict[Monomial, object] = field(default_factory=dict)

    def terms(self) -> List[Tuple[Monomial, object]]:
        return sorted(self.coefficients.items(), key=lambda item: _monomial_key(item[0]))

    def to_text(self) -> str:
        pieces = [
            coefficient_term(coeff, f"{first[0]}_{first[1]}{first[2]} {second[0]}_{second[1]}{second[2]}")
            for (first, second), coeff in self.terms()
        ]
        return " + ".join(pieces).replace("+ -", "- ") + " = 0"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"monomial": [list(first), list(second)], "coeff": format_scalar(coeff)}
                for (first, second), coeff in self.terms()
            ]
        }


def _generator_key(gen: Generator) -> Tuple[int, int, int]:
    return (GENERATOR_ORDER[gen[0]], gen[1], gen[2])


def _monomial_key(monomial: Monomial):
    return (_generator_key(monomial[0]), _generator_key(monomial[1]))


def canonical_relations(raw: Iterable[Dict[Monomial, object]]) -> List[FreeQuadRelation]:
    """Reduced echelon basis over RatFunc with monomials in generator order."""
    rows = [{m: as_ratfunc(c) for m, c in relation.items() if c} for relation in raw]
    rows = [row for row in rows if row]
    if not rows:
        return []
    columns = sorted({m for row in rows for m in row}, key=_monomial_key)
    position = {m: c for c, m in enumerate(columns)}
    dod = {r: {position[m]: value for m, value in row.items()} for r, row in enumerate(rows)}
    reduced, pivots = DomainMatrix(dod, (len(rows), len(columns)), DOMAINS[RATFUNC]).rref()
    reduced_dod = reduced.to_dod()
    return [
        FreeQuadRelation({columns[c]: value for c, value in reduced_dod.get(r, {}).items() if value})
        for r in range(len(pivots))
    ]


def relation_spans_equal(left: List[FreeQuadRelation], right: List[FreeQuadRelation]) -> bool:
    return [r.coefficients for r in canonical_relations(x.coefficients for x in left)] == [
        r.coefficients for r in canonical_relations(x.coefficients for x in right)
    ]


def relabel_relations(relations: List[FreeQuadRelation], permutation: Dict[int, int]) -> List[FreeQuadRelation]:
    """Rename every generator X_ab to X_{p(a) p(b)} and re-reduce."""

    def rename(gen: Generator) -> Generator:
        return (gen[0], permutation[gen[1]], permutation[gen[2]])

    return canonical_relations(
        {(rename(first), rename(second)): coeff for (first, second), coeff in relation.coefficients.items()}
        for relation in relations
    )


def _rows(matrix: RMatrix) -> Dict[tuple, List[tuple]]:
    rows: Dict[tuple, List[tuple]] = {}
    for (row, col), value in matrix.entries.items():
        rows.setdefault(row, []).append((col, value))
    return rows


def _cols(matrix: RMatrix) -> Dict[tuple, List[tuple]]:
    cols: Dict[tuple, List[tuple]] = {}
    for (row, col), value in matrix.entries.items():
        cols.setdefault(col, []).append((row, value))
    return cols


def _add(target: Dict[Monomial, object], monomial: Monomial, value) -> None:
    target[monomial] = target.get(monomial, FIELD.zero) + as_ratfunc(value)


def rtt_relations(matrix: RMatrix) -> List[FreeQuadRelation]:
    """
    Entries of R M1 M2 - M2 M1 R as free-algebra elements:

        sum_ab R_(ij),(ab) M_ak M_bl - sum_cd M_jd M_ic R_(cd),(kl)

    reduced to an independent basis.
    """
    size = matrix.dimension
    logger.info(f"FUNCTION START: rtt_relations with N={size}")
    rows, cols = _rows(matrix), _cols(matrix)
    span = range(1, size + 1)
    raw = []
    for i in span:
        for j in span:
            for k in span:
                for l in span:
                    relation: Dict[Monomial, object] = {}
                    for (a, b), value in rows.get((i, j), []):
                        _add(relation, (("M", a, k), ("M", b, l)), value)
                    for (c, d), value in cols.get((k, l), []):
                        _add(relation, (("M", j, d), ("M", i, c)), -as_ratfunc(value))
                    raw.append(relation)
    relations = canonical_relations(raw)
    logger.info(f"RTT relations: {len(relations)} independent")
    return relations


def wz_relations(matrix: RMatrix, family: str = "both") -> List[FreeQuadRelation]:
    """
    Differential calculus on the quantum matrix group:

        M2 dM1 - R12 dM1 M2 R21 = 0     (family "first")
        dM2 dM1 + R12 dM1 dM2 R21 = 0   (family "second")

    with R21 = P R P, reduced to an independent basis.
    """
    if family not in ("first", "second", "both"):
        raise ValueError(f"Unknown relation family '{family}', expected first, second or both.")
    size = matrix.dimension
    logger.info(f"FUNCTION START: wz_relations with N={size}, family={family}")
    rows, cols21 = _rows(matrix), _cols(matrix.flip_conjugate())
    span = range(1, size + 1)
    raw = []
    for i in span:
        for j in span:
            for k in span:
                for l in span:
                    sandwich = [
                        ((a, b), (c, d), left * right)
                        for (a, b), left in rows.get((i, j), [])
                        for (c, d), right in cols21.get((k, l), [])
                    ]
                    if family in ("first", "both"):
                        relation: Dict[Monomial, object] = {(("M", j, l), ("dM", i, k)): FIELD.one}
                        for (a, b), (c, d), value in sandwich:
                            _add(relation, (("dM", a, c), ("M", b, d)), -as_ratfunc(value))
                        raw.append(relation)
                    if family in ("second", "both"):
                        relation = {(("dM", j, l), ("dM", i, k)): FIELD.one}
                        for (a, b), (c, d), value in sandwich:
                            _add(relation, (("dM", a, c), ("dM", b, d)), value)
                        raw.append(relation)
    relations = canonical_relations(raw)
    logger.info(f"Differential relations ({family}): {len(relations)} independent")
    return relations


MATRIX_CHECKS = {
    "ybe": check_ybe,
    "braid": check_braid,
    "hecke": check_hecke,
    "involutive": check_involutive,
    "classical-limit": check_classical_limit,
}
STANDALONE_CHECKS = {
    "map-identities": check_map_identities,
    "equivalence-s": check_equivalence_s,
    "scan-gl3": admissibility_scan_gl3,
}
CHECK_NAMES = tuple(sorted(list(MATRIX_CHECKS) + list(STANDALONE_CHECKS)))


def run_checks(
    names: Iterable[str],
    matrix: Optional[RMatrix] = None,
    golden: Optional[Tuple[str, Optional[int]]] = None,
    full: bool = False,
) -> List[VerificationReport]:
    """
    Run the named checks and return their reports sorted by check name.
    Matrix checks need `matrix`; `golden` adds a listing comparison.
    """
    reports = []
    for name in sorted(set(names)):
        if name in MATRIX_CHECKS:
            if matrix is None:
                raise ValueError(f"Check '{name}' needs an R-matrix.")
            reports.append(MATRIX_CHECKS[name](matrix, full))
        elif name in STANDALONE_CHECKS:
            started = time.perf_counter()
            result = STANDALONE_CHECKS[name]()
            reports.append(VerificationReport.from_dict(result, int((time.perf_counter() - started) * 1000)))
        else:
            raise ValueError(f"Unknown check '{name}', expected one of {', '.join(CHECK_NAMES)}.")
    if golden is not None:
        if matrix is None:
            raise ValueError("A golden comparison needs an R-matrix.")
        reports.append(golden_compare(matrix, golden[0], golden[1], full))
    return sorted(reports, key=lambda report: report.check)


def bundle_to_json(reports: List[VerificationReport]) -> dict:
    return {"pass": all(report.passed for report in reports), "reports": [report.to_json() for report in reports]}
