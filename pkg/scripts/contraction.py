r"""
scripts/contraction.py

Singular maps g and the contraction

    R_h = lim_{q -> 1} (g (x) g)^{-1} R_q (g (x) g)

together with the transformed bilinear form C = lim g^t C' g and the GL(3)
map identities and equivalence checks.

A ContractionMap is upper triangular with unit diagonal; its strictly upper
entries are finite constants or carry the singular factor h/(q - 1). The
limit is always taken after the full exact conjugation.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from scripts.exact_ring import (
    FIELD,
    HRING,
    SINGULAR,
    NonPolynomialInH,
    PoleAtQ1,
    as_ratfunc,
    format_scalar,
    limit_q1,
    order_at_q1,
    parse_scalar,
    v_power,
)
from scripts.rmatrix import (
    DOMAINS,
    HPOLY,
    RATFUNC,
    RMatrix,
    SeriesSpec,
    build_r_A,
    kron,
)
from utils.logger import logger

Index = Tuple[int, int]

GL3_MAPS = ("g1", "g2", "g3")
GL3_PARAMS = {"g1": ("beta",), "g2": ("alpha", "beta"), "g3": ("alpha", "gamma")}
GL3_SINGULAR_SLOT = {"g1": (1, 2), "g2": (2, 3), "g3": (1, 3)}
GL3_PARAM_SLOT = {"alpha": (1, 2), "beta": (1, 3), "gamma": (2, 3)}


class MapError(ValueError):
    """Raised for malformed maps or map parameters."""


class ContractionSingular(ValueError):
    """
    The conjugated object has entries with a pole at q=1 (or a value that is
    not polynomial in h). Carries every offending entry, sorted by index.
    """

    def __init__(self, subject: str, offending: List[dict]):
        self.subject = subject
        self.offending = sorted(offending, key=lambda item: (item["row"], item["col"]))
        worst = min((item["order"] for item in self.offending), default=0)
        super().__init__(
            f"{subject}: {len(self.offending)} entries are singular at q=1 (lowest order {worst})"
        )

    def orders(self) -> Dict[tuple, int]:
        return {(item["row"], item["col"]): item["order"] for item in self.offending}

    def report(self) -> dict:
        return {
            "subject": self.subject,
            "obstruction": True,
            "entries": [
                {
                    "row": list(item["row"]) if isinstance(item["row"], tuple) else item["row"],
                    "col": list(item["col"]) if isinstance(item["col"], tuple) else item["col"],
                    "order": item["order"],
                    "value": item["value"],
                }
                for item in self.offending
            ],
        }


@dataclass(frozen=True)
class LinearMap:
    """N x N matrix over RatFunc, keyed by 1-based (row, col); zeros dropped."""

    dimension: int
    entries: Dict[Index, object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), value in self.entries.items():
            if not (1 <= i <= self.dimension and 1 <= j <= self.dimension):
                raise MapError(f"Index ({i}, {j}) out of range 1..{self.dimension}.")
            value = as_ratfunc(value)
            if value:
                clean[(i, j)] = value
        object.__setattr__(self, "entries", clean)

    @classmethod
    def identity(cls, dimension: int) -> "LinearMap":
        return cls(dimension, {(i, i): 1 for i in range(1, dimension + 1)})

    @classmethod
    def from_domain_matrix(cls, matrix: DomainMatrix) -> "LinearMap":
        entries = {}
        for r, row in matrix.to_dod().items():
            for c, value in row.items():
                entries[(r + 1, c + 1)] = value
        return cls(matrix.shape[0], entries)

    def get(self, i: int, j: int):
        return self.entries.get((i, j), FIELD.zero)

    def to_domain_matrix(self) -> DomainMatrix:
        dod: Dict[int, Dict[int, object]] = {}
        for (i, j), value in self.entries.items():
            dod.setdefault(i - 1, {})[j - 1] = value
        return DomainMatrix(dod, (self.dimension, self.dimension), DOMAINS[RATFUNC])

    def compose(self, other: "LinearMap") -> "LinearMap":
        """Matrix product self * other."""
        return LinearMap.from_domain_matrix(self.to_domain_matrix().matmul(other.to_domain_matrix()))

    def inverse(self) -> "LinearMap":
        try:
            inverse = self.to_domain_matrix().to_dense().inv()
        except Exception as e:
            raise MapError(f"Map is not invertible: {e}")
        return LinearMap.from_domain_matrix(inverse)

    def transpose(self) -> "LinearMap":
        return LinearMap(self.dimension, {(j, i): value for (i, j), value in self.entries.items()})

    def is_constant(self) -> bool:
        """True when no entry depends on q or h."""
        return all(value.numer.is_ground and value.denom.is_ground for value in self.entries.values())

    def tensor_square(self) -> DomainMatrix:
        matrix = self.to_domain_matrix()
        return kron(matrix, matrix)

    def to_json(self) -> dict:
        return {
            "N": self.dimension,
            "entries": [
                {"row": i, "col": j, "value": format_scalar(value)}
                for (i, j), value in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinearMap":
        try:
            entries = {(int(item["row"]), int(item["col"])): parse_scalar(str(item["value"])) for item in data["entries"]}
            return cls(int(data["N"]), entries)
        except (KeyError, TypeError) as e:
            raise MapError(f"Malformed map JSON: {e}")


class ContractionMap(LinearMap):
    """Upper-triangular LinearMap with unit diagonal."""

    def __post_init__(self):
        super().__post_init__()
        for i in range(1, self.dimension + 1):
            if self.get(i, i) != FIELD.one:
                raise MapError(f"Contraction maps have a unit diagonal; entry ({i}, {i}) is {format_scalar(self.get(i, i))}.")
        for (i, j) in self.entries:
            if i > j:
                raise MapError(f"Contraction maps are upper triangular; entry ({i}, {j}) is nonzero.")

    @classmethod
    def from_map(cls, linear: LinearMap) -> "ContractionMap":
        return cls(linear.dimension, dict(linear.entries))

    @classmethod
    def from_json(cls, data: dict) -> "ContractionMap":
        return cls.from_map(LinearMap.from_json(data))


def _check_finite_parameter(name: str, value) -> object:
    value = as_ratfunc(value)
    if not value:
        return value
    if any(monom[1] for monom in value.numer.keys()) or any(monom[1] for monom in value.denom.keys()):
        raise MapError(f"Parameter {name} must not depend on h, got {format_scalar(value)}.")
    if order_at_q1(value) < 0:
        raise MapError(f"Parameter {name} must be finite at q=1, got {format_scalar(value)}.")
    return value


def gl3_matrix(which: str, lead, params: Optional[Dict[str, object]] = None) -> ContractionMap:
    """
    The GL(3) map g1, g2 or g3 with an arbitrary value `lead` in its singular
    slot, e.g. g1(lead, beta) = I + lead e_12 + beta e_13.
    """
    if which not in GL3_MAPS:
        raise MapError(f"Unknown GL(3) map '{which}', expected one of {', '.join(GL3_MAPS)}.")
    params = dict(params or {})
    unknown = set(params) - set(GL3_PARAMS[which])
    if unknown:
        raise MapError(f"{which} takes parameters {', '.join(GL3_PARAMS[which])}; got {', '.join(sorted(unknown))}.")
    entries: Dict[Index, object] = {(i, i): 1 for i in (1, 2, 3)}
    entries[GL3_SINGULAR_SLOT[which]] = lead
    for name in GL3_PARAMS[which]:
        entries[GL3_PARAM_SLOT[name]] = as_ratfunc(params.get(name, 0))
    return ContractionMap(3, entries)


def gl3_map(which: str, params: Optional[Dict[str, object]] = None) -> ContractionMap:
    """
    Singular GL(3) map with h/(q - 1) in its singular slot: (1,2) for g1,
    (2,3) for g2 and (1,3) for g3. Missing parameters default to 0.

    Raises:
        MapError: If a parameter depends on h or has a pole at q=1.
    """
    params = {name: _check_finite_parameter(name, value) for name, value in (params or {}).items()}
    return gl3_matrix(which, SINGULAR, params)


def standard_g(dimension: int) -> ContractionMap:
    """g = sum_i e_ii + h/(q - 1) e_1N."""
    if dimension < 2:
        raise MapError(f"standard_g needs N >= 2, got {dimension}.")
    entries: Dict[Index, object] = {(i, i): 1 for i in range(1, dimension + 1)}
    entries[(1, dimension)] = SINGULAR
    return ContractionMap(dimension, entries)


def cycle_map() -> LinearMap:
    """The relabeling s = e_13 + e_21 + e_32."""
    return LinearMap(3, {(1, 3): 1, (2, 1): 1, (3, 2): 1})


def conjugate_r(matrix: RMatrix, g: LinearMap) -> RMatrix:
    """Exact (g (x) g)^{-1} R (g (x) g) over RatFunc, before any limit."""
    if matrix.dimension != g.dimension:
        raise MapError(f"R has dimension {matrix.dimension} but g has dimension {g.dimension}.")
    lifted = matrix.as_ring(RATFUNC).to_domain_matrix()
    square = g.tensor_square()
    inverse_square = g.inverse().tensor_square()
    product = inverse_square.matmul(lifted).matmul(square)
    return RMatrix.from_domain_matrix(product, matrix.dimension, RATFUNC)


def conjugate_by(matrix: RMatrix, m: LinearMap) -> RMatrix:
    """(m (x) m)^{-1} R (m (x) m) for a constant map m, keeping the ring of R."""
    if not m.is_constant():
        raise MapError("conjugate_by needs a constant (q- and h-free) map.")
    return conjugate_r(matrix, m).as_ring(matrix.ring)


def pole_orders(matrix: RMatrix, g: LinearMap) -> Dict[tuple, int]:
    """Order at q=1 of every nonzero pre-limit entry."""
    return {key: order_at_q1(value) for key, value in conjugate_r(matrix, g).entries.items()}


def coefficient_1N(matrix: RMatrix, g: LinearMap):
    """Pre-limit coefficient of e_1N (x) e_1N."""
    size = matrix.dimension
    return conjugate_r(matrix, g).get((1, 1), (size, size))


def _limit_entries(values: Dict[tuple, object], subject: str) -> Dict[tuple, object]:
    limits, offending = {}, []
    for key, value in sorted(values.items(), key=lambda item: item[0]):
        try:
            limits[key] = limit_q1(value)
        except PoleAtQ1 as e:
            offending.append({"row": key[0], "col": key[1], "order": e.order, "value": format_scalar(value)})
        except NonPolynomialInH:
            offending.append({"row": key[0], "col": key[1], "order": 0, "value": format_scalar(value)})
    if offending:
        error = ContractionSingular(subject, offending)
        logger.warning(str(error))
        raise error
    return limits


def contract_r(matrix: RMatrix, g: LinearMap, subject: str = "R-matrix") -> RMatrix:
    """
    R_h = lim_{q -> 1} (g (x) g)^{-1} R (g (x) g).

    Raises:
        ContractionSingular: If any conjugated entry has a pole at q=1; all
            offending entries are reported with their orders.
    """
    logger.info(f"FUNCTION START: contract_r with N={matrix.dimension}, nnz={matrix.nnz()}")
    conjugated = conjugate_r(matrix, g)
    limits = _limit_entries(conjugated.entries, subject)
    result = RMatrix(matrix.dimension, limits, HPOLY)
    logger.info(f"Contracted R-matrix has {result.nnz()} nonzero entries")
    return result


@dataclass(frozen=True)
class BilinearForm:
    """N x N bilinear form keyed by 1-based (row, col), over RatFunc or HPoly."""

    dimension: int
    entries: Dict[Index, object] = field(default_factory=dict)
    ring: str = HPOLY

    def get(self, i: int, j: int):
        zero = HRING.zero if self.ring == HPOLY else FIELD.zero
        return self.entries.get((i, j), zero)

    def to_json(self) -> dict:
        return {
            "N": self.dimension,
            "entries": [
                {"row": i, "col": j, "value": format_scalar(value)}
                for (i, j), value in sorted(self.entries.items())
            ],
        }

    def to_text(self) -> str:
        return "\n".join(f"C_{i}{j} = {format_scalar(value)}" for (i, j), value in sorted(self.entries.items()))


def q_form(spec: SeriesSpec) -> LinearMap:
    """C' = sum_i eps_i q^(-rho_i) e_ii'."""
    if spec.family == "A":
        raise MapError("The invariant bilinear form is defined for the B, C and D series only.")
    eps, rho2 = spec.epsilon(), spec.rho2()
    return LinearMap(
        spec.dimension,
        {(i, spec.prime(i)): eps[i - 1] * v_power(-rho2[i - 1]) for i in range(1, spec.dimension + 1)},
    )


def contract_form(g: LinearMap, spec: SeriesSpec) -> BilinearForm:
    """
    C = lim_{q -> 1} g^t C' g.

    Raises:
        ContractionSingular: For the B and D series, whose form is singular
            under the upper-triangular map.
    """
    if g.dimension != spec.dimension:
        raise MapError(f"g has dimension {g.dimension} but {spec.label()} needs {spec.dimension}.")
    transformed = g.transpose().compose(q_form(spec)).compose(g)
    limits = _limit_entries(dict(transformed.entries), f"bilinear form of {spec.label()}")
    return BilinearForm(spec.dimension, {key: value for key, value in limits.items() if value}, HPOLY)


def check_map_identities(beta=5, alpha=1, gamma=2) -> dict:
    """
    Verify the GL(3) parameter-elimination identities by exact multiplication:

        g1(t, beta) g1(0, -beta)               = g1(t, 0)
        g2(t, alpha, beta) g2(0, -alpha, -beta) = g2(t, 0, 0)
        g3(t, alpha, gamma) g3(alpha gamma, -alpha, -gamma) = g3(t, 0, 0)

    with t = h/(q - 1).
    """
    alpha, beta, gamma = as_ratfunc(alpha), as_ratfunc(beta), as_ratfunc(gamma)
    cases = {
        "g1": (
            gl3_matrix("g1", SINGULAR, {"beta": beta}),
            gl3_matrix("g1", 0, {"beta": -beta}),
            gl3_matrix("g1", SINGULAR),
        ),
        "g2": (
            gl3_matrix("g2", SINGULAR, {"alpha": alpha, "beta": beta}),
            gl3_matrix("g2", 0, {"alpha": -alpha, "beta": -beta}),
            gl3_matrix("g2", SINGULAR),
        ),
        "g3": (
            gl3_matrix("g3", SINGULAR, {"alpha": alpha, "gamma": gamma}),
            gl3_matrix("g3", alpha * gamma, {"alpha": -alpha, "gamma": -gamma}),
            gl3_matrix("g3", SINGULAR),
        ),
    }
    results = {}
    for name, (left, right, expected) in cases.items():
        product = left.compose(right)
        residuals = [
            {"entry": [i, j], "got": format_scalar(product.get(i, j)), "expected": format_scalar(expected.get(i, j))}
            for i in range(1, 4)
            for j in range(1, 4)
            if product.get(i, j) != expected.get(i, j)
        ]
        results[name] = residuals
    passed = all(not residuals for residuals in results.values())
    logger.info(f"GL(3) map identities {'hold' if passed else 'FAIL'}")
    return {"check": "map-identities", "pass": passed, "residuals": [
        dict(item, map=name) for name, residuals in results.items() for item in residuals
    ]}


def check_equivalence_s(matrix: Optional[RMatrix] = None) -> dict:
    """
    Verify (s (x) s)^{-1} R(g2) (s (x) s) = R(g1) with s = e_13 + e_21 + e_32,
    where R(gi) is the contraction of the GL_q(3) matrix by gi with all
    finite parameters zero.
    """
    source = matrix if matrix is not None else build_r_A(3)
    r_g1 = contract_r(source, gl3_map("g1"))
    r_g2 = contract_r(source, gl3_map("g2"))
    relabeled = conjugate_by(r_g2, cycle_map())
    difference = relabeled - r_g1
    residuals = [
        {"row": list(row), "col": list(col), "value": format_scalar(value)}
        for (row, col), value in difference.sorted_entries()
    ]
    passed = not residuals
    logger.info(f"s-equivalence of R(g1) and R(g2) {'holds' if passed else 'FAILS'}")
    return {"check": "equivalence-s", "pass": passed, "residuals": residuals}
