r"""
scripts/rmatrix.py

Standard q-deformed R-matrices for the A, B, C and D series, stored sparsely.

Index convention: an entry keyed ((i, j), (k, l)) is the coefficient of
e_ik (x) e_jl, so the label R_ijkl is the entry in composite row
(i, j) and composite column (k, l), and R_ijij sits on the diagonal. Indices
run from 1 to N. The composite index (i, j) flattens to (i - 1) * N + (j - 1)
when a matrix is handed to sympy's DomainMatrix.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from scripts.exact_ring import (
    FIELD,
    HRING,
    Q,
    as_hpoly,
    as_ratfunc,
    format_scalar,
    parse_scalar,
    substitute_h,
    to_hpoly,
    NonPolynomialInH,
    v_power,
)
from utils.logger import logger

Pair = Tuple[int, int]
EntryKey = Tuple[Pair, Pair]

RATFUNC = "ratfunc"
HPOLY = "hpoly"
DOMAINS = {RATFUNC: FIELD.to_domain(), HPOLY: HRING.to_domain()}

ORIENTATIONS = ("lower", "upper")
LEG_PAIRS = ("12", "13", "23")


class RMatrixError(ValueError):
    """Raised for malformed R-matrices or invalid series data."""


@dataclass(frozen=True)
class SeriesSpec:
    """
    A classical series and its rank.

    A_{n}: N = n + 1, B_n: N = 2n + 1, C_n and D_n: N = 2n.
    """

    family: str
    rank: int

    def __post_init__(self):
        if self.family not in ("A", "B", "C", "D"):
            raise RMatrixError(f"Unknown family '{self.family}', expected one of A, B, C, D.")
        if not isinstance(self.rank, int) or self.rank < 1:
            raise RMatrixError(f"Rank must be a positive integer, got {self.rank}.")

    @classmethod
    def for_dimension(cls, family: str, dimension: int) -> "SeriesSpec":
        """Build the SeriesSpec whose vector representation has the given dimension."""
        if family == "A":
            return cls("A", dimension - 1)
        if family == "B":
            if dimension % 2 == 0:
                raise RMatrixError(f"B series needs an odd dimension, got {dimension}.")
            return cls("B", (dimension - 1) // 2)
        if dimension % 2:
            raise RMatrixError(f"{family} series needs an even dimension, got {dimension}.")
        return cls(family, dimension // 2)

    @property
    def dimension(self) -> int:
        if self.family == "A":
            return self.rank + 1
        if self.family == "B":
            return 2 * self.rank + 1
        return 2 * self.rank

    def prime(self, i: int) -> int:
        """i' = N + 1 - i."""
        return self.dimension + 1 - i

    def epsilon(self) -> Tuple[int, ...]:
        n, size = self.rank, self.dimension
        if self.family == "C":
            return tuple(1 if i <= n else -1 for i in range(1, size + 1))
        return tuple(1 for _ in range(size))

    def rho2(self) -> Tuple[int, ...]:
        """Twice the rho vector, so B series half-integers stay integral."""
        n = self.rank
        if self.family == "B":
            head = [2 * (n - i) + 1 for i in range(1, n + 1)]
            return tuple(head + [0] + [-r for r in reversed(head)])
        if self.family == "C":
            head = [2 * (n - i + 1) for i in range(1, n + 1)]
            return tuple(head + [-r for r in reversed(head)])
        if self.family == "D":
            head = [2 * (n - i) for i in range(1, n + 1)]
            return tuple(head + [-r for r in reversed(head)])
        raise RMatrixError("The rho vector is only defined for the B, C and D series.")

    def label(self) -> str:
        return f"{self.family}_{self.rank}"


def composite_index(pair: Pair, dimension: int) -> int:
    return (pair[0] - 1) * dimension + (pair[1] - 1)


def composite_pair(index: int, dimension: int) -> Pair:
    return (index // dimension + 1, index % dimension + 1)


def triple_index(triple: Tuple[int, int, int], dimension: int) -> int:
    a, b, c = triple
    return ((a - 1) * dimension + (b - 1)) * dimension + (c - 1)


def _add_entry(entries: Dict[EntryKey, object], key: EntryKey, value) -> None:
    total = entries.get(key, 0) + value
    if total:
        entries[key] = total
    else:
        entries.pop(key, None)


@dataclass(frozen=True)
class RMatrix:
    """Sparse N^2 x N^2 matrix over RatFunc or HPoly; zeros are never stored."""

    dimension: int
    entries: Dict[EntryKey, object] = field(default_factory=dict)
    ring: str = RATFUNC

    def __post_init__(self):
        if self.ring not in DOMAINS:
            raise RMatrixError(f"Unknown scalar ring '{self.ring}'.")
        if self.dimension < 1:
            raise RMatrixError(f"Dimension must be positive, got {self.dimension}.")
        coerce = as_ratfunc if self.ring == RATFUNC else as_hpoly
        clean = {}
        for (row, col), value in self.entries.items():
            for index in row + col:
                if not 1 <= index <= self.dimension:
                    raise RMatrixError(f"Index {index} out of range 1..{self.dimension} in entry {row}, {col}.")
            value = coerce(value)
            if value:
                clean[(tuple(row), tuple(col))] = value
        object.__setattr__(self, "entries", clean)

    # ----- constructors -----

    @classmethod
    def identity(cls, dimension: int, ring: str = RATFUNC) -> "RMatrix":
        pairs = [(i, j) for i in range(1, dimension + 1) for j in range(1, dimension + 1)]
        return cls(dimension, {(p, p): 1 for p in pairs}, ring)

    @classmethod
    def flip(cls, dimension: int, ring: str = RATFUNC) -> "RMatrix":
        pairs = [(i, j) for i in range(1, dimension + 1) for j in range(1, dimension + 1)]
        return cls(dimension, {((i, j), (j, i)): 1 for i, j in pairs}, ring)

    @classmethod
    def from_domain_matrix(cls, matrix: DomainMatrix, dimension: int, ring: str) -> "RMatrix":
        entries = {}
        for r, row in matrix.to_dod().items():
            for c, value in row.items():
                if value:
                    entries[(composite_pair(r, dimension), composite_pair(c, dimension))] = value
        return cls(dimension, entries, ring)

    # ----- views -----

    @property
    def size(self) -> int:
        return self.dimension**2

    def nnz(self) -> int:
        return len(self.entries)

    def get(self, row: Pair, col: Pair):
        zero = FIELD.zero if self.ring == RATFUNC else HRING.zero
        return self.entries.get((tuple(row), tuple(col)), zero)

    def to_domain_matrix(self) -> DomainMatrix:
        dod: Dict[int, Dict[int, object]] = {}
        for (row, col), value in self.entries.items():
            r = composite_index(row, self.dimension)
            dod.setdefault(r, {})[composite_index(col, self.dimension)] = value
        return DomainMatrix(dod, (self.size, self.size), DOMAINS[self.ring])

    def sorted_entries(self) -> List[Tuple[EntryKey, object]]:
        return sorted(self.entries.items(), key=lambda item: item[0])

    # ----- algebra -----

    def map_values(self, fn: Callable, ring: Optional[str] = None) -> "RMatrix":
        return RMatrix(self.dimension, {key: fn(value) for key, value in self.entries.items()}, ring or self.ring)

    def as_ring(self, ring: str) -> "RMatrix":
        if ring == self.ring:
            return self
        if ring == RATFUNC:
            return self.map_values(as_ratfunc, RATFUNC)
        return self.map_values(to_hpoly, HPOLY)

    def matmul(self, other: "RMatrix") -> "RMatrix":
        if other.dimension != self.dimension:
            raise RMatrixError(f"Dimension mismatch: {self.dimension} vs {other.dimension}.")
        ring = self.ring if self.ring == other.ring else RATFUNC
        left, right = self.as_ring(ring), other.as_ring(ring)
        product = left.to_domain_matrix().matmul(right.to_domain_matrix())
        return RMatrix.from_domain_matrix(product, self.dimension, ring)

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        return self.matmul(other)

    def __sub__(self, other: "RMatrix") -> "RMatrix":
        ring = self.ring if self.ring == other.ring else RATFUNC
        entries = dict(self.as_ring(ring).entries)
        for key, value in other.as_ring(ring).entries.items():
            _add_entry(entries, key, -value)
        return RMatrix(self.dimension, entries, ring)

    def __add__(self, other: "RMatrix") -> "RMatrix":
        ring = self.ring if self.ring == other.ring else RATFUNC
        entries = dict(self.as_ring(ring).entries)
        for key, value in other.as_ring(ring).entries.items():
            _add_entry(entries, key, value)
        return RMatrix(self.dimension, entries, ring)

    def scale(self, factor) -> "RMatrix":
        coerce = as_ratfunc if self.ring == RATFUNC else as_hpoly
        factor = coerce(factor)
        return self.map_values(lambda value: value * factor)

    def inverse(self) -> "RMatrix":
        """
        Exact inverse. HPoly matrices are inverted over RatFunc and must come
        back polynomial in h.

        Raises:
            RMatrixError: If the matrix is singular or the inverse of an HPoly
                matrix is not polynomial in h.
        """
        lifted = self.as_ring(RATFUNC).to_domain_matrix()
        try:
            inverse = lifted.to_dense().inv().to_sparse()
        except Exception as e:
            raise RMatrixError(f"R-matrix is not invertible: {e}")
        result = RMatrix.from_domain_matrix(inverse, self.dimension, RATFUNC)
        if self.ring == HPOLY:
            try:
                result = result.as_ring(HPOLY)
            except NonPolynomialInH:
                raise RMatrixError("Inverse of the HPoly matrix is not polynomial in h.")
        return result

    def rhat(self) -> "RMatrix":
        """P R: entry ((i, j), (k, l)) of the result is entry ((j, i), (k, l)) of R."""
        return RMatrix(self.dimension, {((j, i), col): value for ((i, j), col), value in self.entries.items()}, self.ring)

    def flip_conjugate(self) -> "RMatrix":
        """P R P, i.e. R_21."""
        return RMatrix(
            self.dimension,
            {((j, i), (l, k)): value for ((i, j), (k, l)), value in self.entries.items()},
            self.ring,
        )

    def specialize_h(self, h0) -> "RMatrix":
        return self.map_values(lambda value: substitute_h(value, h0))

    def is_identity(self) -> bool:
        return self == RMatrix.identity(self.dimension, self.ring)

    # ----- serialization -----

    def to_json(self) -> dict:
        return {
            "N": self.dimension,
            "ring": self.ring,
            "entries": [
                {"row": list(row), "col": list(col), "value": format_scalar(value)}
                for (row, col), value in self.sorted_entries()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RMatrix":
        """
        Read the RMatrix JSON schema. The optional "ring" key selects the
        scalar ring; without it, a matrix whose values are all polynomials in
        h is read as HPoly.

        Raises:
            RMatrixError: If the document does not follow the schema.
        """
        try:
            dimension = int(data["N"])
            raw = [(tuple(item["row"]), tuple(item["col"]), str(item["value"])) for item in data["entries"]]
        except (KeyError, TypeError, ValueError) as e:
            raise RMatrixError(f"Malformed R-matrix JSON: {e}")
        for row, col, _ in raw:
            if len(row) != 2 or len(col) != 2:
                raise RMatrixError(f"Composite indices must be pairs, got {row} and {col}.")
        entries = {((int(r[0]), int(r[1])), (int(c[0]), int(c[1]))): parse_scalar(text) for r, c, text in raw}

        ring = data.get("ring")
        if ring is None:
            try:
                return cls(dimension, {key: to_hpoly(value) for key, value in entries.items()}, HPOLY)
            except NonPolynomialInH:
                ring = RATFUNC
        matrix = cls(dimension, entries, RATFUNC)
        return matrix.as_ring(ring)

    def to_text(self) -> str:
        """Text dump, one `R_ijkl = value` line per entry, sorted lexicographically."""
        lines = [
            f"R_{row[0]}{row[1]}{col[0]}{col[1]} = {format_scalar(value)}"
            for (row, col), value in self.sorted_entries()
        ]
        return "\n".join(lines)

    def to_dense(self) -> List[List[str]]:
        if self.dimension > 4:
            raise RMatrixError("Dense output is limited to N <= 4.")
        pairs = [(i, j) for i in range(1, self.dimension + 1) for j in range(1, self.dimension + 1)]
        return [[format_scalar(self.get(row, col)) for col in pairs] for row in pairs]


def build_r_A(dimension: int, orientation: str = "lower") -> RMatrix:
    """
    Standard GL_q(N) R-matrix

        R = q sum_i e_ii (x) e_ii + sum_{i != j} e_ii (x) e_jj + (q - 1/q) sum e_ij (x) e_ji

    where the last sum runs over i > j ("lower", the default) or i < j ("upper").
    """
    if dimension < 2:
        raise RMatrixError(f"The A series needs N >= 2, got {dimension}.")
    if orientation not in ORIENTATIONS:
        raise RMatrixError(f"Unknown orientation '{orientation}', expected lower or upper.")
    logger.debug(f"FUNCTION START: build_r_A with N={dimension}, orientation={orientation}")

    entries: Dict[EntryKey, object] = {}
    span = range(1, dimension + 1)
    for i in span:
        for j in span:
            entries[((i, j), (i, j))] = Q if i == j else FIELD.one
    off = Q - 1 / Q
    for i in span:
        for j in span:
            if (i > j and orientation == "lower") or (i < j and orientation == "upper"):
                entries[((i, j), (j, i))] = off
    return RMatrix(dimension, entries, RATFUNC)


def build_r_BCD(spec: SeriesSpec) -> RMatrix:
    """
    The B, C, D series R-matrix

        R = q sum_{i != i'} e_ii (x) e_ii + [B only] e_mm (x) e_mm + sum_{i != j, j'} e_ii (x) e_jj
            + 1/q sum_{i != i'} e_i'i' (x) e_ii + (q - 1/q) sum_{i > j} e_ij (x) e_ji
            - (q - 1/q) sum_{i > j} q^(rho_i - rho_j) eps_i eps_j e_ij (x) e_i'j'

    with m = (N + 1)/2 and i' = N + 1 - i.
    """
    if spec.family not in ("B", "C", "D"):
        raise RMatrixError(f"build_r_BCD needs family B, C or D, got {spec.family}.")
    size = spec.dimension
    logger.debug(f"FUNCTION START: build_r_BCD with {spec.label()}, N={size}")
    eps, rho2 = spec.epsilon(), spec.rho2()
    off = Q - 1 / Q
    span = range(1, size + 1)
    entries: Dict[EntryKey, object] = {}

    for i in span:
        ip = spec.prime(i)
        if i != ip:
            _add_entry(entries, ((i, i), (i, i)), Q)
            _add_entry(entries, ((ip, i), (ip, i)), 1 / Q)
        else:
            _add_entry(entries, ((i, i), (i, i)), FIELD.one)
        for j in span:
            if i != j and i != spec.prime(j):
                _add_entry(entries, ((i, j), (i, j)), FIELD.one)

    for i in span:
        for j in range(1, i):
            _add_entry(entries, ((i, j), (j, i)), off)
            sign = eps[i - 1] * eps[j - 1]
            twist = v_power(rho2[i - 1] - rho2[j - 1])
            _add_entry(entries, ((i, spec.prime(i)), (j, spec.prime(j))), -off * twist * sign)

    matrix = RMatrix(size, entries, RATFUNC)
    logger.debug(f"{spec.label()} R-matrix has {matrix.nnz()} nonzero entries")
    return matrix


def build_r(spec: SeriesSpec, orientation: str = "lower") -> RMatrix:
    """Dispatch to build_r_A or build_r_BCD."""
    if spec.family == "A":
        return build_r_A(spec.dimension, orientation)
    return build_r_BCD(spec)


def kron(left: DomainMatrix, right: DomainMatrix) -> DomainMatrix:
    """Sparse Kronecker product of two DomainMatrix values over the same domain."""
    (m1, n1), (m2, n2) = left.shape, right.shape
    right_dod = right.to_dod()
    dod: Dict[int, Dict[int, object]] = {}
    for r1, row1 in left.to_dod().items():
        for c1, a in row1.items():
            for r2, row2 in right_dod.items():
                target = dod.setdefault(r1 * m2 + r2, {})
                for c2, b in row2.items():
                    target[c1 * n2 + c2] = a * b
    return DomainMatrix(dod, (m1 * m2, n1 * n2), left.domain)


def tensor_embed(matrix: RMatrix, leg_pair: str) -> DomainMatrix:
    """
    Embed R into the triple tensor product, acting on the named pair of
    factors ("12", "13" or "23") and as the identity on the third.

    Returns:
        DomainMatrix: Sparse N^3 x N^3 matrix over the ring of R.
    """
    if leg_pair not in LEG_PAIRS:
        raise RMatrixError(f"Unknown leg pair '{leg_pair}', expected one of {', '.join(LEG_PAIRS)}.")
    size = matrix.dimension
    dod: Dict[int, Dict[int, object]] = {}
    for ((i, j), (k, l)), value in matrix.entries.items():
        for m in range(1, size + 1):
            if leg_pair == "12":
                row, col = (i, j, m), (k, l, m)
            elif leg_pair == "13":
                row, col = (i, m, j), (k, m, l)
            else:
                row, col = (m, i, j), (m, k, l)
            dod.setdefault(triple_index(row, size), {})[triple_index(col, size)] = value
    return DomainMatrix(dod, (size**3, size**3), DOMAINS[matrix.ring])
