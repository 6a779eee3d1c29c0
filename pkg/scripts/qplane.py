r"""
scripts/qplane.py

Quadratic relation algebras: the q-plane, its dual (q-exterior) algebra and
the symplectic quantum space, their transformation under a contraction map
x'_a = sum_b g_ab x_b, the q -> 1 limit of the relation span, and reduction
of quadratic expressions to normal form.

Relation spans are compared through their reduced echelon form over RatFunc,
with monomials ordered pair-lexicographically:
x_1x_1 < x_1x_2 < ... < x_1x_N < x_2x_1 < ... < x_Nx_N.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from scripts.contraction import BilinearForm, LinearMap, gl3_matrix
from scripts.exact_ring import (
    FIELD,
    HRING,
    Q,
    SINGULAR,
    NonPolynomialInH,
    PoleAtQ1,
    as_hpoly,
    as_ratfunc,
    format_scalar,
    limit_q1,
    parse_scalar,
    substitute_h,
    to_hpoly,
)
from scripts.rmatrix import DOMAINS, HPOLY, RATFUNC, RMatrix, SeriesSpec, build_r_BCD
from utils.logger import logger

Pair = Tuple[int, int]

KINDS = ("plane", "dual", "symplectic")
GENERATOR = {"plane": "x", "dual": "η", "symplectic": "x"}


class RelationSingular(ValueError):
    """The echelon form of a transformed relation set has a pole at q=1."""

    def __init__(self, offending: List[dict]):
        self.offending = sorted(offending, key=lambda item: (item["relation"], item["pair"]))
        worst = min((item["order"] for item in self.offending), default=0)
        super().__init__(
            f"relation span is singular at q=1: {len(self.offending)} echelon entries (lowest order {worst})"
        )

    def report(self) -> dict:
        return {
            "obstruction": True,
            "entries": [
                {"relation": item["relation"], "pair": list(item["pair"]), "order": item["order"], "value": item["value"]}
                for item in self.offending
            ],
        }


class NonSolvable(ValueError):
    """A relation set cannot be oriented into rewrite rules with unit leading terms."""


def monomials(dimension: int) -> List[Pair]:
    return [(a, b) for a in range(1, dimension + 1) for b in range(1, dimension + 1)]


def monomial_index(pair: Pair, dimension: int) -> int:
    return (pair[0] - 1) * dimension + (pair[1] - 1)


def _coerce(ring: str):
    return as_ratfunc if ring == RATFUNC else as_hpoly


@dataclass(frozen=True)
class QuadExpr:
    """sum_(a,b) c_ab x_a x_b in the free algebra; pair order matters."""

    dimension: int
    coefficients: Dict[Pair, object] = field(default_factory=dict)
    ring: str = RATFUNC

    def __post_init__(self):
        coerce = _coerce(self.ring)
        clean = {}
        for (a, b), value in self.coefficients.items():
            if not (1 <= a <= self.dimension and 1 <= b <= self.dimension):
                raise ValueError(f"Generator pair ({a}, {b}) out of range 1..{self.dimension}.")
            value = coerce(value)
            if value:
                clean[(a, b)] = value
        object.__setattr__(self, "coefficients", clean)

    def get(self, pair: Pair):
        zero = FIELD.zero if self.ring == RATFUNC else HRING.zero
        return self.coefficients.get(tuple(pair), zero)

    def is_zero(self) -> bool:
        return not self.coefficients

    def terms(self) -> List[Tuple[Pair, object]]:
        return sorted(self.coefficients.items())

    def as_ring(self, ring: str) -> "QuadExpr":
        if ring == self.ring:
            return self
        convert = as_ratfunc if ring == RATFUNC else to_hpoly
        return QuadExpr(self.dimension, {p: convert(c) for p, c in self.coefficients.items()}, ring)

    def __add__(self, other: "QuadExpr") -> "QuadExpr":
        ring = self.ring if self.ring == other.ring else RATFUNC
        left, right = self.as_ring(ring), other.as_ring(ring)
        total = dict(left.coefficients)
        for pair, value in right.coefficients.items():
            total[pair] = total.get(pair, 0) + value
        return QuadExpr(self.dimension, total, ring)

    def scale(self, factor) -> "QuadExpr":
        factor = _coerce(self.ring)(factor)
        return QuadExpr(self.dimension, {p: c * factor for p, c in self.coefficients.items()}, self.ring)

    def __sub__(self, other: "QuadExpr") -> "QuadExpr":
        return self + other.scale(-1)

    def specialize_h(self, h0) -> "QuadExpr":
        return QuadExpr(self.dimension, {p: substitute_h(c, h0) for p, c in self.coefficients.items()}, self.ring)

    def substitute(self, g: LinearMap) -> "QuadExpr":
        """Replace every x_a by sum_b g_ab x_b."""
        result: Dict[Pair, object] = {}
        rows = {}
        for (i, j), value in g.entries.items():
            rows.setdefault(i, []).append((j, value))
        for (a, b), coeff in self.coefficients.items():
            coeff = as_ratfunc(coeff)
            for c, g_ac in rows.get(a, []):
                for d, g_bd in rows.get(b, []):
                    result[(c, d)] = result.get((c, d), 0) + coeff * g_ac * g_bd
        return QuadExpr(self.dimension, result, RATFUNC)

    def to_json(self) -> dict:
        return {"terms": [{"pair": list(pair), "coeff": format_scalar(value)} for pair, value in self.terms()]}

    def to_text(self, generator: str = "x") -> str:
        if not self.coefficients:
            return "0"
        return _sum_text(self.terms(), generator)


def _monomial_text(pair: Pair, generator: str) -> str:
    a, b = pair
    if a == b:
        return f"{generator}_{a}²"
    return f"{generator}_{a}{generator}_{b}"


def coefficient_term(coeff, monomial: str) -> str:
    """coeff * monomial; unit coefficients are dropped and compound ones bracketed."""
    text = format_scalar(coeff)
    if text == "1":
        return monomial
    if text == "-1":
        return f"-{monomial}"
    if any(op in text.lstrip("-") for op in "+-/"):
        return f"({text}) {monomial}"
    return f"{text} {monomial}"


def _sum_text(terms: List[Tuple[Pair, object]], generator: str) -> str:
    text = " + ".join(coefficient_term(coeff, _monomial_text(pair, generator)) for pair, coeff in terms)
    return text.replace("+ -", "- ")


def _echelon(exprs: List[QuadExpr], dimension: int) -> List[Dict[Pair, object]]:
    """Reduced echelon rows over RatFunc, zero rows dropped."""
    rows = [expr.as_ring(RATFUNC) for expr in exprs if not expr.is_zero()]
    if not rows:
        return []
    dod = {
        r: {monomial_index(pair, dimension): value for pair, value in expr.coefficients.items()}
        for r, expr in enumerate(rows)
    }
    matrix = DomainMatrix(dod, (len(rows), dimension**2), DOMAINS[RATFUNC])
    reduced, pivots = matrix.rref()
    pairs = monomials(dimension)
    echelon = []
    reduced_dod = reduced.to_dod()
    for r in range(len(pivots)):
        echelon.append({pairs[c]: value for c, value in reduced_dod.get(r, {}).items() if value})
    return echelon


@dataclass(frozen=True)
class RelationSet:
    """Basis of a degree-2 relation span of kind plane, dual or symplectic."""

    dimension: int
    kind: str
    basis: Tuple[QuadExpr, ...] = ()
    ring: str = RATFUNC

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown relation kind '{self.kind}', expected one of {', '.join(KINDS)}.")
        basis = tuple(expr.as_ring(self.ring) for expr in self.basis if not expr.is_zero())
        object.__setattr__(self, "basis", basis)

    def echelon(self) -> "RelationSet":
        rows = _echelon(list(self.basis), self.dimension)
        return RelationSet(self.dimension, self.kind, tuple(QuadExpr(self.dimension, row) for row in rows), RATFUNC)

    def rank(self) -> int:
        return len(self.echelon().basis)

    def span_equals(self, other: "RelationSet") -> bool:
        if self.dimension != other.dimension:
            return False
        return [e.coefficients for e in self.echelon().basis] == [e.coefficients for e in other.echelon().basis]

    def specialize_h(self, h0) -> "RelationSet":
        return RelationSet(self.dimension, self.kind, tuple(e.specialize_h(h0) for e in self.basis), self.ring)

    def to_json(self) -> dict:
        return {
            "N": self.dimension,
            "kind": self.kind,
            "ring": self.ring,
            "relations": [expr.to_json() for expr in self.basis],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RelationSet":
        try:
            dimension, kind = int(data["N"]), data["kind"]
            ring = data.get("ring", HPOLY)
            basis = tuple(
                QuadExpr(
                    dimension,
                    {tuple(term["pair"]): parse_scalar(str(term["coeff"]), ring) for term in relation["terms"]},
                    ring,
                )
                for relation in data["relations"]
            )
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed relation JSON: {e}")
        return cls(dimension, kind, basis, ring)


def manin_plane(dimension: int) -> RelationSet:
    """x_i x_j - q x_j x_i for i < j."""
    if dimension < 2:
        raise ValueError(f"The q-plane needs N >= 2, got {dimension}.")
    basis = tuple(
        QuadExpr(dimension, {(i, j): 1, (j, i): -Q})
        for i in range(1, dimension + 1)
        for j in range(i + 1, dimension + 1)
    )
    return RelationSet(dimension, "plane", basis)


def dual_plane(dimension: int) -> RelationSet:
    """η_i² for every i, and η_i η_j + q^{-1} η_j η_i for i < j."""
    if dimension < 2:
        raise ValueError(f"The dual plane needs N >= 2, got {dimension}.")
    squares = [QuadExpr(dimension, {(i, i): 1}) for i in range(1, dimension + 1)]
    mixed = [
        QuadExpr(dimension, {(i, j): 1, (j, i): 1 / Q})
        for i in range(1, dimension + 1)
        for j in range(i + 1, dimension + 1)
    ]
    return RelationSet(dimension, "dual", tuple(squares + mixed))


def rhat_relations(rhat: RMatrix, eigenvalue, kind: str = "plane") -> RelationSet:
    """
    Relations sum_(k,l) (Rhat - eigenvalue)_((i,j),(k,l)) x_k x_l = 0, one per
    composite row (i, j), reduced to an independent basis.
    """
    shifted = rhat - RMatrix.identity(rhat.dimension, rhat.ring).scale(eigenvalue)
    rows: Dict[Pair, Dict[Pair, object]] = {}
    for (row, col), value in shifted.entries.items():
        rows.setdefault(row, {})[col] = value
    exprs = [QuadExpr(rhat.dimension, rows[row], shifted.ring) for row in sorted(rows)]
    return RelationSet(rhat.dimension, kind, tuple(exprs), shifted.ring).echelon()


def symplectic_space(spec: SeriesSpec) -> RelationSet:
    """The quantum symplectic space: rows of (Rhat - q) for the C series R-matrix."""
    if spec.family != "C":
        raise ValueError(f"The symplectic quantum space needs the C series, got {spec.label()}.")
    logger.info(f"FUNCTION START: symplectic_space with {spec.label()}")
    relations = rhat_relations(build_r_BCD(spec).rhat(), Q, kind="symplectic")
    logger.info(f"{spec.label()} quantum space has {len(relations.basis)} independent relations")
    return relations


def transform_relations(rels: RelationSet, g: LinearMap) -> RelationSet:
    """
    Substitute x'_a = sum_b g_ab x_b, bring the span to reduced echelon form
    over RatFunc and take q -> 1 entrywise.

    Raises:
        RelationSingular: If an echelon entry has a pole at q=1 or a value
            that is not polynomial in h.
    """
    if rels.dimension != g.dimension:
        raise ValueError(f"Relations have N={rels.dimension} but the map has N={g.dimension}.")
    logger.debug(f"FUNCTION START: transform_relations with kind={rels.kind}, N={rels.dimension}")
    substituted = [expr.substitute(g) for expr in rels.basis]
    echelon = _echelon(substituted, rels.dimension)

    limits, offending = [], []
    for r, row in enumerate(echelon):
        limit_row = {}
        for pair, value in sorted(row.items()):
            try:
                limit_row[pair] = limit_q1(value)
            except PoleAtQ1 as e:
                offending.append({"relation": r, "pair": pair, "order": e.order, "value": format_scalar(value)})
            except NonPolynomialInH:
                offending.append({"relation": r, "pair": pair, "order": 0, "value": format_scalar(value)})
        limits.append(QuadExpr(rels.dimension, limit_row, HPOLY))
    if offending:
        raise RelationSingular(offending)
    return RelationSet(rels.dimension, rels.kind, tuple(limits), HPOLY)


def _scan_map(alpha, beta, gamma) -> LinearMap:
    return LinearMap(3, {(1, 1): 1, (2, 2): 1, (3, 3): 1, (1, 2): alpha, (1, 3): beta, (2, 3): gamma})


SCAN_EXPECTED = {("alpha",): "g1", ("gamma",): "g2", ("beta",): "g3"}


def admissibility_scan_gl3() -> dict:
    """
    Try every pattern in which each of alpha, beta, gamma is either 0 or
    h/(q - 1). A pattern is admissible when both the plane and the dual plane
    survive the limit. The admissible singular patterns must be exactly those
    of g1, g2 and g3.

    The finite entries are fixed at 0 and the report records this as
    "finite_value". The result depends on that choice: with alpha singular,
    a nonzero gamma makes the pattern inadmissible, since g1 needs gamma = 0.
    """
    logger.info("FUNCTION START: admissibility_scan_gl3")
    names = ("alpha", "beta", "gamma")
    patterns = []
    for choice in product((False, True), repeat=3):
        singular = tuple(name for name, flag in zip(names, choice) if flag)
        g = _scan_map(*(SINGULAR if flag else 0 for flag in choice))
        failures = []
        for rels in (manin_plane(3), dual_plane(3)):
            try:
                transform_relations(rels, g)
            except RelationSingular as e:
                failures.append({"kind": rels.kind, "worst_order": min(item["order"] for item in e.offending)})
        patterns.append({
            "singular": list(singular),
            "admissible": not failures,
            "map": SCAN_EXPECTED.get(singular, "identity" if not singular else None),
            "failures": failures,
        })

    admissible = {tuple(p["singular"]) for p in patterns if p["admissible"] and p["singular"]}
    passed = admissible == set(SCAN_EXPECTED)
    deviations = [p for p in patterns if p["singular"] and p["admissible"] != (tuple(p["singular"]) in SCAN_EXPECTED)]
    logger.info(f"Admissible singular patterns: {sorted(admissible)}")
    return {"check": "scan-gl3", "pass": passed, "finite_value": 0, "patterns": patterns, "residuals": deviations}


def gl3_relations(which: str, params: Optional[dict] = None) -> Dict[str, RelationSet]:
    """Plane and dual relations of GL_h(3) for the map g1, g2 or g3."""
    g = gl3_matrix(which, SINGULAR, params)
    return {"plane": transform_relations(manin_plane(3), g), "dual": transform_relations(dual_plane(3), g)}


def isotropy_form(form: BilinearForm) -> QuadExpr:
    """x^t C x = sum_ij C_ij x_i x_j."""
    return QuadExpr(form.dimension, dict(form.entries), form.ring)


def _priority(pair: Pair) -> Tuple[int, Pair]:
    """Lower sorts first: descending pairs, then squares, then ascending pairs."""
    a, b = pair
    category = 0 if a > b else (1 if a == b else 2)
    return (category, pair)


def _eliminate(target: Dict[Pair, object], pivot: Pair, rule: Dict[Pair, object]) -> Dict[Pair, object]:
    """target - target[pivot] * rule, with rule normalized to 1 at pivot."""
    factor = target.get(pivot)
    if not factor:
        return target
    result = dict(target)
    for pair, value in rule.items():
        total = result.get(pair, HRING.zero) - factor * value
        if total:
            result[pair] = total
        else:
            result.pop(pair, None)
    return result


def rewrite_rules(rels: RelationSet) -> Dict[Pair, Dict[Pair, object]]:
    """
    Orient an HPoly relation set into inter-reduced rules pivot -> rest.

    Raises:
        NonSolvable: If a relation has no nonzero constant coefficient to
            pivot on.
    """
    rules: Dict[Pair, Dict[Pair, object]] = {}
    for expr in rels.basis:
        relation = dict(expr.as_ring(HPOLY).coefficients)
        for pivot, rule in rules.items():
            relation = _eliminate(relation, pivot, rule)
        if not relation:
            continue
        candidates = [pair for pair, value in relation.items() if value.is_ground]
        if not candidates:
            raise NonSolvable(f"Relation {QuadExpr(rels.dimension, relation, HPOLY).to_text()} has no unit leading term.")
        pivot = min(candidates, key=_priority)
        lead = relation[pivot].LC
        relation = {pair: value.quo_ground(lead) for pair, value in relation.items()}
        rules = {p: _eliminate(rule, pivot, relation) for p, rule in rules.items()}
        rules[pivot] = relation
    return rules


def reduce_quadratic(expr: QuadExpr, rels: RelationSet) -> QuadExpr:
    """
    Normal form of expr modulo the degree-2 span of rels.

    Raises:
        NonSolvable: If rels cannot be oriented into unit-pivot rules.
    """
    rules = rewrite_rules(rels)
    current = dict(expr.as_ring(HPOLY).coefficients)
    for pivot, rule in sorted(rules.items()):
        current = _eliminate(current, pivot, rule)
    return QuadExpr(expr.dimension, current, HPOLY)


def _relation_text(expr: QuadExpr, kind: str) -> str:
    generator = GENERATOR[kind]
    coefficients = expr.coefficients
    one = coefficients.get
    for (a, b) in sorted(coefficients):
        if a == b and one((a, a)) == 1:
            rest = [(p, -c) for p, c in expr.terms() if p != (a, a)]
            return f"{generator}_{a}² = {_sum_text(rest, generator) if rest else '0'}"
        if a < b and one((a, b)) == 1:
            partner = one((b, a))
            if kind == "dual" and partner == 1:
                rest = [(p, -c) for p, c in expr.terms() if p not in ((a, b), (b, a))]
                return f"{{{generator}_{a},{generator}_{b}}} = {_sum_text(rest, generator) if rest else '0'}"
            if kind != "dual" and partner == -1:
                rest = [(p, -c) for p, c in expr.terms() if p not in ((a, b), (b, a))]
                return f"[{generator}_{a},{generator}_{b}] = {_sum_text(rest, generator) if rest else '0'}"
        break
    return f"{expr.to_text(generator)} = 0"


def format_relations(rels: RelationSet) -> str:
    """One line per basis relation, in basis order."""
    return "\n".join(_relation_text(expr, rels.kind) for expr in rels.basis)


def _hpoly_set(dimension: int, kind: str, relations: List[Dict[Pair, object]]) -> RelationSet:
    return RelationSet(dimension, kind, tuple(QuadExpr(dimension, r, HPOLY) for r in relations), HPOLY)


def gl_h_plane(dimension: int, first: int = 1, last: Optional[int] = None) -> RelationSet:
    """
    Relations of the h-deformed plane for g = I + h/(q - 1) e_(first,last):

        [x_f, x_j] = 2h x_l x_j   for f < j < l
        [x_f, x_l] = h x_l²
        [x_i, x_j] = 0            otherwise
    """
    last = dimension if last is None else last
    h = HRING.gens[0]
    relations = []
    for i in range(1, dimension + 1):
        for j in range(i + 1, dimension + 1):
            relation = {(i, j): 1, (j, i): -1}
            if i == first and first < j < last:
                relation[(last, j)] = -2 * h
            elif (i, j) == (first, last):
                relation[(last, last)] = -h
            relations.append(relation)
    return _hpoly_set(dimension, "plane", relations)


def gl_h_dual(dimension: int, first: int = 1, last: Optional[int] = None) -> RelationSet:
    """
    Dual relations for the same map:

        η_f² = -h η_l η_f
        {η_f, η_j} = -2h η_l η_j   for f < j < l
        η_i² = 0 and {η_i, η_j} = 0 otherwise
    """
    last = dimension if last is None else last
    h = HRING.gens[0]
    relations = []
    for i in range(1, dimension + 1):
        relation = {(i, i): 1}
        if i == first:
            relation[(last, first)] = h
        relations.append(relation)
    for i in range(1, dimension + 1):
        for j in range(i + 1, dimension + 1):
            relation = {(i, j): 1, (j, i): 1}
            if i == first and first < j < last:
                relation[(last, j)] = 2 * h
            relations.append(relation)
    return _hpoly_set(dimension, "dual", relations)


def sp_h_space(spec: SeriesSpec) -> RelationSet:
    """
    Relations of the h-deformed symplectic space (N = 2n):

        x_i x_j = x_j x_i                    1 < i < j <= N, j != i'
        x_1 x_j = x_j x_1 + 2h x_N x_j       1 < j <= N
        x_i' x_i = x_i x_i' + 2h eps_i' x_N²  1 < i <= n
    """
    if spec.family != "C":
        raise ValueError(f"The symplectic space needs the C series, got {spec.label()}.")
    size, eps = spec.dimension, spec.epsilon()
    h = HRING.gens[0]
    relations = []
    for j in range(2, size + 1):
        relations.append({(1, j): 1, (j, 1): -1, (size, j): -2 * h})
    for i in range(2, size + 1):
        for j in range(i + 1, size + 1):
            if j == spec.prime(i):
                relations.append({(j, i): 1, (i, j): -1, (size, size): -2 * h * eps[j - 1]})
            else:
                relations.append({(i, j): 1, (j, i): -1})
    return _hpoly_set(size, "symplectic", relations)
