r"""
scripts/cli.py

Command-line front end. From the project root run, for example:

    python -m scripts.cli build --family A --N 3
    python -m scripts.cli contract --family C --n 2 --g standard
    python -m scripts.cli plane --N 3 --g g1
    python -m scripts.cli plane --family C --n 1 --g standard --isotropy
    python -m scripts.cli verify --all --family A --N 3 --g g1
    python -m scripts.cli report --out report.json

Exit codes: 0 everything passed, 1 a check failed (or an obstruction was hit
under --expect-success), 2 bad input.
"""

import argparse
import json
import pathlib
import random
import sys
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Dict, List, Optional

# For local imports, temporarily add project root to Python sys.path
PROJECT_ROOT = pathlib.Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))

from scripts.contraction import (  # noqa: E402
    GL3_MAPS,
    ContractionMap,
    ContractionSingular,
    LinearMap,
    conjugate_r,
    contract_form,
    contract_r,
    gl3_map,
    standard_g,
)
from scripts.exact_ring import ScalarError, parse_scalar  # noqa: E402
from scripts.golden import GoldenFixtureError, load_form_listing  # noqa: E402
from scripts.qplane import (  # noqa: E402
    NonSolvable,
    RelationSingular,
    dual_plane,
    format_relations,
    gl_h_dual,
    gl_h_plane,
    isotropy_form,
    manin_plane,
    reduce_quadratic,
    sp_h_space,
    symplectic_space,
    transform_relations,
)
from scripts.rmatrix import ORIENTATIONS, RMatrix, RMatrixError, SeriesSpec, build_r, build_r_A, build_r_BCD  # noqa: E402
from scripts.verify import (  # noqa: E402
    CHECK_NAMES,
    MATRIX_CHECKS,
    VerificationReport,
    bundle_to_json,
    check_ybe_numeric,
    golden_compare,
    relation_spans_equal,
    rtt_relations,
    run_checks,
    wz_relations,
)
from utils.config import ConfigError, get_settings  # noqa: E402
from utils.logger import logger  # noqa: E402

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
COMMANDS = ("build", "contract", "plane", "rtt", "wz", "verify", "scan-gl3", "report")
MAP_CHOICES = GL3_MAPS + ("standard", "identity", "none")


class UsageError(ValueError):
    """Raised when the command-line arguments do not describe a valid run."""


@dataclass
class RunConfig:
    command: str
    family: str = "A"
    rank: Optional[int] = None
    dimension: Optional[int] = None
    orientation: str = "lower"
    g: str = "none"
    params: Dict[str, object] = field(default_factory=dict)
    fmt: str = "json"
    out: Optional[pathlib.Path] = None
    seed: int = 0
    dump_prelimit: bool = False
    full_residuals: bool = False
    expect_success: bool = False
    isotropy: bool = False
    checks: List[str] = field(default_factory=list)
    run_all: bool = False
    input: Optional[pathlib.Path] = None
    wz_family: str = "both"

    def series(self) -> SeriesSpec:
        """Resolve family plus --N/--n into a SeriesSpec, enforcing the dimension bounds."""
        if self.family == "A":
            if self.dimension is None:
                raise UsageError("The A series needs --N.")
            spec = SeriesSpec.for_dimension("A", self.dimension)
        elif self.rank is not None:
            spec = SeriesSpec(self.family, self.rank)
        elif self.dimension is not None:
            spec = SeriesSpec.for_dimension(self.family, self.dimension)
        else:
            raise UsageError(f"The {self.family} series needs --n (or --N).")
        limit = get_settings().max_dimension
        if not 2 <= spec.dimension <= limit:
            raise UsageError(f"N must satisfy 2 <= N <= {limit}, got {spec.dimension}.")
        return spec


def parse_params(pairs: List[str]) -> Dict[str, object]:
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise UsageError(f"Parameters are given as name=value, got '{pair}'.")
        name, text = pair.split("=", 1)
        params[name.strip()] = parse_scalar(text.strip())
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m scripts.cli",
        description="Exact q-deformed R-matrices and their h-deformed contractions.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("checks", nargs="*", help=f"verify only: any of {', '.join(CHECK_NAMES)}")
    parser.add_argument("--family", choices=("A", "B", "C", "D"), default="A")
    parser.add_argument("--N", dest="dimension", type=int, help="vector dimension")
    parser.add_argument("--n", dest="rank", type=int, help="rank of the B, C or D series")
    parser.add_argument("--orientation", choices=ORIENTATIONS, default="lower")
    parser.add_argument("--g", choices=MAP_CHOICES, default="none", help="contraction map")
    parser.add_argument("--param", action="append", default=[], help="map parameter, e.g. beta=5")
    parser.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    parser.add_argument("--out", type=pathlib.Path, help="write output to this file")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized spot checks")
    parser.add_argument("--dump-prelimit", action="store_true", help="also write (g⊗g)^-1 R (g⊗g) before the limit")
    parser.add_argument("--full-residuals", action="store_true", help="do not truncate residual lists")
    parser.add_argument("--expect-success", action="store_true", help="exit 1 on a contraction obstruction")
    parser.add_argument("--isotropy", action="store_true", help="plane: reduce x^t C x modulo the relations")
    parser.add_argument("--all", dest="run_all", action="store_true", help="verify: run every applicable check")
    parser.add_argument("--input", type=pathlib.Path, help="verify: read the R-matrix from a JSON file")
    parser.add_argument("--wz-family", choices=("first", "second", "both"), default="both")
    return parser


def parse_run_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.checks and args.command != "verify":
        raise UsageError(f"Extra arguments {args.checks} are only accepted by verify.")
    return RunConfig(
        command=args.command,
        family=args.family,
        rank=args.rank,
        dimension=args.dimension,
        orientation=args.orientation,
        g=args.g,
        params=parse_params(args.param),
        fmt=args.fmt,
        out=args.out,
        seed=args.seed,
        dump_prelimit=args.dump_prelimit,
        full_residuals=args.full_residuals,
        expect_success=args.expect_success,
        isotropy=args.isotropy,
        checks=list(args.checks),
        run_all=args.run_all,
        input=args.input,
        wz_family=args.wz_family,
    )


def resolve_matrix(cfg: RunConfig) -> RMatrix:
    if cfg.input is not None:
        try:
            data = json.loads(cfg.input.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"Cannot read R-matrix from {cfg.input}: {e}")
        return RMatrix.from_json(data)
    return build_r(cfg.series(), cfg.orientation)


def resolve_map(cfg: RunConfig, dimension: int) -> Optional[LinearMap]:
    if cfg.params and cfg.g not in GL3_MAPS:
        raise UsageError(f"--param only applies to the GL(3) maps {', '.join(GL3_MAPS)}, not --g {cfg.g}.")
    if cfg.g == "none":
        return None
    if cfg.g == "identity":
        return ContractionMap.identity(dimension)
    if cfg.g == "standard":
        return standard_g(dimension)
    if cfg.family != "A" or dimension != 3:
        raise UsageError(f"--g {cfg.g} is defined for the A series with N=3 only.")
    return gl3_map(cfg.g, cfg.params)


def resolve_golden(cfg: RunConfig, spec: SeriesSpec):
    """Published listing that applies to this contraction, if any."""
    if cfg.params:
        return None
    if spec.family == "A" and cfg.g == "g1":
        return ("eq12", None)
    if spec.family == "A" and cfg.g == "g3":
        return ("eq14", None)
    if spec.family == "A" and cfg.g == "standard" and spec.dimension >= 3:
        return ("eq20_computed", spec.dimension)
    if spec.family == "C" and cfg.g == "standard":
        return ("eq27", spec.rank)
    return None


def cmd_build(cfg: RunConfig):
    matrix = build_r(cfg.series(), cfg.orientation)
    return matrix.to_json(), matrix.to_text(), EXIT_PASS


def _obstruction(error, cfg: RunConfig):
    data = error.report()
    lines = [f"obstruction: {error}"]
    for item in data["entries"]:
        where = item.get("pair", [item.get("row"), item.get("col")])
        lines.append(f"  {where} order {item['order']}: {item['value']}")
    return data, "\n".join(lines), EXIT_FAIL if cfg.expect_success else EXIT_PASS


def _write_prelimit(cfg: RunConfig, prelimit: RMatrix, data: dict) -> None:
    if cfg.out is None:
        data["prelimit"] = prelimit.to_json()
        return
    target = cfg.out.with_suffix(".prelimit.json")
    target.write_text(json.dumps(prelimit.to_json(), indent=2) + "\n", encoding="utf-8")
    logger.info(f"Pre-limit matrix written to {target}")


def cmd_contract(cfg: RunConfig):
    spec = cfg.series()
    matrix = build_r(spec, cfg.orientation)
    g = resolve_map(cfg, spec.dimension)
    if g is None:
        raise UsageError("contract needs a map chosen with --g.")
    try:
        result = contract_r(matrix, g, subject=spec.label())
        data, text, code = result.to_json(), result.to_text(), EXIT_PASS
    except ContractionSingular as e:
        data, text, code = _obstruction(e, cfg)
    if cfg.dump_prelimit:
        _write_prelimit(cfg, conjugate_r(matrix, g), data)
    return data, text, code


def cmd_plane(cfg: RunConfig):
    spec = cfg.series()
    g = resolve_map(cfg, spec.dimension)
    if spec.family == "A":
        sources = [manin_plane(spec.dimension), dual_plane(spec.dimension)]
    elif spec.family == "C":
        sources = [symplectic_space(spec)]
    else:
        raise UsageError("plane supports the A and C series.")
    data, blocks = {}, []
    try:
        for rels in sources:
            out = rels if g is None else transform_relations(rels, g)
            data[rels.kind] = out.to_json()
            blocks.append(f"# {rels.kind}\n{format_relations(out)}")
    except RelationSingular as e:
        return _obstruction(e, cfg)

    if cfg.isotropy:
        if spec.family != "C" or g is None:
            raise UsageError("--isotropy needs the C series and a map.")
        form = contract_form(g, spec)
        normal = reduce_quadratic(isotropy_form(form), transform_relations(sources[0], g))
        data["isotropy"] = {"form": form.to_json(), "normal_form": normal.to_text()}
        blocks.append(f"# isotropy\nx^t C x ≡ {normal.to_text()}")
    return data, "\n".join(blocks), EXIT_PASS


def _contracted(cfg: RunConfig) -> RMatrix:
    matrix = resolve_matrix(cfg)
    g = resolve_map(cfg, matrix.dimension)
    return matrix if g is None else contract_r(matrix, g)


def _relations_output(relations, label: str):
    data = {"relations": [relation.to_json() for relation in relations], "count": len(relations)}
    text = "\n".join([f"# {label}: {len(relations)} independent relations"] + [r.to_text() for r in relations])
    return data, text, EXIT_PASS


def cmd_rtt(cfg: RunConfig):
    return _relations_output(rtt_relations(_contracted(cfg)), "RTT")


def cmd_wz(cfg: RunConfig):
    return _relations_output(wz_relations(_contracted(cfg), cfg.wz_family), f"differential ({cfg.wz_family})")


def _bundle_output(reports: List[VerificationReport], extra: Optional[dict] = None):
    data = bundle_to_json(reports)
    if extra:
        data.update(extra)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.check}  ({r.elapsed_ms} ms)" for r in reports]
    for report in reports:
        for residual in report.residuals:
            lines.append(f"  {report.check}: {residual}")
    return data, "\n".join(lines), EXIT_PASS if data["pass"] else EXIT_FAIL


def cmd_verify(cfg: RunConfig):
    """
    Run the named checks. With --all, or with no names at all, the checks are
    chosen from the matrix: ybe, plus involutive and the applicable golden
    listing for a contracted one; --all adds braid, classical-limit and hecke.
    """
    names = set(cfg.checks)
    matrix, golden = None, None
    defaults = cfg.run_all or not names
    if defaults or names & set(MATRIX_CHECKS):
        matrix = _contracted(cfg)
        contracted = cfg.g != "none"
        if defaults:
            names.add("ybe")
            if contracted:
                names.add("involutive")
                if cfg.input is None:
                    golden = resolve_golden(cfg, cfg.series())
        if cfg.run_all:
            names.add("braid")
            if contracted:
                names.add("classical-limit")
            elif cfg.input is None and cfg.family == "A":
                names.add("hecke")
    return _bundle_output(run_checks(names, matrix, golden, cfg.full_residuals))


def cmd_scan(cfg: RunConfig):
    return _bundle_output(run_checks(["scan-gl3"], full=cfg.full_residuals))


def _report(check: str, passed: bool, residuals: Optional[List[dict]] = None, **details) -> VerificationReport:
    residuals = list(residuals or ([] if passed else [{"reason": "mismatch"}]))
    return VerificationReport(check, passed, residuals, 0, len(residuals), details)


def _contraction_reports(label: str, contracted: RMatrix, golden: Optional[tuple], full: bool) -> List[VerificationReport]:
    names = ["ybe", "involutive", "classical-limit"]
    reports = run_checks(names, contracted, golden, full)
    for report in reports:
        report.check = f"{label}:{report.check}"
    return reports


def _span_report(check: str, computed, expected) -> VerificationReport:
    passed = computed.span_equals(expected)
    residuals = [] if passed else [{"computed": format_relations(computed), "expected": format_relations(expected)}]
    return _report(check, passed, residuals)


def cmd_report(cfg: RunConfig):
    """Reproduce every published listing and claim in one bundle."""
    full = cfg.full_residuals
    rng = random.Random(cfg.seed)
    reports: List[VerificationReport] = []
    notes: Dict[str, object] = {}

    r_a3 = build_r_A(3)
    for which, listing, first, last in (("g1", "eq12", 1, 2), ("g3", "eq14", 1, 3)):
        g = gl3_map(which)
        reports += _contraction_reports(f"A_2/{which}", contract_r(r_a3, g), (listing, None), full)
        reports.append(_span_report(f"plane:{which}", transform_relations(manin_plane(3), g), gl_h_plane(3, first, last)))
        reports.append(_span_report(f"dual:{which}", transform_relations(dual_plane(3), g), gl_h_dual(3, first, last)))

    for size in range(3, 7):
        g = standard_g(size)
        contracted = contract_r(build_r_A(size), g)
        reports += _contraction_reports(f"A_{size - 1}/standard", contracted, ("eq20_computed", size), full)
        printed = golden_compare(contracted, "eq20", size, full=True)
        notes[f"eq20_printed_N{size}"] = {"variant": printed.to_json()["variant"], "differing": printed.residuals}
        reports.append(_span_report(f"plane:standard(N={size})", transform_relations(manin_plane(size), g), gl_h_plane(size)))

    for n in (1, 2, 3):
        spec = SeriesSpec("C", n)
        g = standard_g(spec.dimension)
        reports += _contraction_reports(spec.label(), contract_r(build_r_BCD(spec), g), ("eq27", n), full)
        form = contract_form(g, spec)
        reports.append(_report(f"form:{spec.label()}", form == load_form_listing(n), form=form.to_text()))
        relations = transform_relations(symplectic_space(spec), g)
        reports.append(_span_report(f"space:{spec.label()}", relations, sp_h_space(spec)))
        normal = reduce_quadratic(isotropy_form(form), relations)
        reports.append(_report(f"isotropy:{spec.label()}", normal.is_zero(), None if normal.is_zero() else [{"normal_form": normal.to_text()}]))

    for family, rank in (("B", 1), ("B", 2), ("D", 2), ("D", 3)):
        spec = SeriesSpec(family, rank)
        try:
            contract_r(build_r_BCD(spec), standard_g(spec.dimension), subject=spec.label())
            reports.append(_report(f"obstruction:{spec.label()}", False, [{"reason": "contraction unexpectedly finite"}]))
        except ContractionSingular as e:
            has_simple_pole = any(item["order"] == -1 for item in e.offending)
            reports.append(_report(f"obstruction:{spec.label()}", has_simple_pole, None, poles=len(e.offending)))

    for matrix, label in ((r_a3, "A_2"), (build_r_BCD(SeriesSpec("C", 1)), "C_1"), (build_r_BCD(SeriesSpec("C", 2)), "C_2")):
        report = run_checks(["ybe"], matrix, full=full)[0]
        report.check = f"{label}:q-ybe"
        reports.append(report)
    for spec in (SeriesSpec("A", 4), SeriesSpec("A", 5), SeriesSpec("B", 1), SeriesSpec("C", 3), SeriesSpec("D", 2)):
        v0 = Fraction(rng.choice((5, 6, 7, 8, 9, 11, 12, 13, 14, 15)), 10)
        h0 = rng.randint(-5, 5)
        report = check_ybe_numeric(build_r(spec), v0, h0, full)
        report.check = f"{spec.label()}:{report.check}"
        reports.append(report)

    reports += run_checks(["equivalence-s", "map-identities", "scan-gl3"], full=full)

    r_h2 = contract_r(build_r_A(2), standard_g(2))
    identity = RMatrix.identity(2)
    reports.append(_report("rtt:classical-limit", relation_spans_equal(rtt_relations(r_h2.specialize_h(0)), rtt_relations(identity))))
    reports.append(_report("wz:classical-limit", relation_spans_equal(wz_relations(r_h2.specialize_h(0)), wz_relations(identity))))

    return _bundle_output(sorted(reports, key=lambda r: r.check), {"notes": notes})


HANDLERS = {
    "build": cmd_build,
    "contract": cmd_contract,
    "plane": cmd_plane,
    "rtt": cmd_rtt,
    "wz": cmd_wz,
    "verify": cmd_verify,
    "scan-gl3": cmd_scan,
    "report": cmd_report,
}


def emit(cfg: RunConfig, data: dict, text: str) -> None:
    output = json.dumps(data, indent=2) + "\n" if cfg.fmt == "json" else text + "\n"
    if cfg.out is None:
        sys.stdout.write(output)
    else:
        cfg.out.write_text(output, encoding="utf-8")
        logger.info(f"Output written to {cfg.out}")


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    try:
        cfg = parse_run_config(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    except (UsageError, ScalarError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_INPUT

    logger.info(f"STARTING {cfg.command}")
    try:
        data, text, code = HANDLERS[cfg.command](cfg)
    except (UsageError, ConfigError, RMatrixError, GoldenFixtureError, ScalarError, NonSolvable) as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT
    except ContractionSingular as e:
        data, text, code = _obstruction(e, cfg)
    except ValueError as e:
        logger.error(f"Input error: {e}")
        return EXIT_INPUT
    emit(cfg, data, text)
    logger.info(f"EXITING {cfg.command} with code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
