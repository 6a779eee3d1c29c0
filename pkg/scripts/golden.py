"""
Golden Listings Loader
File: scripts/golden.py

Reads the published h-deformed R-matrices and bilinear forms from the CSV
fixtures under the golden folder (HDEFORM_GOLDEN_DIR, default data/golden).

R-matrix listings have columns row_i,row_j,col_k,col_l,value and hold the
off-diagonal or non-unit entries only; every diagonal entry R_ijij that is
not listed is 1. Form listings have columns row,col,value.
"""

import pathlib
from typing import Optional

import pandas as pd

from scripts.contraction import BilinearForm
from scripts.exact_ring import ScalarError, parse_scalar
from scripts.rmatrix import HPOLY, RMatrix
from utils.config import get_settings
from utils.logger import logger

R_COLUMNS = ["row_i", "row_j", "col_k", "col_l", "value"]
FORM_COLUMNS = ["row", "col", "value"]

# listing id -> (file pattern, dimension rule)
LISTINGS = {
    "eq12": ("eq12.csv", None),
    "eq14": ("eq14.csv", None),
    "eq20": ("eq20_N{size}.csv", "N"),
    "eq20_computed": ("eq20_computed_N{size}.csv", "N"),
    "eq27": ("eq27_n{size}.csv", "n"),
    "eq31": ("eq31_n{size}.csv", "n"),
}


class GoldenFixtureError(ValueError):
    """Raised when a golden listing is missing or malformed."""


def fixture_path(listing: str, size: Optional[int] = None) -> pathlib.Path:
    if listing not in LISTINGS:
        raise GoldenFixtureError(f"Unknown listing '{listing}', expected one of {', '.join(LISTINGS)}.")
    pattern, rule = LISTINGS[listing]
    if rule is not None and size is None:
        raise GoldenFixtureError(f"Listing '{listing}' needs its {rule} value.")
    return get_settings().golden_dir.joinpath(pattern.format(size=size))


def read_listing(listing: str, size: Optional[int] = None, columns=R_COLUMNS) -> pd.DataFrame:
    """Read one fixture into a DataFrame of strings."""
    file_path = fixture_path(listing, size)
    logger.debug(f"Reading golden listing from {file_path}.")
    try:
        df = pd.read_csv(file_path, dtype=str)
    except FileNotFoundError:
        raise GoldenFixtureError(f"Golden listing not found: {file_path}")
    missing = [column for column in columns if column not in df.columns]
    if missing:
        raise GoldenFixtureError(f"{file_path.name} is missing columns: {', '.join(missing)}")
    if df[columns].isnull().any().any():
        raise GoldenFixtureError(f"{file_path.name} has empty cells.")
    return df


def _parse_value(text: str, file_name: str):
    try:
        return parse_scalar(text.strip(), HPOLY)
    except ScalarError as e:
        raise GoldenFixtureError(f"{file_name}: bad value '{text}' ({e})")


def load_r_listing(listing: str, size: Optional[int] = None) -> RMatrix:
    """
    Load an R-matrix listing as an HPoly RMatrix, filling in R_ijij = 1.

    Args:
        listing (str): One of eq12, eq14, eq20, eq20_computed, eq27.
        size (int): N for eq20 listings, n for eq27.
    """
    if listing == "eq31":
        raise GoldenFixtureError("eq31 is a bilinear form; use load_form_listing.")
    df = read_listing(listing, size)
    file_name = fixture_path(listing, size).name
    entries = {}
    for record in df.to_dict(orient="records"):
        row = (int(record["row_i"]), int(record["row_j"]))
        col = (int(record["col_k"]), int(record["col_l"]))
        entries[(row, col)] = _parse_value(record["value"], file_name)

    dimension = {"eq20": size, "eq20_computed": size, "eq27": 2 * (size or 0)}.get(listing, 3)
    for i in range(1, dimension + 1):
        for j in range(1, dimension + 1):
            entries.setdefault(((i, j), (i, j)), 1)
    return RMatrix(dimension, entries, HPOLY)


def load_form_listing(size: int) -> BilinearForm:
    """Load the contracted symplectic form for C_size."""
    df = read_listing("eq31", size, FORM_COLUMNS)
    file_name = fixture_path("eq31", size).name
    entries = {
        (int(record["row"]), int(record["col"])): _parse_value(record["value"], file_name)
        for record in df.to_dict(orient="records")
    }
    return BilinearForm(2 * size, entries, HPOLY)
