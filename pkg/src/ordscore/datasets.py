"""The two worked datasets: oesophageal cancer case-control counts and diamond prices."""

from __future__ import annotations

import logging
from importlib import resources

import numpy as np

from .families import FamilyKind
from .modelframe import (
    BinomialResponse, CSVParseError, GaussianResponse, ModelFrame, NumericTerm,
    PolyTerm, ScoreTerm, load_csv,
)

log = logging.getLogger(__name__)

ESOPH_LEVELS = {
    "agegp": ("25-34", "35-44", "45-54", "55-64", "65-74", "75+"),
    "alcgp": ("0-39g/day", "40-79", "80-119", "120+"),
    "tobgp": ("0-9g/day", "10-19", "20-29", "30+"),
}
ESOPH_ROWS = 88

# reduced polynomial model: agegp linear + quadratic, tobgp linear, alcgp up to cubic
ESOPH_POLY_TERMS = (
    PolyTerm("agegp", (1, 2)),
    PolyTerm("tobgp", (1,)),
    PolyTerm("alcgp", (1, 2, 3)),
)


def esoph_score_terms(family=None, params=None):
    """ESOPH_POLY_TERMS with alcgp replaced by one score column."""
    if params is not None:
        family = params.kind
    return ESOPH_POLY_TERMS[:2] + (ScoreTerm("alcgp", FamilyKind.parse(family), params),)


def load_esoph(terms=ESOPH_POLY_TERMS) -> ModelFrame:
    """Embedded copy of the esoph data (88 rows, cases vs controls)."""
    schema = {name: list(levels) for name, levels in ESOPH_LEVELS.items()}
    schema.update(ncases="numeric", ncontrols="numeric")
    with resources.as_file(resources.files("ordscore") / "data" / "esoph.csv") as path:
        columns = load_csv(path, schema)
    return ModelFrame(columns, BinomialResponse("ncases", "ncontrols"), terms)


DIAMONDS_LEVELS = {
    "clarity": ("I1", "SI2", "SI1", "VS2", "VS1", "VVS2", "VVS1", "IF"),
    "color": ("D", "E", "F", "G", "H", "I", "J"),
    "cut": ("Fair", "Good", "Very Good", "Premium", "Ideal"),
}
DIAMONDS_ROWS = 53940
DIAMONDS_STEP = 100
DIAMONDS_THINNED = 540
# 1-based positions within the thinned subset
DIAMONDS_OUTLIERS = (518, 519, 523)
DIAMONDS_PRICE_SUM = 212135217  # content fingerprint of the standard file

DIAMONDS_FULL_TERMS = (
    NumericTerm("carat"),
    PolyTerm("clarity"),
    PolyTerm("color"),
    PolyTerm("cut"),
)
DIAMONDS_POLY_TERMS = (
    NumericTerm("carat"),
    PolyTerm("clarity", (1, 2, 3)),
    PolyTerm("color", (1, 2, 3, 4)),
    PolyTerm("cut", (1,)),
)


def diamonds_score_terms(family, clarity=None, color=None):
    family = FamilyKind.parse(family)
    return (
        NumericTerm("carat"),
        ScoreTerm("clarity", family, clarity),
        ScoreTerm("color", family, color),
        PolyTerm("cut", (1,)),
    )


def prepare_diamonds(path, terms=DIAMONDS_POLY_TERMS, drop_outliers: bool = True,
                     power: float = 0.5) -> ModelFrame:
    """Thin the diamonds CSV to rows 1, 101, 201, ... and drop the three outliers.

    The response is ``price ** power`` (square root by default).  The frame's
    ``meta`` records the raw, thinned and final row counts.
    """
    schema = {"carat": "numeric", "price": "numeric"}
    schema.update({name: list(levels) for name, levels in DIAMONDS_LEVELS.items()})
    columns = load_csv(path, schema)
    n_raw = len(columns["price"])
    full = ModelFrame(columns, GaussianResponse("price", power), terms)
    keep = np.arange(0, n_raw, DIAMONDS_STEP)
    n_thinned = len(keep)
    log.info("diamonds: %d rows read, %d after thinning", n_raw, n_thinned)
    if n_thinned != DIAMONDS_THINNED:
        raise CSVParseError(
            f"thinning {n_raw} rows gave {n_thinned}, expected {DIAMONDS_THINNED}; "
            f"is this the standard {DIAMONDS_ROWS}-row diamonds file?")
    price_sum = float(np.sum(columns["price"].values))
    if price_sum != DIAMONDS_PRICE_SUM:
        log.warning("diamonds price total is %.0f, the standard file gives %d; "
                    "results may not match the published tables", price_sum, DIAMONDS_PRICE_SUM)
    dropped = ()
    if drop_outliers:
        dropped = DIAMONDS_OUTLIERS
        keep = np.delete(keep, [i - 1 for i in DIAMONDS_OUTLIERS])
    frame = full.take(keep)
    meta = {"n_raw": n_raw, "n_thinned": n_thinned, "dropped": dropped, "n": frame.n,
            "price_sum_ok": price_sum == DIAMONDS_PRICE_SUM}
    return ModelFrame(frame.columns, frame.response, frame.terms, meta)
