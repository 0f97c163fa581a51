"""Columns, model specifications, CSV loading and design-matrix assembly."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from .contrasts import poly_contrasts, truncate_contrasts
from .families import FamilyKind, ScoreFamilyParams, ScoreGrid, quantile_scores


class SpecError(ValueError):
    """Malformed model specification or schema."""


class CSVParseError(ValueError):
    """Bad CSV content; ``line`` is the 1-based line number in the file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NumericColumn:
    name: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError(f"column {self.name!r} has non-finite values")
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class FactorColumn:
    """Ordered factor: level labels in increasing order and 1-based level codes."""

    name: str
    levels: tuple[str, ...]
    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        K = len(self.levels)
        if K < 2:
            raise ValueError(f"factor {self.name!r} needs at least two levels")
        if codes.size and (codes.min() < 1 or codes.max() > K):
            raise ValueError(f"factor {self.name!r} has codes outside 1..{K}")
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "codes", _frozen(codes))

    @property
    def K(self) -> int:
        return len(self.levels)

    def __len__(self):
        return len(self.codes)


Column = Union[NumericColumn, FactorColumn]


@dataclass(frozen=True)
class GaussianResponse:
    """Numeric response, optionally raised to ``power`` (0 means log)."""

    column: str
    power: float = 1.0


@dataclass(frozen=True)
class BinomialResponse:
    """Grouped binomial counts: successes and failures per row."""

    successes: str
    failures: str


ResponseSpec = Union[GaussianResponse, BinomialResponse]


@dataclass(frozen=True)
class NumericTerm:
    column: str


@dataclass(frozen=True)
class PolyTerm:
    column: str
    degrees: tuple[int, ...] | None = None  # None: all degrees 1..K-1


@dataclass(frozen=True)
class ScoreTerm:
    column: str
    family: FamilyKind
    params: ScoreFamilyParams | None = None  # None: free, to be optimized

    def __post_init__(self):
        object.__setattr__(self, "family", FamilyKind.parse(self.family))
        if self.params is not None and self.params.kind is not self.family:
            raise SpecError(f"params for {self.column!r} are {self.params.kind.value}, term says {self.family.value}")

    @property
    def free(self) -> bool:
        return self.params is None


TermSpec = Union[NumericTerm, PolyTerm, ScoreTerm]


@dataclass(frozen=True)
class ModelFrame:
    columns: Mapping[str, Column]
    response: ResponseSpec
    terms: tuple
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "columns", dict(self.columns))
        object.__setattr__(self, "terms", tuple(self.terms))
        lengths = {len(c) for c in self.columns.values()}
        if len(lengths) > 1:
            raise SpecError(f"columns have unequal lengths {sorted(lengths)}")
        for name in self._response_columns():
            col = self._get(name)
            if not isinstance(col, NumericColumn):
                raise SpecError(f"response column {name!r} must be numeric")
        if isinstance(self.response, BinomialResponse):
            for name in self._response_columns():
                v = self.columns[name].values
                if np.any(v < 0) or np.any(v != np.round(v)):
                    raise SpecError(f"binomial counts in {name!r} must be nonnegative integers")
        elif not math.isfinite(self.response.power):
            raise SpecError("response power must be finite")
        scored = set()
        for term in self.terms:
            col = self._get(term.column)
            if isinstance(term, NumericTerm):
                if not isinstance(col, NumericColumn):
                    raise SpecError(f"numeric term needs a numeric column, {term.column!r} is a factor")
                continue
            if not isinstance(col, FactorColumn):
                raise SpecError(f"term on {term.column!r} needs an ordered factor")
            if isinstance(term, PolyTerm) and term.degrees is not None:
                bad = [d for d in term.degrees if not 1 <= d <= col.K - 1]
                if bad or not term.degrees:
                    raise SpecError(f"degrees {list(term.degrees)} invalid for {term.column!r} with K={col.K}")
            if isinstance(term, ScoreTerm):
                if term.column in scored:
                    raise SpecError(f"more than one score term for {term.column!r}")
                scored.add(term.column)

    def _get(self, name: str) -> Column:
        try:
            return self.columns[name]
        except KeyError:
            raise SpecError(f"column {name!r} not in data (have {sorted(self.columns)})") from None

    def _response_columns(self) -> tuple[str, ...]:
        if isinstance(self.response, BinomialResponse):
            return (self.response.successes, self.response.failures)
        return (self.response.column,)

    @property
    def n(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    @property
    def family(self) -> str:
        return "binomial" if isinstance(self.response, BinomialResponse) else "gaussian"

    def factor(self, name: str) -> FactorColumn:
        col = self._get(name)
        if not isinstance(col, FactorColumn):
            raise SpecError(f"{name!r} is not a factor")
        return col

    @property
    def score_terms(self) -> tuple[ScoreTerm, ...]:
        return tuple(t for t in self.terms if isinstance(t, ScoreTerm))

    @property
    def free_score_terms(self) -> tuple[ScoreTerm, ...]:
        return tuple(t for t in self.score_terms if t.free)

    def with_terms(self, terms) -> "ModelFrame":
        return ModelFrame(self.columns, self.response, tuple(terms), self.meta)

    def with_response(self, response: ResponseSpec) -> "ModelFrame":
        return ModelFrame(self.columns, response, self.terms, self.meta)

    def take(self, rows) -> "ModelFrame":
        rows = np.asarray(rows)
        cols = {}
        for name, c in self.columns.items():
            if isinstance(c, NumericColumn):
                cols[name] = NumericColumn(name, c.values[rows])
            else:
                cols[name] = FactorColumn(name, c.levels, c.codes[rows])
        return ModelFrame(cols, self.response, self.terms, self.meta)

    def response_vector(self) -> np.ndarray:
        """Gaussian response after the power transform."""
        if not isinstance(self.response, GaussianResponse):
            raise SpecError("response_vector applies to gaussian responses")
        y = self.columns[self.response.column].values
        power = self.response.power
        if power == 1.0:
            return np.array(y)
        if np.any(y <= 0):
            raise SpecError(f"power transform needs a positive response, {self.response.column!r} is not")
        return np.log(y) if power == 0.0 else y ** power

    def binomial_counts(self) -> tuple[np.ndarray, np.ndarray]:
        if not isinstance(self.response, BinomialResponse):
            raise SpecError("binomial_counts applies to binomial responses")
        return (np.array(self.columns[self.response.successes].values),
                np.array(self.columns[self.response.failures].values))


@dataclass(frozen=True)
class DesignMatrix:
    matrix: np.ndarray
    names: tuple[str, ...]
    term_slices: Mapping[str, slice]

    @property
    def shape(self):
        return self.matrix.shape


def term_label(term: TermSpec) -> str:
    if isinstance(term, ScoreTerm):
        return f"{term.column}.score"
    if isinstance(term, PolyTerm):
        return f"{term.column}.poly"
    return term.column


def build_design(frame: ModelFrame, score_grids: Mapping[str, ScoreGrid] | None = None) -> DesignMatrix:
    """Expand the frame's terms into columns, intercept first.

    Score terms contribute one column holding the raw score of each row's
    level.  Grids for fixed-parameter score terms are computed when not given.
    """
    score_grids = dict(score_grids or {})
    n = frame.n
    blocks = [np.ones((n, 1))]
    names = ["(Intercept)"]
    slices = {"(Intercept)": slice(0, 1)}
    pos = 1
    for term in frame.terms:
        if isinstance(term, NumericTerm):
            block = frame.columns[term.column].values.reshape(-1, 1)
            labels = [term.column]
        elif isinstance(term, PolyTerm):
            col = frame.factor(term.column)
            C = poly_contrasts(col.K)
            if term.degrees is not None:
                C = truncate_contrasts(C, term.degrees)
            block = C.columns[col.codes - 1]
            labels = [term.column + s for s in C.names]
        else:
            col = frame.factor(term.column)
            grid = score_grids.get(term.column)
            if grid is None:
                if term.params is None:
                    raise SpecError(f"free score term {term.column!r} needs a score grid")
                grid = quantile_scores(col.K, term.params)
            if grid.K != col.K:
                raise SpecError(f"grid for {term.column!r} has K={grid.K}, factor has K={col.K}")
            block = grid.q[col.codes - 1].reshape(-1, 1)
            labels = [f"{term.column}.score"]
        blocks.append(block)
        names.extend(labels)
        slices[term_label(term)] = slice(pos, pos + len(labels))
        pos += len(labels)
    X = np.hstack(blocks).astype(float)
    return DesignMatrix(_frozen(X), tuple(names), slices)


# ---------------------------------------------------------------------------
# CSV and spec files

Schema = Mapping[str, Union[str, Sequence[str]]]  # "numeric" or ordered level labels


def load_csv(path, schema: Schema) -> dict[str, Column]:
    """Read the schema's columns from a CSV file with a header row.

    Columns not named in the schema are ignored.  Factor cells are matched
    against the declared level labels; numeric cells must parse as finite
    floats.  Empty cells and unknown labels are errors.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVParseError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        where = {}
        for name in schema:
            if name not in header:
                raise CSVParseError(f"missing column {name!r} in {path}", 1)
            where[name] = header.index(name)
        level_maps = {
            name: {lab: i + 1 for i, lab in enumerate(kind)}
            for name, kind in schema.items() if not isinstance(kind, str)
        }
        for name, kind in schema.items():
            if isinstance(kind, str) and kind != "numeric":
                raise SpecError(f"column {name!r}: kind must be 'numeric' or a list of levels")
        data = {name: [] for name in schema}
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise CSVParseError(f"expected {len(header)} fields, got {len(row)}", line)
            for name, idx in where.items():
                cell = row[idx].strip()
                if cell == "" or cell == "NA":
                    raise CSVParseError(f"missing value in column {name!r}", line)
                if name in level_maps:
                    code = level_maps[name].get(cell)
                    if code is None:
                        raise CSVParseError(f"unknown level {cell!r} for factor {name!r}", line)
                    data[name].append(code)
                else:
                    try:
                        v = float(cell)
                    except ValueError:
                        raise CSVParseError(f"non-numeric value {cell!r} in column {name!r}", line) from None
                    if not math.isfinite(v):
                        raise CSVParseError(f"non-finite value {cell!r} in column {name!r}", line)
                    data[name].append(v)
    if not data or not next(iter(data.values())):
        raise CSVParseError(f"{path} has no data rows")
    out: dict[str, Column] = {}
    for name, kind in schema.items():
        if isinstance(kind, str):
            out[name] = NumericColumn(name, np.array(data[name], dtype=float))
        else:
            out[name] = FactorColumn(name, tuple(kind), np.array(data[name], dtype=np.int64))
    return out


@dataclass(frozen=True)
class ModelSpec:
    family: str
    response: ResponseSpec
    terms: tuple
    factors: Mapping[str, tuple[str, ...]]

    def schema(self) -> dict:
        schema: dict = {}
        if isinstance(self.response, BinomialResponse):
            schema[self.response.successes] = "numeric"
            schema[self.response.failures] = "numeric"
        else:
            schema[self.response.column] = "numeric"
        for term in self.terms:
            if isinstance(term, NumericTerm):
                schema[term.column] = "numeric"
            elif term.column not in self.factors:
                raise SpecError(f"factor {term.column!r} has no level order under 'factors'")
            else:
                schema[term.column] = list(self.factors[term.column])
        return schema


def _parse_term(obj) -> TermSpec:
    if not isinstance(obj, dict) or "column" not in obj:
        raise SpecError(f"each term needs 'kind' and 'column', got {obj!r}")
    kind = obj.get("kind", "numeric")
    column = str(obj["column"])
    if kind == "numeric":
        return NumericTerm(column)
    if kind == "poly":
        degrees = obj.get("degrees")
        if degrees is not None:
            if not isinstance(degrees, list) or not all(isinstance(d, int) for d in degrees):
                raise SpecError(f"degrees for {column!r} must be a list of integers")
            degrees = tuple(sorted(set(degrees)))
        return PolyTerm(column, degrees)
    if kind == "score":
        try:
            family = FamilyKind.parse(obj.get("family", ""))
        except ValueError as exc:
            raise SpecError(str(exc)) from None
        params = obj.get("params")
        if params is not None:
            if not isinstance(params, list) or len(params) != 2:
                raise SpecError(f"score params for {column!r} must be a two-element list")
            try:
                params = ScoreFamilyParams(family, *map(float, params))
            except (TypeError, ValueError) as exc:
                raise SpecError(f"score params for {column!r}: {exc}") from None
        return ScoreTerm(column, family, params)
    raise SpecError(f"unknown term kind {kind!r}; use numeric, poly or score")


def parse_model_spec(obj) -> ModelSpec:
    """Validate a decoded JSON model spec.

    Keys: ``family`` (gaussian | binomial), ``response``, ``terms`` and
    ``factors`` (level order for every factor used by a term).
    """
    if not isinstance(obj, dict):
        raise SpecError("model spec must be a JSON object")
    for key in ("family", "response", "terms"):
        if key not in obj:
            raise SpecError(f"model spec is missing {key!r}")
    family = obj["family"]
    resp = obj["response"]
    if not isinstance(resp, dict):
        raise SpecError("'response' must be an object")
    if family == "binomial":
        if "successes" not in resp or "failures" not in resp:
            raise SpecError("binomial response needs 'successes' and 'failures'")
        response: ResponseSpec = BinomialResponse(str(resp["successes"]), str(resp["failures"]))
    elif family == "gaussian":
        if "column" not in resp:
            raise SpecError("gaussian response needs 'column'")
        try:
            power = float(resp.get("power", 1.0))
        except (TypeError, ValueError):
            raise SpecError("response 'power' must be a number") from None
        if not math.isfinite(power):
            raise SpecError("response 'power' must be finite")
        response = GaussianResponse(str(resp["column"]), power)
    else:
        raise SpecError(f"family must be 'gaussian' or 'binomial', got {family!r}")
    if not isinstance(obj["terms"], list):
        raise SpecError("'terms' must be a list")
    terms = tuple(_parse_term(t) for t in obj["terms"])
    factors = obj.get("factors", {})
    if not isinstance(factors, dict) or not all(isinstance(v, list) for v in factors.values()):
        raise SpecError("'factors' must map factor names to level lists")
    return ModelSpec(family, response, terms, {k: tuple(map(str, v)) for k, v in factors.items()})


def read_model_spec(path) -> ModelSpec:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from None
    return parse_model_spec(obj)


def load_frame(csv_path, spec: ModelSpec) -> ModelFrame:
    columns = load_csv(csv_path, spec.schema())
    return ModelFrame(columns, spec.response, spec.terms)
