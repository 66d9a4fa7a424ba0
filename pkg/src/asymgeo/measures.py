"""Finite sample spaces, measures, random variables and their pairing.

Everything here is immutable: weight/value arrays are copied on construction
and flagged read-only, so instances can be shared freely between threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NegativeWeight, ParseError, SpaceMismatch, UnknownLabel

MASS_TOL = 1e-12
PRODUCT_SEP = "|"


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SampleSpace:
    """An ordered finite set of outcome labels."""

    labels: tuple

    def __init__(self, labels: Iterable):
        labels = tuple(str(label) for label in labels)
        if not labels:
            raise ValueError("a sample space needs at least one outcome")
        if len(set(labels)) != len(labels):
            raise ValueError("sample space labels must be unique")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of_size(cls, n: int, prefix: str = "w") -> "SampleSpace":
        return cls(f"{prefix}{i}" for i in range(n))

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise UnknownLabel(f"unknown label {label!r}") from None

    def product(self, other: "SampleSpace") -> "SampleSpace":
        """Pairs (i, j) in lexicographic order, labelled ``a|b``."""
        return SampleSpace(f"{a}{PRODUCT_SEP}{b}" for a in self.labels for b in other.labels)


def _check_same_space(a, b):
    if a.space != b.space:
        raise SpaceMismatch("objects live on different sample spaces")


class Measure:
    """A nonnegative finite measure on a finite sample space."""

    __slots__ = ("space", "weights")

    def __init__(self, weights: Sequence[float], space: SampleSpace | None = None):
        w = _frozen(weights, "weights")
        if space is None:
            space = SampleSpace.of_size(len(w))
        if len(space) != len(w):
            raise SpaceMismatch(f"{len(w)} weights for a space of size {len(space)}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise NegativeWeight(f"negative weight {w[w < 0][0]!r}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __len__(self) -> int:
        return len(self.weights)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.weights.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.weights, other.weights)

    __hash__ = None

    @property
    def mass(self) -> float:
        return math.fsum(self.weights)

    @property
    def support(self) -> np.ndarray:
        return self.weights > 0

    def is_probability(self, tol: float = MASS_TOL) -> bool:
        return abs(self.mass - 1.0) <= tol

    def allclose(self, other: "Measure", atol: float = MASS_TOL) -> bool:
        return self.space == other.space and np.allclose(self.weights, other.weights, rtol=0, atol=atol)

    def with_weights(self, weights) -> "Measure":
        return Measure(weights, self.space)


class ProbabilityMeasure(Measure):
    """A measure of total mass one (to within ``MASS_TOL``)."""

    __slots__ = ()

    def __init__(self, weights: Sequence[float], space: SampleSpace | None = None, tol: float = MASS_TOL):
        super().__init__(weights, space)
        if abs(self.mass - 1.0) > tol:
            raise ValueError(f"total mass {self.mass!r} is not 1")

    @classmethod
    def uniform(cls, space: SampleSpace | int) -> "ProbabilityMeasure":
        if isinstance(space, int):
            space = SampleSpace.of_size(space)
        n = len(space)
        return cls(np.full(n, 1.0 / n), space, tol=1e-9)


class RandomVariable:
    """A real-valued function on a finite sample space."""

    __slots__ = ("space", "values")

    def __init__(self, values: Sequence[float], space: SampleSpace | None = None):
        v = _frozen(values, "values")
        if space is None:
            space = SampleSpace.of_size(len(v))
        if len(space) != len(v):
            raise SpaceMismatch(f"{len(v)} values for a space of size {len(space)}")
        if not np.all(np.isfinite(v)):
            raise ValueError("random variable values must be finite")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", v)

    def __setattr__(self, name, value):
        raise AttributeError("RandomVariable is immutable")

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"RandomVariable({self.values.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RandomVariable):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.values, other.values)

    __hash__ = None

    def __neg__(self) -> "RandomVariable":
        return RandomVariable(-self.values, self.space)

    def __mul__(self, scalar: float) -> "RandomVariable":
        return RandomVariable(float(scalar) * self.values, self.space)

    __rmul__ = __mul__

    def __add__(self, other: "RandomVariable") -> "RandomVariable":
        _check_same_space(self, other)
        return RandomVariable(self.values + other.values, self.space)

    def __sub__(self, other: "RandomVariable") -> "RandomVariable":
        _check_same_space(self, other)
        return RandomVariable(self.values - other.values, self.space)

    @classmethod
    def indicator(cls, space: SampleSpace, i: int) -> "RandomVariable":
        v = np.zeros(len(space))
        v[i] = 1.0
        return cls(v, space)


def pairing(x: RandomVariable, y: Measure) -> float:
    """Expectation of ``x`` under ``y`` (``y`` need not be normalized)."""
    _check_same_space(x, y)
    return float(np.dot(x.values, y.weights))


def product_measure(q: Measure, p: Measure) -> Measure:
    """The product measure on ``q.space x p.space``, flattened row-major."""
    weights = np.outer(q.weights, p.weights).ravel()
    space = q.space.product(p.space)
    if isinstance(q, ProbabilityMeasure) and isinstance(p, ProbabilityMeasure):
        return ProbabilityMeasure(weights, space, tol=1e-9)
    return Measure(weights, space)


def normalize(y: Measure) -> ProbabilityMeasure:
    mass = y.mass
    if mass <= 0:
        raise ValueError("cannot normalize a measure with zero total mass")
    return ProbabilityMeasure(y.weights / mass, y.space, tol=1e-9)


# -- file I/O -----------------------------------------------------------------


def _guess_format(path, fmt):
    if fmt:
        return fmt.lower()
    ext = os.path.splitext(str(path))[1].lower()
    return "csv" if ext == ".csv" else "json"


def _parse_json(text: str, key: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict) or "space" not in doc or key not in doc:
        raise ParseError(f'expected an object with "space" and "{key}" fields')
    labels, numbers = doc["space"], doc[key]
    if not isinstance(labels, list) or not isinstance(numbers, list) or len(labels) != len(numbers):
        raise ParseError(f'"space" and "{key}" must be lists of equal length')
    try:
        numbers = [float(v) for v in numbers]
    except (TypeError, ValueError):
        raise ParseError(f'non-numeric entry in "{key}"') from None
    return labels, numbers


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _parse_csv(text: str):
    rows = [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]
    rows = [row for row in rows if not row[0].lstrip().startswith("#")]
    if rows and len(rows[0]) >= 2 and not _is_number(rows[0][1].strip()):
        rows = rows[1:]  # header row
    labels, numbers = [], []
    for lineno, row in enumerate(rows, 1):
        if len(row) != 2:
            raise ParseError(f"CSV row {lineno}: expected 'label,number'")
        label, raw = row[0].strip(), row[1].strip()
        if not _is_number(raw):
            raise ParseError(f"CSV row {lineno}: {raw!r} is not a number")
        labels.append(label)
        numbers.append(float(raw))
    if not labels:
        raise ParseError("empty CSV file")
    return labels, numbers


def _reorder(labels, numbers, space):
    """Put parsed entries into the order of an expected space."""
    if space is None:
        try:
            return SampleSpace(labels), numbers
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    out = [None] * len(space)
    for label, value in zip(labels, numbers):
        out[space.index(label)] = value
    if any(v is None for v in out):
        raise ParseError("file does not cover every outcome of the expected space")
    return space, out


def _load(path, fmt, key, space):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if _guess_format(path, fmt) == "csv":
        labels, numbers = _parse_csv(text)
    else:
        labels, numbers = _parse_json(text, key)
    return _reorder(labels, numbers, space)


def load_measure(path, fmt: str | None = None, space: SampleSpace | None = None) -> Measure:
    """Read a measure from JSON (``space``/``weights``) or ``label,weight`` CSV.

    When ``space`` is given, labels are matched against it and an unknown label
    raises UnknownLabel.
    """
    space, weights = _load(path, fmt, "weights", space)
    if any(w < 0 for w in weights):
        raise NegativeWeight("negative weight in " + str(path))
    try:
        return Measure(weights, space)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_random_variable(path, fmt: str | None = None, space: SampleSpace | None = None) -> RandomVariable:
    space, values = _load(path, fmt, "values", space)
    try:
        return RandomVariable(values, space)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dumps(obj, fmt: str = "json", header: bool = False) -> str:
    key, numbers = ("values", obj.values) if isinstance(obj, RandomVariable) else ("weights", obj.weights)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(["label", key[:-1]])
        for label, v in zip(obj.space.labels, numbers):
            writer.writerow([label, repr(float(v))])
        return buf.getvalue()
    # repr() of a float round-trips exactly, and json uses it.
    return json.dumps({"space": list(obj.space.labels), key: [float(v) for v in numbers]}) + "\n"


def save_measure(y: Measure, path, fmt: str | None = None, header: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(y, _guess_format(path, fmt), header))


def save_random_variable(x: RandomVariable, path, fmt: str | None = None, header: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(x, _guess_format(path, fmt), header))
