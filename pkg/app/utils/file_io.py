import csv
import json
import re
from pathlib import Path
from typing import IO, Iterable, List, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.errors import DimensionMismatchError, SpecParseError
from app.models.factor import ZeroSet
from app.models.filter import CoeffDomain, FirFilter
from app.schemas.spec_file import SpecFile

PathLike = Union[str, Path]

_HEADER = re.compile(r"^#\s*order=(\d+)\s+domain=(real|complex)\s*$")


def load_spec(path: PathLike) -> SpecFile:
    """Parse a JSON design spec; every failure becomes a SpecParseError."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SpecParseError(f"cannot read spec file {path}: {e.strerror}", details={"path": str(path)})
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(
            f"{path}:{e.lineno}:{e.colno}: {e.msg}",
            details={"path": str(path), "line": e.lineno, "column": e.colno},
        )
    try:
        return SpecFile.model_validate(raw)
    except ValidationError as e:
        errors = [{"loc": [str(part) for part in err["loc"]], "msg": err["msg"]} for err in e.errors()]
        first = errors[0]
        raise SpecParseError(
            f"{path}: {'.'.join(first['loc']) or '<root>'}: {first['msg']}",
            details={"path": str(path), "errors": errors},
        )


def _format_value(value: complex, domain: CoeffDomain) -> str:
    if domain == CoeffDomain.COMPLEX:
        return f"{value.real:.17g},{value.imag:.17g}"
    return f"{float(np.real(value)):.17g}"


def write_coefficients(path: PathLike, values: np.ndarray, domain: CoeffDomain) -> None:
    """Header ``# order=N domain=...`` then one value (or ``re,im``) per line."""
    values = np.atleast_1d(np.asarray(values))
    lines = [f"# order={values.size - 1} domain={domain.value}"]
    lines += [_format_value(complex(v), domain) for v in values]
    Path(path).write_text("\n".join(lines) + "\n")


def write_filter(path: PathLike, h: FirFilter) -> None:
    write_coefficients(path, h.coeffs, h.domain)


def read_coefficients(path: PathLike) -> Tuple[np.ndarray, CoeffDomain]:
    path = Path(path)
    try:
        lines = [line.strip() for line in path.read_text().splitlines()]
    except OSError as e:
        raise SpecParseError(f"cannot read coefficient file {path}: {e.strerror}", details={"path": str(path)})
    if not lines or not _HEADER.match(lines[0]):
        raise SpecParseError(f"{path}:1: expected header '# order=N domain=real|complex'",
                             details={"path": str(path), "line": 1})
    match = _HEADER.match(lines[0])
    order, domain = int(match.group(1)), CoeffDomain(match.group(2))

    values: List[complex] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        expected = 2 if domain == CoeffDomain.COMPLEX else 1
        try:
            if len(fields) != expected:
                raise ValueError(line)
            parts = [float(f) for f in fields]
        except ValueError:
            raise SpecParseError(
                f"{path}:{lineno}: malformed coefficient {line!r}",
                details={"path": str(path), "line": lineno},
            )
        values.append(complex(parts[0], parts[1]) if expected == 2 else parts[0])

    if len(values) != order + 1:
        raise DimensionMismatchError(
            f"{path}: header declares order {order} but holds {len(values)} coefficients",
            details={"path": str(path), "order": order, "count": len(values)},
        )
    dtype = np.complex128 if domain == CoeffDomain.COMPLEX else np.float64
    return np.asarray(values, dtype=dtype), domain


def read_filter(path: PathLike) -> FirFilter:
    values, domain = read_coefficients(path)
    return FirFilter(coeffs=values, domain=domain, phase="input")


def write_zero_set(path: PathLike, zeros: ZeroSet) -> None:
    """One ``re,im,multiplicity`` row per distinct zero."""
    rows = [[z.real, z.imag, mult] for z, mult in zeros.rows()]
    write_table(path, ["re", "im", "multiplicity"], rows)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return "" if np.isnan(value) else f"{value:.17g}"
    return str(value)


def write_table(target: Union[PathLike, IO[str]], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """CSV with a header row; NaN and None become empty cells."""
    if hasattr(target, "write"):
        _write_rows(target, header, rows)
        return
    with open(target, "w", newline="") as handle:
        _write_rows(handle, header, rows)


def _write_rows(handle: IO[str], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    writer = csv.writer(handle)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def write_json(path: PathLike, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, default=str) + "\n")
