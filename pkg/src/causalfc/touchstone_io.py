"""Touchstone v1 and CSV input/output.

Touchstone values are converted to complex real/imaginary form and Hz on
ingest and only converted back when writing. CSV files carry ``#`` metadata
lines followed by a header row; floats are written with 17 significant
digits so responses round-trip bit for bit.
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .continuation import ReconstructionError
from .diagnostics import CausalityReport
from .spectrum import BANDPASS, BASEBAND, RescaledResponse, SampledResponse

UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
PARAMS = ("S", "Y", "Z")
FORMATS = ("RI", "MA", "DB")
_PAIRS_PER_LINE = 4


class TouchstoneError(ValueError):
    """Malformed Touchstone input; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class NetworkData:
    """Tabulated network parameters.

    Attributes:
        n_ports: number of ports ``n``.
        freqs: strictly increasing frequencies in Hz.
        matrices: complex array of shape ``(len(freqs), n, n)``.
        parameter_kind: ``"S"``, ``"Y"`` or ``"Z"``.
        z_ref: reference impedance in ohms.
    """

    n_ports: int
    freqs: np.ndarray
    matrices: np.ndarray
    parameter_kind: str = "S"
    z_ref: float = 50.0

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        mats = np.asarray(self.matrices, dtype=complex)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "matrices", mats)
        n = self.n_ports
        if n < 1:
            raise ValueError("n_ports must be at least 1")
        if mats.ndim != 3 or mats.shape[1:] != (n, n) or mats.shape[0] != freqs.size:
            raise ValueError(
                f"matrices have shape {mats.shape}, expected ({freqs.size}, {n}, {n})"
            )
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if self.parameter_kind not in PARAMS:
            raise ValueError(f"parameter kind must be one of {PARAMS}")
        if self.z_ref <= 0:
            raise ValueError("z_ref must be positive")


@dataclass(frozen=True)
class _Options:
    unit: str = "GHz"
    param: str = "S"
    fmt: str = "MA"
    z_ref: float = 50.0


def _parse_options(tokens: list[str], lineno: int) -> _Options:
    seen = {}
    it = iter(tokens)
    for tok in it:
        low = tok.lower()
        if low in UNITS:
            key, val = "unit", {"hz": "Hz", "khz": "kHz", "mhz": "MHz", "ghz": "GHz"}[low]
        elif tok.upper() in PARAMS:
            key, val = "param", tok.upper()
        elif tok.upper() in FORMATS:
            key, val = "fmt", tok.upper()
        elif low == "r":
            raw = next(it, None)
            if raw is None:
                raise TouchstoneError(lineno, "option 'R' is missing its impedance value")
            try:
                val = float(raw)
            except ValueError:
                raise TouchstoneError(lineno, f"reference impedance {raw!r} is not a number") from None
            if not val > 0 or not math.isfinite(val):
                raise TouchstoneError(lineno, f"reference impedance must be positive, got {raw}")
            key = "z_ref"
        else:
            raise TouchstoneError(lineno, f"unknown option keyword {tok!r}")
        if key in seen:
            raise TouchstoneError(lineno, f"option {key} given twice")
        seen[key] = val
    return _Options(**seen)


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    return mag * np.exp(1j * np.deg2rad(b))


def _from_complex(z: np.ndarray, fmt: str) -> tuple[np.ndarray, np.ndarray]:
    if fmt == "RI":
        return z.real, z.imag
    ang = np.rad2deg(np.angle(z))
    mag = np.abs(z)
    if fmt == "MA":
        return mag, ang
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(mag), ang


def _record_to_matrix(vals: np.ndarray, n: int, fmt: str) -> np.ndarray:
    z = _to_complex(vals[0::2], vals[1::2], fmt)
    if n == 2:
        # two-port order is N11 N21 N12 N22
        return z.reshape(2, 2).T
    return z.reshape(n, n)


def _matrix_to_record(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    return m.T.ravel() if n == 2 else m.ravel()


def parse_touchstone(text: str, n_ports: int | None = None) -> NetworkData:
    """Parse Touchstone v1 text.

    Args:
        text: file contents.
        n_ports: port count, usually from the ``.sNp`` extension. When
            omitted it is inferred from the record layout: the first line of
            each record holds the frequency plus an even number of values,
            continuation lines hold an even number only.

    Raises:
        TouchstoneError: with the offending line number.
    """
    opts = None
    rows: list[tuple[int, list[float]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if opts is not None:
                raise TouchstoneError(lineno, "second option line")
            if rows:
                raise TouchstoneError(lineno, "option line after data")
            opts = _parse_options(line[1:].split(), lineno)
            continue
        if line.startswith("["):
            raise TouchstoneError(lineno, "Touchstone v2 keywords are not supported")
        try:
            nums = [float(t) for t in line.split()]
        except ValueError as exc:
            raise TouchstoneError(lineno, f"non-numeric data: {exc}") from None
        if not all(math.isfinite(v) for v in nums[:1]):
            raise TouchstoneError(lineno, "non-finite frequency")
        rows.append((lineno, nums))
    if opts is None:
        opts = _Options()
    if not rows:
        raise TouchstoneError(max(1, len(text.splitlines())), "no data records")

    # group lines into records: a record starts on a line with an odd count
    records: list[list] = []  # [first line, last line, values]
    for lineno, nums in rows:
        if len(nums) % 2 == 1:
            records.append([lineno, lineno, nums])
        elif not records:
            raise TouchstoneError(lineno, "data line without a leading frequency")
        else:
            records[-1][1] = lineno
            records[-1][2].extend(nums)

    def where(start, end):
        return "" if start == end else f" (record starting on line {start})"

    if n_ports is None:
        start, end, first = records[0]
        width = len(first) - 1
        n = math.isqrt(width // 2)
        if n < 1 or 2 * n * n != width:
            raise TouchstoneError(
                end, f"{width} values do not form a square matrix of complex pairs" + where(start, end)
            )
    else:
        n = int(n_ports)
        if n < 1:
            raise ValueError("n_ports must be at least 1")
    expected = 1 + 2 * n * n

    scale = UNITS[opts.unit.lower()]
    freqs = np.empty(len(records))
    mats = np.empty((len(records), n, n), dtype=complex)
    prev = -math.inf
    for idx, (start, end, nums) in enumerate(records):
        if len(nums) != expected:
            raise TouchstoneError(
                end,
                f"record has {len(nums)} numbers, expected {expected} for {n} port(s)"
                + where(start, end),
            )
        f = nums[0] * scale
        if f < 0:
            raise TouchstoneError(start, "negative frequency")
        if f <= prev:
            raise TouchstoneError(start, "frequencies are not strictly increasing")
        prev = f
        freqs[idx] = f
        mats[idx] = _record_to_matrix(np.asarray(nums[1:]), n, opts.fmt)
    return NetworkData(n, freqs, mats, opts.param, opts.z_ref)


def _ports_from_name(path: Path) -> int | None:
    m = re.fullmatch(r"\.s(\d+)p", path.suffix.lower())
    return int(m.group(1)) if m else None


def read_touchstone(path) -> NetworkData:
    path = Path(path)
    return parse_touchstone(path.read_text(), _ports_from_name(path))


def write_touchstone(net: NetworkData, fmt: str = "RI", unit: str = "Hz") -> str:
    """Render ``net`` as Touchstone v1 text.

    Matrices with three or more ports put each matrix row on its own line,
    wrapped after four complex values.
    """
    fmt = fmt.upper()
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    key = unit.lower()
    if key not in UNITS:
        raise ValueError(f"unit must be one of {sorted(UNITS)}")
    canon = {"hz": "Hz", "khz": "kHz", "mhz": "MHz", "ghz": "GHz"}[key]
    out = [f"# {canon} {net.parameter_kind} {fmt} R {net.z_ref:.17g}"]
    n = net.n_ports
    for f, m in zip(net.freqs, net.matrices):
        a, b = _from_complex(_matrix_to_record(m), fmt)
        pairs = [f"{x:.17g} {y:.17g}" for x, y in zip(a, b)]
        head = f"{f / UNITS[key]:.17g}"
        if n <= 2:
            out.append(" ".join([head, *pairs]))
            continue
        for r in range(n):
            row = pairs[r * n:(r + 1) * n]
            for c in range(0, n, _PAIRS_PER_LINE):
                chunk = " ".join(row[c:c + _PAIRS_PER_LINE])
                out.append(f"{head} {chunk}" if r == 0 and c == 0 else f"  {chunk}")
    return "\n".join(out) + "\n"


def network_from_response(resp: SampledResponse, parameter_kind: str = "S", z_ref: float = 50.0
                          ) -> NetworkData:
    """Wrap a scalar response as a one-port network."""
    return NetworkData(1, resp.freqs, resp.values.reshape(-1, 1, 1), parameter_kind, z_ref)


def extract_element(net: NetworkData, i: int, j: int) -> SampledResponse:
    """Scalar response of matrix element ``(i, j)``, 1-based."""
    n = net.n_ports
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"element ({i},{j}) outside a {n}-port network")
    return SampledResponse.from_arrays(net.freqs, net.matrices[:, i - 1, j - 1])


# CSV --------------------------------------------------------------------


def _g(v) -> str:
    return "" if v is None else f"{float(v):.17g}"


def _write_rows(meta: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_response_csv(data: SampledResponse | RescaledResponse) -> str:
    if isinstance(data, SampledResponse):
        meta = {"axis": "frequency_hz", "kind": data.kind,
                "w_min": _g(data.w_min), "w_max": _g(data.w_max)}
        xs = data.freqs
    elif isinstance(data, RescaledResponse):
        meta = {"axis": "normalized", "gap_halfwidth": _g(data.gap_halfwidth)}
        xs = data.points
    else:
        raise TypeError(f"unsupported type {type(data).__name__}")
    rows = ((_g(x), _g(v.real), _g(v.imag)) for x, v in zip(xs, data.values))
    return _write_rows(meta, ["x", "re", "im"], rows)


def write_errors_csv(err: ReconstructionError) -> str:
    rows = (
        (_g(x), _g(r), _g(i), _g(m))
        for x, r, i, m in zip(err.points, err.e_real, err.e_imag, err.magnitude)
    )
    return _write_rows({"content": "reconstruction_error"}, ["x", "e_re", "e_im", "abs"], rows)


def report_items(report: CausalityReport, settings: dict | None = None) -> list[tuple[str, str]]:
    """Flat ``(key, value)`` pairs of a report, settings first."""
    items = [(k, str(v)) for k, v in (settings or {}).items()]
    items += [
        ("verdict", report.verdict),
        ("violation_bound", _g(report.violation_bound)),
        ("noise_estimate", _g(report.noise_estimate)),
        ("violation_locations", ";".join(_g(x) for x in report.violation_locations)),
        ("truncation_floor", _g(report.floor)),
        ("max_error_real", _g(report.errors.max_real)),
        ("max_error_imag", _g(report.errors.max_imag)),
        ("l2_error_real", _g(report.errors.l2_real)),
        ("l2_error_imag", _g(report.errors.l2_imag)),
    ]
    s = report.smoothness
    items += [
        ("fit_c_tilde", _g(s.c_tilde) if s else ""),
        ("fit_k_order", _g(s.k_order) if s else ""),
        ("fit_residual", _g(s.residual) if s else ""),
    ]
    items += [(f"sweep_M{m}", _g(e)) for m, e in report.sweep]
    items += [("notes", " | ".join(report.notes))]
    return items


def write_report_csv(report: CausalityReport, settings: dict | None = None) -> str:
    return _write_rows({"content": "causality_report"}, ["key", "value"],
                       report_items(report, settings))


def write_csv(obj, settings: dict | None = None) -> str:
    """Serialize a response, an error record or a report."""
    if isinstance(obj, (SampledResponse, RescaledResponse)):
        return write_response_csv(obj)
    if isinstance(obj, ReconstructionError):
        return write_errors_csv(obj)
    if isinstance(obj, CausalityReport):
        return write_report_csv(obj, settings)
    raise TypeError(f"cannot write {type(obj).__name__} as CSV")


def _split_csv(text: str) -> tuple[dict, list[dict]]:
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k.strip()] = v.strip()
        elif line.strip():
            body.append(line)
    return meta, list(csv.DictReader(body))


def parse_report_csv(text: str) -> dict[str, str]:
    _, rows = _split_csv(text)
    return {r["key"]: r["value"] for r in rows}


def parse_csv(text: str) -> SampledResponse | RescaledResponse:
    """Inverse of :func:`write_response_csv`.

    A file without metadata is read as a frequency response whose band
    edges are its first and last frequencies.
    """
    meta, rows = _split_csv(text)
    if not rows:
        raise ValueError("CSV holds no data rows")
    missing = {"x", "re", "im"} - set(rows[0])
    if missing:
        raise ValueError(f"CSV header lacks columns {sorted(missing)}")
    try:
        x = np.array([float(r["x"]) for r in rows])
        v = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad CSV number: {exc}") from None
    if meta.get("axis") == "normalized":
        return RescaledResponse(x, v, float(meta.get("gap_halfwidth") or 0.0))
    w_min = float(meta["w_min"]) if meta.get("w_min") else None
    w_max = float(meta["w_max"]) if meta.get("w_max") else None
    resp = SampledResponse.from_arrays(x, v, w_min, w_max)
    if "kind" in meta and meta["kind"] not in (BASEBAND, BANDPASS):
        raise ValueError(f"unknown kind {meta['kind']!r}")
    return resp


def read_response(path, port: tuple[int, int] = (1, 1)) -> SampledResponse:
    """Load a scalar response from ``.sNp`` or CSV by extension."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        data = parse_csv(path.read_text())
        if not isinstance(data, SampledResponse):
            raise ValueError("CSV holds normalized data; a frequency response is needed")
        return data
    return extract_element(read_touchstone(path), *port)
