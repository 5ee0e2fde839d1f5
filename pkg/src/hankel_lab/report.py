"""Check records, run configuration and report documents shared by the suites and the CLI."""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__

SUITES = ("gamma", "scattering", "transfer", "hankel", "symplectic")
STATUSES = ("pass", "fail", "inconclusive")


class ConfigError(ValueError):
    """Malformed or unknown configuration."""


# ---------------------------------------------------------------------------
# records


def _jsonable(v):
    """Plain JSON values; complex numbers become [re, im]."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        if v.imag == 0:
            return _jsonable(v.real)
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, str):
        return v
    return str(v)


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    parameters: dict
    lhs: object
    rhs: object
    abs_error: float
    rel_error: float
    tolerance: float
    status: str
    runtime_ms: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    def as_dict(self, runtimes: bool = True) -> dict:
        d = {f.name: _jsonable(getattr(self, f.name)) for f in fields(self)}
        if not runtimes:
            d.pop("runtime_ms")
        return d


def compare(check_id: str, parameters: dict, lhs, rhs, tolerance: float, metric: str = "rel",
            inconclusive: bool = False, runtime_ms: float = 0.0) -> CheckRecord:
    """Record comparing lhs with rhs; `metric` selects which error the tolerance bounds."""
    diff = complex(lhs) - complex(rhs)
    abs_err = abs(diff)
    rel_err = abs_err / abs(complex(rhs)) if complex(rhs) != 0 else (0.0 if abs_err == 0 else math.inf)
    err = rel_err if metric == "rel" else abs_err
    if inconclusive:
        status = "inconclusive"
    else:
        status = "pass" if err <= tolerance else "fail"
    return CheckRecord(check_id, parameters, lhs, rhs, abs_err, rel_err, tolerance, status, runtime_ms)


def bound(check_id: str, parameters: dict, value: float, tolerance: float,
          runtime_ms: float = 0.0, reference: float = 0.0) -> CheckRecord:
    """Record for a scalar discrepancy that must not exceed the tolerance."""
    value = float(value)
    status = "pass" if value <= tolerance else "fail"
    return CheckRecord(check_id, parameters, value, reference, abs(value - reference), abs(value - reference),
                       tolerance, status, runtime_ms)


def predicate(check_id: str, parameters: dict, ok: bool, detail=None, runtime_ms: float = 0.0) -> CheckRecord:
    """Record for a yes/no property."""
    return CheckRecord(check_id, parameters, detail if detail is not None else bool(ok), True,
                       0.0 if ok else 1.0, 0.0 if ok else 1.0, 0.0, "pass" if ok else "fail", runtime_ms)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = 1e3 * (time.perf_counter() - self.t0)

    def stamp(self, records: Sequence[CheckRecord]) -> List[CheckRecord]:
        """Spread the elapsed time evenly over records that were produced together."""
        per = self.ms / max(len(records), 1)
        return [replace(r, runtime_ms=per) for r in records]


# ---------------------------------------------------------------------------
# configuration

_QUAD_KEYS = ("radius", "width", "nodes_per_axis", "stages", "tolerance")


@dataclass(frozen=True)
class RunConfig:
    suites: Tuple[str, ...] = SUITES
    case: Optional[str] = None
    n: Optional[int] = None
    seed: int = 0
    slow: bool = False
    out: Optional[str] = None
    emit_plots: bool = False
    quadrature: Dict[str, float] = field(default_factory=dict)
    hankel_modes: Tuple[str, ...] = ("chain", "direct")

    def __post_init__(self):
        suites = tuple(self.suites)
        for s in suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES + ('all',))}")
        object.__setattr__(self, "suites", suites)
        for k in self.quadrature:
            if k not in _QUAD_KEYS:
                raise ConfigError(f"unknown quadrature key {k!r}")
        for m in self.hankel_modes:
            if m not in ("chain", "direct"):
                raise ConfigError(f"unknown hankel mode {m!r}")
        if self.n is not None and self.n not in (1, 2, 3):
            raise ConfigError("n must be 1, 2 or 3")

    def echo(self) -> dict:
        return {"suites": list(self.suites), "case": self.case, "n": self.n, "seed": self.seed,
                "slow": self.slow, "quadrature": dict(sorted(self.quadrature.items())),
                "hankel_modes": list(self.hankel_modes)}


_CONFIG_KEYS = {"suite", "case", "n", "seed", "slow", "out", "emit_plots", "hankel_modes"} | {
    f"quadrature.{k}" for k in _QUAD_KEYS}


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def parse_suites(value: str) -> Tuple[str, ...]:
    names = [s.strip() for s in value.replace(",", " ").split() if s.strip()]
    if not names:
        raise ConfigError("empty suite selection")
    out: List[str] = []
    for s in names:
        for t in (SUITES if s == "all" else (s,)):
            if t not in SUITES:
                raise ConfigError(f"unknown suite {t!r}; choose from {', '.join(SUITES + ('all',))}")
            if t not in out:
                out.append(t)
    return tuple(out)


def read_config_file(path) -> dict:
    """Flat `key = value` text; '#' starts a comment. Unknown keys are rejected."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {path} not found")
    out = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {k!r}")
        out[k] = v
    return out


def config_from_mapping(m: dict, base: Optional[RunConfig] = None) -> RunConfig:
    """Apply string-valued settings (config file or CLI) on top of `base`."""
    base = RunConfig() if base is None else base
    kw = {}
    quad = dict(base.quadrature)
    try:
        for k, v in m.items():
            if k == "suite":
                kw["suites"] = parse_suites(v)
            elif k == "case":
                kw["case"] = v
            elif k == "n":
                kw["n"] = int(v)
            elif k == "seed":
                kw["seed"] = int(v)
            elif k in ("slow", "emit_plots"):
                kw[k] = _parse_bool(v)
            elif k == "out":
                kw["out"] = v
            elif k == "hankel_modes":
                kw["hankel_modes"] = tuple(s.strip() for s in v.split(",") if s.strip())
            elif k.startswith("quadrature."):
                key = k.split(".", 1)[1]
                quad[key] = int(v) if key in ("nodes_per_axis", "stages") else float(v)
            else:
                raise ConfigError(f"unknown key {k!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    kw["quadrature"] = quad
    return replace(base, **kw)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    config: RunConfig
    records: List[CheckRecord] = field(default_factory=list)
    grids: Dict[str, List[dict]] = field(default_factory=dict)
    version: str = __version__

    def sorted_records(self) -> List[CheckRecord]:
        return sorted(self.records, key=lambda r: r.check_id)

    @property
    def summary(self) -> Dict[str, int]:
        counts = {s: 0 for s in STATUSES}
        for r in self.records:
            counts[r.status] += 1
        counts["total"] = len(self.records)
        return counts

    @property
    def failed(self) -> bool:
        return self.summary["fail"] > 0

    def body(self, runtimes: bool = True) -> dict:
        return {"tool": "hankel-lab", "version": self.version, "config": self.config.echo(),
                "seed": self.config.seed, "summary": self.summary,
                "records": [r.as_dict(runtimes) for r in self.sorted_records()]}

    def to_json(self, runtimes: bool = True) -> str:
        return json.dumps(self.body(runtimes), indent=2, sort_keys=True) + "\n"

    def text_summary(self) -> str:
        lines = []
        for r in self.sorted_records():
            lines.append(f"{r.status.upper():13s} {r.check_id}  rel={r.rel_error:.3g} tol={r.tolerance:.3g}")
        s = self.summary
        lines.append(f"{s['total']} checks: {s['pass']} pass, {s['fail']} fail, {s['inconclusive']} inconclusive")
        return "\n".join(lines)

    def write(self, out_dir) -> Path:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        path = d / "report.json"
        path.write_text(self.to_json())
        (d / "summary.txt").write_text(self.text_summary() + "\n")
        return path


def emit_plot_data(report: Report, check_id: str, path) -> Path:
    """Write the (parameter, lhs, rhs, error) rows of a gridded check as CSV."""
    if not report.records and not report.grids:
        raise KeyError("report is empty")
    if check_id not in report.grids:
        raise KeyError(f"no gridded data for check {check_id!r}; available: {sorted(report.grids)}")
    rows = report.grids[check_id]
    if not rows:
        raise KeyError(f"check {check_id!r} has an empty grid")
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["parameter", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "error"])
        for row in rows:
            lhs, rhs = complex(row["lhs"]), complex(row["rhs"])
            w.writerow([row["parameter"], repr(lhs.real), repr(lhs.imag), repr(rhs.real), repr(rhs.imag),
                        repr(float(row["error"]))])
    return p
