#!/usr/bin/env -S python3 -u
"""
Result reports for fuzzy-workbench.

Report subclasses declare their columns via class-level Column instances.
The command layer fills rows with add_row() and pass/fail records with
check(); write_report() emits the same numbers as JSON or CSV.

Floats are written with repr (shortest round-trip form), so a JSON and a
CSV file of one run carry identical numeric text.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import tempfile
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from config import OutputFormat, RunConfig, __version__


class Column:
    """
    Descriptor for a named report column.

    Declare at the class level. The Report metaclass fixes the column layout
    when the class is created: base classes first, then declaration order.
    A subclass may not redeclare a column it inherits, so a header never
    appears twice.
    """

    def __init__(self, doc: str = ""):
        self.doc = doc
        self.name: Optional[str] = None

    def __set_name__(self, owner: type, name: str) -> None:
        self.name = name

    def __repr__(self) -> str:
        return f"Column({self.name!r})"


class _ReportMeta(type):
    """Metaclass that lays out the Column descriptors of a report class."""

    def __init__(cls, name: str, bases: tuple, namespace: dict):
        super().__init__(name, bases, namespace)
        layout: Dict[str, Column] = {}
        owner: Dict[str, str] = {}
        for klass in reversed(cls.__mro__):
            for attr_name, attr_val in vars(klass).items():
                if not isinstance(attr_val, Column):
                    continue
                if attr_name in layout:
                    raise TypeError(f"{name}: column {attr_name!r} is already declared by {owner[attr_name]}")
                layout[attr_name] = attr_val
                owner[attr_name] = klass.__name__
        cls._layout = layout

    def __call__(cls, *args: Any, **kwargs: Any) -> Any:
        instance = super().__call__(*args, **kwargs)
        instance.columns = dict(cls._layout)
        return instance


@dataclass(frozen=True)
class Check:
    """One judged quantity: passes when the comparison against bound holds."""
    name: str
    lam: Optional[int]
    value: Any
    bound: Any
    passed: bool

    def as_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "lambda": self.lam, "value": _clean(self.value),
                "bound": _clean(self.bound), "pass": bool(self.passed)}


def _clean(v: Any) -> Any:
    """JSON-safe value: numpy scalars unwrapped, non-finite floats to None, arrays to lists."""
    if isinstance(v, (np.ndarray, list, tuple)):
        return [_clean(x) for x in np.asarray(v).ravel().tolist()]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else None
    return v


def _cell(v: Any) -> str:
    """CSV text for one value; floats via repr to match the JSON output."""
    v = _clean(v)
    if v is None:
        return ""
    if isinstance(v, list):
        # space-joined, so the cell stays one CSV field
        return " ".join(_cell(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Report(metaclass=_ReportMeta):
    """
    Base class for command reports.

    Lifecycle (called by the command layer):
        add_row(**values)                       -- for each table row
        check(name, lam, value, bound, passed)  -- for each judged quantity
        exit_code()                             -- 0 if every check passed, else 1

    Every row carries the declared columns; missing values stay empty.
    """

    columns: Dict[str, Column]

    lam = Column("cutoff")
    k = Column("deformation parameter")

    def __init__(self, command: str, cfg: RunConfig):
        self.command = command
        self.cfg = cfg
        self.rows: List[Dict[str, Any]] = []
        self.results: List[Check] = []

    def add_row(self, **values: Any) -> None:
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"{type(self).__name__} has no column(s) {sorted(unknown)}")
        self.rows.append({name: values.get(name) for name in self.columns})

    def check(self, name: str, lam: Optional[int], value: Any, bound: Any, passed: bool) -> Check:
        c = Check(name, lam, value, bound, bool(passed))
        self.results.append(c)
        return c

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.results if not c.passed]

    def exit_code(self) -> int:
        return 0 if not self.failures else 1

    def meta(self) -> Dict[str, Any]:
        cfg = self.cfg
        return {
            "command": self.command,
            "space": cfg.space.value,
            "lambda": [cfg.lambda_min, cfg.lambda_max],
            "k": {str(lam): cfg.k_for(lam) for lam in cfg.lambdas()},
            "k_policy": cfg.k_policy.value,
            "tol": cfg.tol,
            "seed": cfg.seed,
            "versions": {
                "fuzzy_workbench": __version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
        }


# ---------------------------------------------------------------------------
# Command reports
# ---------------------------------------------------------------------------

class VerifyReport(Report):
    suite = Column("which family of relations")
    relation = Column()
    residual = Column()
    tol = Column()
    ok = Column()


class LocalizationReport(Report):
    # sphere: dispersions, then bounds, then the strict comparisons
    madore_min = Column("smallest Madore dispersion 1/(L+1)")
    phi_scs_disp = Column()
    chi_tilde_disp = Column()
    omega_scs_disp = Column()
    phi_scs_bound = Column()
    omega_scs_bound = Column()
    chi_intermediate_bound = Column()
    chi_pi_bound = Column()
    coarse_bound = Column("11/(L+1)^2")
    phi_below_madore = Column()
    chi_below_intermediate = Column()
    chi_below_madore = Column()
    chi_below_pi_bound = Column("empty below L = 3")
    # circle
    scs_disp = Column()
    scs_bound = Column()
    toeplitz_disp = Column()
    toeplitz_bound = Column()
    toeplitz_below_bound = Column()
    lambda1_min = Column("(Dx)^2 of the exact minimizer at L = 1")


class ResolutionTable(Report):
    family = Column()
    nodes = Column("node counts, 'x'-joined")
    residual = Column()
    measured_constant = Column()
    expected_constant = Column()
    norm_condition = Column()
    under_resolved = Column()
    profile = Column("diagonal weight per block, 1 where the norm condition holds")


class SpectrumTable(Report):
    kind = Column("x1 | a_mu | bm | chain")
    m = Column()
    top = Column("largest eigenvalue")
    z_re = Column()
    z_im = Column()
    residual = Column()
    symmetric = Column()
    simple = Column()
    interlaces_previous = Column()
    extra = Column("kind-specific figure: Toeplitz gap, saturation slack or B_0 max gap")


class UrAuditReport(Report):
    inequality = Column()
    min_slack = Column()
    samples = Column()
    ok = Column()


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def to_json(report: Report) -> str:
    doc = {
        "meta": report.meta(),
        "results": [c.as_dict() for c in report.results],
        "rows": [{("lambda" if n == "lam" else n): _clean(v) for n, v in row.items()} for row in report.rows],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def to_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda" if n == "lam" else n for n in report.columns])
    for row in report.rows:
        w.writerow([_cell(row[n]) for n in report.columns])
    return buf.getvalue()


def render(report: Report, fmt: OutputFormat) -> str:
    return to_json(report) if fmt is OutputFormat.JSON else to_csv(report)


def write_atomic(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".fuzzy-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_report(report: Report, path: Optional[str], fmt: OutputFormat) -> Optional[str]:
    """Write to *path*, or return the text when no path is given."""
    text = render(report, fmt)
    if path is None:
        return text
    write_atomic(path, text)
    return None
