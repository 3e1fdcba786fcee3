"""Cost tables: equilibrium vs uniform critical vaccination across population structures."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .builders import AgeContactData, ActivityStructure, activity_structured, age_activity, age_structured, homogeneous
from .equilibrium import maximal_equilibrium
from .errors import MissingDataError
from .model import SISModel
from .strategies import calibrate_to_R0, cost, uniform_critical

R0_VALUES = (2.0, 2.5, 3.0)
TABLE2_R0 = 2.0


def pct(x: float) -> str:
    """Percentage with one decimal, rounded half-up, independent of locale."""
    d = Decimal(repr(float(x))) * 100
    return str(d.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass
class Table1:
    rows: list[dict] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)

    def cell(self, structure: str, r0: float) -> dict:
        for r in self.rows:
            if r["structure"] == structure and r["r0"] == r0:
                return r
        raise KeyError((structure, r0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["structure", "r0", "cost_equi_pct", "cost_uni_pct"])
        for r in self.rows:
            w.writerow([r["structure"], f"{r['r0']:g}", pct(r["cost_equi"]), pct(r["cost_uni"])])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [
            {**r, "cost_equi_pct": pct(r["cost_equi"]), "cost_uni_pct": pct(r["cost_uni"])}
            for r in self.rows
        ]
        return json.dumps({"rows": rows, "notices": self.notices}, indent=2)


def _costs(m: SISModel) -> tuple[float, float]:
    g = maximal_equilibrium(m).g
    return cost(m, 1.0 - g), cost(m, uniform_critical(m))


def run_table1(contact_data: AgeContactData | None = None, *, reciprocity_fix: bool = False) -> Table1:
    """Rows Homogeneous / Age / Activity / Age+Activity at R0 = 2, 2.5, 3."""
    bases: list[tuple[str, SISModel | None]] = [
        ("Homogeneous", homogeneous(1.0, 1.0)),
        ("Age", age_structured(contact_data, reciprocity_fix=reciprocity_fix) if contact_data else None),
        ("Activity", activity_structured(ActivityStructure())),
        (
            "Age+Activity",
            age_activity(contact_data, ActivityStructure(), reciprocity_fix=reciprocity_fix) if contact_data else None,
        ),
    ]
    table = Table1()
    for name, base in bases:
        if base is None:
            table.notices.append(f"{name} rows skipped: no contact data supplied")
            continue
        for r0 in R0_VALUES:
            equi, uni = _costs(calibrate_to_R0(base, r0))
            table.rows.append({"structure": name, "r0": r0, "cost_equi": equi, "cost_uni": uni})
    return table


@dataclass
class Table2:
    age_labels: tuple[str, ...]
    level_names: tuple[str, ...]
    fractions: np.ndarray  # vaccinated fraction per (age, level)
    threshold: float

    @property
    def above_uniform(self) -> int:
        return int(np.sum(self.fractions > self.threshold))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["age_group", *self.level_names])
        for lab, row in zip(self.age_labels, self.fractions):
            w.writerow([lab, *(pct(x) for x in row)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "age_groups": list(self.age_labels),
                "levels": list(self.level_names),
                "pct": [[pct(x) for x in row] for row in self.fractions],
                "raw": self.fractions.tolist(),
                "uniform_threshold": self.threshold,
                "groups_above_uniform": self.above_uniform,
            },
            indent=2,
        )


def run_table2(contact_data: AgeContactData | None, *, reciprocity_fix: bool = False) -> Table2:
    """Vaccinated fraction per age x activity group under the equilibrium strategy at R0 = 2."""
    if contact_data is None:
        raise MissingDataError("table2 needs age contact data (--contacts)")
    act = ActivityStructure()
    m = calibrate_to_R0(age_activity(contact_data, act, reciprocity_fix=reciprocity_fix), TABLE2_R0)
    g = maximal_equilibrium(m).g
    frac = g.reshape(len(contact_data.group_labels), len(act.levels))
    return Table2(contact_data.group_labels, act.names, frac, 1.0 - 1.0 / TABLE2_R0)
