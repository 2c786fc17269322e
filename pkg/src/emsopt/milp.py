"""Explicit mixed-binary programs for both models, with LP-format export.

The solver in :mod:`emsopt.solver` never touches these; the point of this
module is cross-checking. A deployment plus its greedy coverage decision
can be substituted into the program row by row, and the exported ``.lp``
text can be fed to any off-the-shelf MILP solver to confirm optima.

Variables are named ``x1_i``, ``x2_i`` and ``y_j_k`` with 1-based indices.
Rows are named after the constraint family they implement:

=======  ====================================================
``c2_i``   absolute coverage of point i within r2
``c3`` / ``c12``  proportional coverage of total demand within r1
``c4_i``   coverage counts dominate x1 + x2
``c5_i``   double coverage implies single coverage
``c6_k``   ambulance k sits at exactly one station
``c7_j``   capacity of station j
=======  ====================================================
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

from .coverage import CoverageMatrices
from .evaluation import ModelKind, greedy_coverage_decision, objective_weights
from .instance import Deployment, Instance, PenaltyMatrix

__all__ = [
    "Variable",
    "Constraint",
    "LinearProgram",
    "build_milp",
    "deployment_assignment",
    "lp_text",
    "export_lp",
]

_SENSES = (">=", "<=", "=")


@dataclass(frozen=True)
class Variable:
    name: str
    objective: float
    kind: str = "binary"


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[float, str], ...]  # (coefficient, variable name)
    sense: str
    rhs: float


@dataclass(frozen=True)
class LinearProgram:
    name: str
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    sense: str = "maximize"

    def __post_init__(self):
        declared = {v.name for v in self.variables}
        if len(declared) != len(self.variables):
            raise ValueError("variable names must be unique")
        names = {c.name for c in self.constraints}
        if len(names) != len(self.constraints):
            raise ValueError("constraint names must be unique")
        for c in self.constraints:
            if c.sense not in _SENSES:
                raise ValueError(f"constraint {c.name}: unknown sense {c.sense!r}")
            for _, var in c.terms:
                if var not in declared:
                    raise ValueError(
                        f"constraint {c.name} references undeclared variable {var}"
                    )

    def objective_value(self, values: dict[str, float]) -> float:
        return float(sum(v.objective * values[v.name] for v in self.variables))

    def violated_rows(self, values: dict[str, float], tol: float = 1e-9) -> list[str]:
        """Names of rows the given assignment violates.

        The slack allowed per row is ``tol * max(1, |rhs|)``, matching the
        tolerance the deployment evaluator applies to the proportional
        constraint.
        """
        bad = []
        for c in self.constraints:
            lhs = sum(coef * values[var] for coef, var in c.terms)
            slack = tol * max(1.0, abs(c.rhs))
            if c.sense == ">=":
                ok = lhs >= c.rhs - slack
            elif c.sense == "<=":
                ok = lhs <= c.rhs + slack
            else:
                ok = abs(lhs - c.rhs) <= slack
            if not ok:
                bad.append(c.name)
        return bad


def build_milp(
    instance: Instance,
    cov: CoverageMatrices,
    penalties: PenaltyMatrix,
    kind: ModelKind,
) -> LinearProgram:
    """Materialize the chosen model as an explicit binary program.

    Produces ``2n + m*|K|`` binary variables and ``3n + |K| + m + 1`` rows,
    with objective coefficients taken verbatim from the model kind.
    """
    n, m, fleet = instance.n, instance.m, instance.fleet_size
    w1, w2, _ = objective_weights(instance, kind)
    M = penalties.values

    variables: list[Variable] = []
    variables.extend(Variable(f"x1_{i + 1}", float(w1[i])) for i in range(n))
    variables.extend(Variable(f"x2_{i + 1}", float(w2[i])) for i in range(n))
    for j in range(m):
        variables.extend(
            Variable(f"y_{j + 1}_{k + 1}", -float(M[j, k])) for k in range(fleet)
        )

    def y_terms(row_mask, coef=1.0):
        terms = []
        for j in np.flatnonzero(row_mask):
            terms.extend((coef, f"y_{j + 1}_{k + 1}") for k in range(fleet))
        return terms

    constraints: list[Constraint] = []
    for i in range(n):
        constraints.append(
            Constraint(f"c2_{i + 1}", tuple(y_terms(cov.delta[i])), ">=", 1.0)
        )

    _, _, wp = objective_weights(instance, kind)
    prop_terms = tuple(
        (float(wp[i]), f"x1_{i + 1}") for i in range(n) if wp[i] != 0.0
    )
    prop_name = f"c{kind.proportional_constraint_id}"
    constraints.append(
        Constraint(prop_name, prop_terms, ">=", float(instance.alpha * wp.sum()))
    )

    for i in range(n):
        terms = ((-1.0, f"x1_{i + 1}"), (-1.0, f"x2_{i + 1}"), *y_terms(cov.gamma[i]))
        constraints.append(Constraint(f"c4_{i + 1}", terms, ">=", 0.0))
    for i in range(n):
        constraints.append(
            Constraint(
                f"c5_{i + 1}",
                ((1.0, f"x1_{i + 1}"), (-1.0, f"x2_{i + 1}")),
                ">=",
                0.0,
            )
        )
    for k in range(fleet):
        terms = tuple((1.0, f"y_{j + 1}_{k + 1}") for j in range(m))
        constraints.append(Constraint(f"c6_{k + 1}", terms, "=", 1.0))
    for j in range(m):
        terms = tuple((1.0, f"y_{j + 1}_{k + 1}") for k in range(fleet))
        constraints.append(
            Constraint(f"c7_{j + 1}", terms, "<=", float(instance.capacities[j]))
        )

    return LinearProgram(
        name=kind.value.lower(), variables=tuple(variables), constraints=tuple(constraints)
    )


def deployment_assignment(
    instance: Instance, cov: CoverageMatrices, deployment: Deployment
) -> dict[str, float]:
    """Variable values encoding a deployment plus its greedy coverage.

    Substituting this assignment into the program built for the same
    instance reproduces the closed-form evaluation.
    """
    from .coverage import coverage_counts

    n, m, fleet = instance.n, instance.m, instance.fleet_size
    c1, _ = coverage_counts(cov, deployment)
    x1, x2 = greedy_coverage_decision(c1)
    values = {f"x1_{i + 1}": float(x1[i]) for i in range(n)}
    values.update({f"x2_{i + 1}": float(x2[i]) for i in range(n)})
    for j in range(m):
        for k in range(fleet):
            values[f"y_{j + 1}_{k + 1}"] = 1.0 if deployment.station_of[k] == j else 0.0
    return values


def _fmt_num(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _expr(terms, fallback_var: str) -> list[str]:
    """Render linear terms as LP-format tokens, one ``+/- coef var`` each."""
    pieces = []
    for coef, var in terms:
        if coef == 0.0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1.0 else f"{_fmt_num(mag)} {var}"
        pieces.append((sign, body))
    if not pieces:
        # Degenerate row/objective: keep the file parseable with a 0 term.
        return [f"0 {fallback_var}"]
    first_sign, first_body = pieces[0]
    rendered = [first_body if first_sign == "+" else f"- {first_body}"]
    rendered.extend(f"{sign} {body}" for sign, body in pieces[1:])
    return rendered


def _wrap(prefix: str, tokens: list[str], suffix: str = "", width: int = 72) -> list[str]:
    lines = []
    current = prefix
    for tok in tokens:
        candidate = f"{current} {tok}" if current else f" {tok}"
        if len(candidate) > width and current not in ("", prefix):
            lines.append(current)
            current = f" {tok}"
        else:
            current = candidate
    if suffix:
        current = f"{current} {suffix}"
    lines.append(current)
    return lines


def lp_text(lp: LinearProgram) -> str:
    """Deterministic LP-format rendering of a program."""
    fallback = lp.variables[0].name if lp.variables else "x"
    out = io.StringIO()
    out.write("\\ " + lp.name + "\n")
    out.write("Maximize\n")
    obj_terms = [(v.objective, v.name) for v in lp.variables if v.objective != 0.0]
    for line in _wrap(" obj:", _expr(obj_terms, fallback)):
        out.write(line + "\n")
    out.write("Subject To\n")
    for c in lp.constraints:
        suffix = f"{c.sense} {_fmt_num(c.rhs)}"
        for line in _wrap(f" {c.name}:", _expr(c.terms, fallback), suffix):
            out.write(line + "\n")
    out.write("Binary\n")
    for v in lp.variables:
        out.write(f" {v.name}\n")
    out.write("End\n")
    return out.getvalue()


def export_lp(lp: LinearProgram, destination) -> str:
    """Write the LP text to a path or file object; returns the text.

    Exporting the same program twice yields byte-identical output.
    """
    text = lp_text(lp)
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
