"""The two tuned rule bases: A for handwritten cursive, B for machine print.

Only the interval over which each set is nonzero is published, so the
trapezoids are rebuilt from four numbers per variable: where Low ends,
where Medium starts and ends, and where High starts. Low ramps down over
[Medium start, Low end], Medium ramps up over the same span and down over
[High start, Medium end], and High ramps up over that last span.
"""

from __future__ import annotations

from fuzzcut.fis import Clause, FuzzySystemConfig, LinguisticVariable, Rule, TrapezoidSet


def variable_from_intervals(name: str, low_end: float, med_start: float, med_end: float, high_start: float):
    return LinguisticVariable(
        name,
        (
            TrapezoidSet("Low", 0.0, 0.0, med_start, low_end),
            TrapezoidSet("Medium", med_start, low_end, high_start, med_end),
            TrapezoidSet("High", high_start, med_end, 1.0, 1.0),
        ),
    )


def rule(antecedents: dict[str, str], consequent: str) -> Rule:
    clauses = []
    for var, text in antecedents.items():
        neg = text.startswith("not ")
        clauses.append(Clause(var, text[4:] if neg else text, neg))
    return Rule(tuple(clauses), consequent)


_B_VARIABLES = (
    variable_from_intervals("fbar", 0.35, 0.15, 0.75, 0.5),
    variable_from_intervals("gbar", 0.4, 0.2, 0.5, 0.45),
    variable_from_intervals("hbar", 0.4, 0.1, 0.75, 0.5),
    variable_from_intervals("rho", 0.5, 0.4, 0.6, 0.5),
)

_B_RULES = (
    rule({"fbar": "Low", "hbar": "Low"}, "Low"),
    rule({"fbar": "Low", "gbar": "not High", "hbar": "not Low"}, "Low"),
    rule({"fbar": "Low", "gbar": "High", "hbar": "Medium"}, "Medium"),
    rule({"fbar": "Medium", "hbar": "not High"}, "Medium"),
    rule({"fbar": "Medium", "gbar": "Low", "hbar": "High"}, "Medium"),
    rule({"fbar": "High", "gbar": "not High", "hbar": "Low"}, "Medium"),
    rule({"fbar": "High", "gbar": "Low", "hbar": "Medium"}, "Medium"),
    rule({"fbar": "Low", "gbar": "High", "hbar": "High"}, "High"),
    rule({"fbar": "not Low", "gbar": "not Low", "hbar": "not Low"}, "High"),
    rule({"fbar": "High", "gbar": "High"}, "High"),
)

_A_VARIABLES = (
    variable_from_intervals("fbar", 0.45, 0.25, 0.55, 0.5),
    variable_from_intervals("gbar", 0.2, 0.15, 0.55, 0.25),
    variable_from_intervals("hbar", 0.3, 0.15, 0.65, 0.5),
    variable_from_intervals("rho", 0.4, 0.2, 0.65, 0.4),
)

_A_RULES = (
    rule({"fbar": "not High", "gbar": "not High", "hbar": "Low"}, "Low"),
    rule({"fbar": "Low", "gbar": "Low", "hbar": "Medium"}, "Low"),
    rule({"fbar": "Low", "gbar": "High"}, "Medium"),
    rule({"gbar": "Medium", "hbar": "Medium"}, "Medium"),
    rule({"fbar": "High", "gbar": "Low"}, "Medium"),
    rule({"fbar": "Medium", "gbar": "Low", "hbar": "Medium"}, "Medium"),
    rule({"fbar": "High", "gbar": "Medium", "hbar": "Low"}, "Medium"),
    rule({"fbar": "Medium", "gbar": "High"}, "High"),
    rule({"fbar": "High", "gbar": "High"}, "High"),
    rule({"fbar": "High", "gbar": "Medium", "hbar": "High"}, "High"),
)

PROFILES = {
    "A": FuzzySystemConfig(_A_VARIABLES, _A_RULES, name="A"),
    "B": FuzzySystemConfig(_B_VARIABLES, _B_RULES, name="B"),
}


def builtin_profile(which: str) -> FuzzySystemConfig:
    try:
        return PROFILES[which.upper()]
    except KeyError:
        raise ValueError(f"unknown profile {which!r}, expected 'A' or 'B'") from None
