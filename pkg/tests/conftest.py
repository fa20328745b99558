from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mpqsa.cartan import build_datum
from mpqsa.scalars import ExponentPoly, ToralScalar

settings.register_profile("mpqsa", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("mpqsa")

# label, type tag, rank, epsilon choice
CATALOGUE = [
    ("A2", "A", 2, None),
    ("A3", "A", 3, "+-+"),
    ("B2(I)", "B1", 2, None),
    ("B3(II)", "B2", 3, None),
    ("C3", "C", 3, "+-+"),
    ("D4(I)", "D1", 4, None),
    ("D4(II)", "D2", 4, None),
    ("F4", "F4", None, None),
    ("G3", "G3", None, None),
]


def catalogue_ids() -> list:
    return [c[0] for c in CATALOGUE]


@pytest.fixture(params=CATALOGUE, ids=catalogue_ids())
def datum(request):
    _, tag, n, eps = request.param
    return build_datum(tag, n, eps)


def datum_of(label: str):
    for lab, tag, n, eps in CATALOGUE:
        if lab == label:
            return build_datum(tag, n, eps)
    raise KeyError(label)


# numeric oracle: evaluate q-scalars at q = exp(h) with atoms bound to rationals


def eval_exp(x: ExponentPoly, env: dict) -> float:
    total = 0.0
    for mono, c in x.terms.items():
        v = float(c)
        for a, p in mono:
            v *= float(env[a]) ** p
        total += v
    return total


def eval_scalar(s: ToralScalar, h: float, env: dict | None = None) -> float:
    env = env or {}
    num = sum(eval_exp(c, env) * math.exp(h * eval_exp(x, env)) for x, c in s.num.items())
    den = sum(float(c) * math.exp(h * float(e)) for e, c in s.den.items())
    return num / den


def close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# hypothesis strategies

ATOMS = ("a", "b")
small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def exponent_polys(draw, atoms=ATOMS, max_terms: int = 3):
    out = ExponentPoly.const(draw(small_fractions))
    for _ in range(draw(st.integers(0, max_terms))):
        a = draw(st.sampled_from(atoms))
        out = out + ExponentPoly.atom(a) * draw(st.integers(-2, 2))
    return out


@st.composite
def laurent_scalars(draw, max_terms: int = 3):
    """Sums of c q^e with rational c and e."""
    out = ToralScalar.zero()
    for _ in range(draw(st.integers(1, max_terms))):
        out = out + ToralScalar.qpow(ExponentPoly.const(draw(st.integers(-3, 3)) * Fraction(1, 2)), draw(st.integers(-3, 3)))
    return out


@st.composite
def toral_scalars(draw, max_terms: int = 3, fractions_allowed: bool = True):
    out = ToralScalar.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        x = draw(exponent_polys())
        c = ExponentPoly.const(draw(st.integers(-3, 3))) + ExponentPoly.atom(draw(st.sampled_from(ATOMS))) * draw(st.integers(0, 1))
        out = out + ToralScalar.qpow(x, c)
    if fractions_allowed and draw(st.booleans()):
        den = draw(laurent_scalars())
        if den:
            out = out / den
    return out


env_values = st.fixed_dictionaries({a: st.fractions(min_value=-2, max_value=2, max_denominator=3) for a in ATOMS})


# one line per acceptance criterion, printed at the end of the run

ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
