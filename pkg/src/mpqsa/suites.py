"""Verification suites shared by the command line and the acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .cartan import CartanError, CartanSuperDatum, MultiparamMatrix, build_datum, check_cartan_type, generic_matrix, standard_matrix
from .deform_data import (
    DeformError,
    NotAltS,
    NotAntisymmetric,
    admissible_cocycle,
    cocycle_deform,
    solve_cocycle,
    solve_twist,
    symbolic_antisymmetric,
    twist_deform,
)
from .hopf import HopfStructure, cocycle_transport, twist_transport, verify_hopf
from .lie_semiclassical import (
    MpLSbAData,
    cocycle_bracket,
    commute_check,
    lie_checks,
    semiclassical_limit,
    tables_equal,
    twist_cobracket,
)
from .polmp import poly_suite
from .realization import (
    RankTooSmall,
    Realization,
    build_realization,
    classify,
    lift,
    morphism_kernel,
    quotient_by_central,
)
from .reporting import FAIL, INCONCLUSIVE, Report
from .superalg_engine import QuantumAlgebra

__all__ = [
    "CATALOGUE",
    "SUITES",
    "ConfigError",
    "SuiteConfig",
    "SuiteReport",
    "matrix_suite",
    "realization_suite",
    "run_suite",
]

# (label, type tag, rank, epsilon choice)
CATALOGUE = (
    ("A2", "A", 2, None),
    ("A3", "A", 3, "+-+"),
    ("B2(I)", "B1", 2, None),
    ("B3(II)", "B2", 3, None),
    ("C3", "C", 3, "+-+"),
    ("D4(I)", "D1", 4, None),
    ("D4(II)", "D2", 4, None),
    ("F4", "F4", None, None),
    ("G3", "G3", None, None),
)

SUITES = ("matrix", "realization", "hopf", "twist", "cocycle", "lie", "commute", "poly")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    type_tag: str
    rank: int | None = None
    epsilon: str | None = None
    seed: int = 0
    specializations: int = 3
    degree_bound: int | None = None
    variant: str = "covariant"

    @classmethod
    def make(cls, data: dict | None) -> "SuiteConfig":
        if not data or not data.get("type"):
            raise ConfigError("a configuration needs at least a type")
        try:
            return cls(
                str(data["type"]),
                None if data.get("rank") is None else int(data["rank"]),
                data.get("epsilon"),
                int(data.get("seed", 0)),
                int(data.get("specializations", 3)),
                None if data.get("degree_bound") is None else int(data["degree_bound"]),
                str(data.get("variant", "covariant")),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc

    def datum(self) -> CartanSuperDatum:
        try:
            return build_datum(self.type_tag, self.rank, self.epsilon)
        except CartanError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class SuiteReport:
    suite: str
    datum: dict
    seed: int
    degree_bound: int | None
    specializations: int
    checks: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def inconclusive(self) -> list:
        return [c for c in self.checks if c.status == INCONCLUSIVE]

    @property
    def exit_code(self) -> int:
        if self.failures:
            return 1
        if self.inconclusive:
            return 3
        return 0

    def to_json(self, timing: bool = False) -> dict:
        return {
            "suite": self.suite,
            "datum": self.datum,
            "seed": self.seed,
            "degree_bound": self.degree_bound,
            "specializations": self.specializations,
            "summary": {
                "checks": len(self.checks),
                "failed": len(self.failures),
                "inconclusive": len(self.inconclusive),
            },
            "checks": [c.to_json(timing) for c in self.checks],
        }

    def to_text(self) -> str:
        lines = [f"suite {self.suite} on {self.datum['type']} rank {self.datum['rank']}: "
                 f"{len(self.checks)} checks, {len(self.failures)} failed, {len(self.inconclusive)} inconclusive"]
        for c in self.checks:
            line = f"  {c.status:12s} {c.name}"
            if c.residue:
                line += f"  residue: {c.residue}"
            lines.append(line)
        return "\n".join(lines)


# realizations used by the suites


def split_rank(P: MultiparamMatrix) -> int:
    n = P.n
    return max(2 * n, 3 * n - linalg.rank(linalg.mod_atoms(P.symmetric_part.rows())))


def default_realization(datum: CartanSuperDatum, P=None) -> tuple:
    P = P or generic_matrix(datum)
    return P, build_realization(P, datum, "straight_split", split_rank(P))


def cocycle_setting(datum: CartanSuperDatum) -> tuple:
    P = generic_matrix(datum)
    R = build_realization(P, datum, "split_minimal", 2 * datum.rank)
    return P, R


# matrix calculus


def _same_realization(a: Realization, b: Realization) -> bool:
    return all(linalg.equal(x, y) for x, y in (
        (a.root_rows(), b.root_rows()),
        (a.plus_rows(), b.plus_rows()),
        (a.minus_rows(), b.minus_rows()),
    ))


def matrix_suite(datum: CartanSuperDatum) -> Report:
    """Symmetric parts, additivity and solver round trips for twists and cocycles."""
    report = Report("matrix")
    P, R = default_realization(datum)
    t = R.rank
    phi = symbolic_antisymmetric(t, "f")
    phi2 = symbolic_antisymmetric(t, "g")
    with report.timed("cartan_type") as rec:
        rec(check_cartan_type(P, datum))
    with report.timed("twist_zero") as rec:
        P0, R0 = twist_deform(P, R, linalg.zeros(t, t))
        rec(P0 == P and _same_realization(R0, R))
    P_phi, R_phi = twist_deform(P, R, phi)
    with report.timed("twist_symmetric_part") as rec:
        rec(P_phi.symmetric_part == P.symmetric_part, P_phi.symmetric_part.rows())
    with report.timed("twist_realizes") as rec:
        rec(R_phi.realizes(P_phi))
    with report.timed("twist_additivity") as rec:
        P_a, R_a = twist_deform(P_phi, R_phi, phi2)
        P_b, R_b = twist_deform(P, R, linalg.add(phi, phi2))
        rec(P_a == P_b and _same_realization(R_a, R_b))
    with report.timed("twist_solver_roundtrip") as rec:
        sol = solve_twist(P, P_phi, R)
        rec(twist_deform(P, R, sol)[0] == P_phi)
    with report.timed("twist_rejects_non_antisymmetric") as rec:
        bad = linalg.zeros(t, t)
        bad[0][0] = linalg.ep(1)
        try:
            twist_deform(P, R, bad)
            rec(False, "accepted a non-antisymmetric twist")
        except NotAntisymmetric:
            rec(True)
    Pc, Rc = cocycle_setting(datum)
    chi = admissible_cocycle(Rc, "x")
    with report.timed("cocycle_admissible") as rec:
        rec(chi.is_alt_s(Rc))
    P_chi, R_chi = cocycle_deform(Pc, Rc, chi)
    with report.timed("cocycle_symmetric_part") as rec:
        rec(P_chi.symmetric_part == Pc.symmetric_part, P_chi.symmetric_part.rows())
    with report.timed("cocycle_realizes") as rec:
        rec(R_chi.realizes(P_chi))
    with report.timed("cocycle_additivity") as rec:
        chi2 = admissible_cocycle(R_chi, "y")
        P_a, R_a = cocycle_deform(P_chi, R_chi, chi2)
        P_b, R_b = cocycle_deform(Pc, Rc, chi + chi2)
        rec(P_a == P_b and _same_realization(R_a, R_b))
    with report.timed("cocycle_solver_roundtrip") as rec:
        sol = solve_cocycle(Pc, P_chi, Rc)
        rec(cocycle_deform(Pc, Rc, sol)[0] == P_chi)
    with report.timed("cocycle_rejects_non_alt_s") as rec:
        bad = linalg.zeros(2 * datum.rank, 2 * datum.rank)
        bad[0][datum.rank], bad[datum.rank][0] = linalg.ep(1), linalg.ep(-1)
        try:
            cocycle_deform(Pc, Rc, bad)
            rec(False, "accepted a cocycle that does not kill the S_i")
        except NotAltS:
            rec(True)
    return report


# realizations


def _nonstraight_witness() -> tuple:
    """P = DA for a datum with singular DA, realized on t = n with both coroot sets the identity."""
    d = build_datum("A", 3, "+--+")
    P = standard_matrix(d)
    n = d.rank
    R = Realization.make(P.rows(), linalg.identity(n), linalg.identity(n))
    return d, P, R


def _kernel_kills_roots(phi) -> bool:
    basis = morphism_kernel(phi)
    for v in basis:
        for row in phi.source.root:
            if sum((x * c for x, c in zip(row, v)), linalg.ep(0)):
                return False
    return True


def realization_suite(datum: CartanSuperDatum) -> Report:
    report = Report("realization")
    P = generic_matrix(datum)
    Ps_rank = linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    n = datum.rank
    t_split = 3 * n - Ps_rank
    with report.timed(f"straight_split[t={t_split}]") as rec:
        R = build_realization(P, datum, "straight_split", t_split)
        R.validate(P)
        flags = classify(R)
        rec({"straight", "split"} <= flags, sorted(flags))
    with report.timed("straight_split_rank_too_small") as rec:
        try:
            build_realization(P, datum, "straight_split", t_split - 1)
            rec(False, "no error")
        except RankTooSmall:
            rec(True)
    Pd = standard_matrix(datum)
    t_small = 2 * n - linalg.rank(linalg.mod_atoms(Pd.symmetric_part.rows()))
    with report.timed(f"straight_small[t={t_small}]") as rec:
        Rs = build_realization(Pd, datum, "straight_small", t_small)
        Rs.validate(Pd)
        flags = classify(Rs)
        span_equal = linalg.rank(linalg.mod_atoms(Rs.plus_rows() + Rs.minus_rows())) == linalg.rank(linalg.mod_atoms(Rs.s_rows()))
        rec({"straight", "small"} <= flags and span_equal, sorted(flags))
    with report.timed("split_minimal") as rec:
        Rm = build_realization(P, datum, "split_minimal", 2 * n)
        flags = classify(Rm)
        rec({"split", "minimal"} <= flags and Rm.realizes(P), sorted(flags))
    with report.timed("lift_split_of_small") as rec:
        Rs = build_realization(Pd, datum, "straight_small", t_small)
        lifted, pi = lift(Rs, "split")
        before, after = classify(Rs), classify(lifted)
        ok = "split" in after and ("straight" in before) <= ("straight" in after) and pi.is_valid() and lifted.realizes(Pd)
        rec(ok, f"{sorted(before)} -> {sorted(after)}")
    with report.timed("lift_split_kernel_kills_roots") as rec:
        lifted, pi = lift(Rs, "split")
        rec(_kernel_kills_roots(pi))
    with report.timed("lift_split_idempotent") as rec:
        R = build_realization(P, datum, "straight_split", t_split)
        lifted, pi = lift(R, "split")
        again, _ = lift(lifted, "split")
        rec({"split", "straight"} <= classify(lifted) and {"split", "straight"} <= classify(again))
    with report.timed("lift_straight_of_nonstraight") as rec:
        _, Pw, Rw = _nonstraight_witness()
        lifted, incl = lift(Rw, "straight")
        ok = "straight" not in classify(Rw) and "straight" in classify(lifted) and lifted.realizes(Pw) and incl.is_valid()
        rec(ok, f"{sorted(classify(Rw))} -> {sorted(classify(lifted))}")
    with report.timed("lift_straight_kernel_zero") as rec:
        rec(morphism_kernel(incl) == [])
    with report.timed("lift_straight_stable") as rec:
        again, _ = lift(lifted, "straight")
        rec(_same_realization(again, lifted))
    with report.timed("central_quotient_kernel") as rec:
        R = build_realization(P, datum, "straight_split", t_split + 1)
        central = [g for g in range(R.rank) if not any(row[g] for rows in (R.root_rows(), R.plus_rows(), R.minus_rows()) for row in rows)]
        target, pi = quotient_by_central(R, central[:1])
        basis = morphism_kernel(pi)
        rec(len(basis) == 1 and _kernel_kills_roots(pi), basis)
    return report


# remaining suites


def hopf_suite(datum: CartanSuperDatum, cfg: SuiteConfig) -> Report:
    P, R = default_realization(datum)
    return verify_hopf(datum, P, R, cfg.degree_bound, cfg.specializations, cfg.seed, variant=cfg.variant)


def twist_suite(datum: CartanSuperDatum, cfg: SuiteConfig) -> Report:
    P, R = default_realization(datum)
    return twist_transport(symbolic_antisymmetric(R.rank, "f"), datum, P, R, variant=cfg.variant)


def cocycle_suite(datum: CartanSuperDatum, cfg: SuiteConfig) -> Report:
    P = standard_matrix(datum)
    R = build_realization(P, datum, "split_minimal", 2 * datum.rank)
    return cocycle_transport(admissible_cocycle(R), datum, P, R, variant=cfg.variant)


def lie_suite(datum: CartanSuperDatum, cfg: SuiteConfig) -> Report:
    P, R = default_realization(datum)
    data = MpLSbAData(datum, P, R)
    report = lie_checks(data)
    twisted = twist_cobracket(symbolic_antisymmetric(R.rank, "th"), data, report)
    lie_checks(twisted, report, "twisted_")
    Pc, Rc = cocycle_setting(datum)
    base = MpLSbAData(datum, Pc, Rc)
    gamma = admissible_cocycle(Rc, "ga")
    deformed = cocycle_bracket(gamma, base)
    with report.timed("cocycle_bracket_table") as rec:
        P2, R2 = cocycle_deform(Pc, Rc, gamma)
        rec(*tables_equal(deformed, MpLSbAData(datum, P2, R2), "bracket"))
    semiclassical_limit(HopfStructure(QuantumAlgebra(datum, P, R)), report=report, prefix="jet_")
    return report


def _mixed_twist(t: int) -> list:
    const = [[Fraction(g - k, 3) for k in range(t)] for g in range(t)]
    return linalg.add(linalg.to_poly_matrix(const), symbolic_antisymmetric(t, "f"))


def commute_suite(datum: CartanSuperDatum, cfg: SuiteConfig) -> Report:
    report = Report("commute")
    P, R = default_realization(datum)
    Pc = standard_matrix(datum)
    Rc = build_realization(Pc, datum, "split_minimal", 2 * datum.rank)
    chi = admissible_cocycle(Rc)
    for kill in (False, True):
        tag = "kill_atoms" if kill else "keep_atoms"
        report.extend(commute_check("twist", _mixed_twist(R.rank), datum, P, R, kill_atoms=kill), f"twist[{tag}]:")
        report.extend(commute_check("cocycle", chi, datum, Pc, Rc, kill_atoms=kill), f"cocycle[{tag}]:")
    return report


def _poly(datum: CartanSuperDatum, cfg: SuiteConfig) -> Report:
    return poly_suite(datum, cfg.seed)


_RUNNERS = {
    "matrix": lambda d, c: matrix_suite(d),
    "realization": lambda d, c: realization_suite(d),
    "hopf": hopf_suite,
    "twist": twist_suite,
    "cocycle": cocycle_suite,
    "lie": lie_suite,
    "commute": commute_suite,
    "poly": _poly,
}


def run_suite(suite: str, config) -> SuiteReport:
    """Run one suite (or ``all``) and return checks sorted by name."""
    cfg = config if isinstance(config, SuiteConfig) else SuiteConfig.make(config)
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in _RUNNERS:
            raise ConfigError(f"unknown suite {suite!r}")
    datum = cfg.datum()
    checks = []
    for name in names:
        start = time.perf_counter()
        try:
            rep = _RUNNERS[name](datum, cfg)
        except (DeformError, ValueError) as exc:
            rep = Report(name)
            rep.add(f"{name}_setup", False, f"{type(exc).__name__}: {exc}", wall_time=time.perf_counter() - start)
        prefix = f"{name}/" if suite == "all" else ""
        for c in rep.checks:
            c.name = prefix + c.name
            checks.append(c)
    checks.sort(key=lambda c: c.name)
    return SuiteReport(suite, datum.to_json(), cfg.seed, cfg.degree_bound, cfg.specializations, checks)
