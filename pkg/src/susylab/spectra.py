"""Analytic energy spectra for broken and unbroken supersymmetry.

Unbroken energies are differences of the class function g along the
additive parameter chain a_n = a + n*hbar:

    E_n = g(a_n) - g(a_0)

with g per class: omega*a (IA), -alpha**2*a**2 (IB), -B**2/a**2 (IIA),
-B**2/a**2 - lam*a**2 (IIB), -2*eps*a (IIIA), -lam*a**2 (IIIB).

Broken energies exist only for the classes with a phase-changing discrete
map (IIIA and the broken-capable IIIB branches); they come from mapping to
the associated unbroken system and adding the constant shift, which closes
to

    IIIA:  E_n = (2a - hbar*(1 + 2n))*eps
    IIIB:  E_n = lam*(a**2 - (B + n*hbar + hbar/2)**2)
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import HierarchyError, PhaseError, UnsupportedClassError
from .invariance import (
    DiscreteMap,
    Phase,
    classify_phase,
    discrete_si_map,
    standard_orientation,
)
from .superpotentials import CLASS_IIIB, ClassTag, SuperpotentialInstance


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    value: float
    phase: Phase
    formula_id: str

    def as_dict(self) -> dict:
        return {"n": self.n, "E": self.value}


@dataclass(frozen=True)
class SpectrumResult:
    instance: str
    phase: Phase
    levels: tuple[EnergyLevel, ...]
    g_function: str
    hierarchy_condition_satisfied: bool

    def values(self) -> list[float]:
        return [lv.value for lv in self.levels]

    def as_dict(self) -> dict:
        return {
            "instance": self.instance,
            "phase": self.phase.value,
            "levels": [lv.as_dict() for lv in self.levels],
            "formula": self.levels[0].formula_id if self.levels else "",
            "g_function": self.g_function,
        }


# ---------------------------------------------------------------------------
# the class function g
# ---------------------------------------------------------------------------

def g_value(sp: SuperpotentialInstance, a: float) -> float:
    """g(a) for the instance's class; additive constants are fixed so only
    differences of g ever enter an energy."""
    p = sp.params
    tag = sp.tag
    if tag is ClassTag.IA:
        return p.omega * a
    if tag is ClassTag.IB:
        return -(p.alpha ** 2) * a * a
    if tag is ClassTag.IIA:
        return -(p.B ** 2) / (a * a)
    if tag is ClassTag.IIB:
        return -(p.B ** 2) / (a * a) - p.lam * a * a
    if tag is ClassTag.IIIA:
        return -2.0 * sp.epsilon * a
    return -p.lam * a * a


def g_description(sp: SuperpotentialInstance) -> str:
    return {
        ClassTag.IA: "g(a) = omega*a",
        ClassTag.IB: "g(a) = -alpha**2 * a**2",
        ClassTag.IIA: "g(a) = -B**2 / a**2",
        ClassTag.IIB: "g(a) = -B**2/a**2 - lambda*a**2",
        ClassTag.IIIA: "g(a) = -2*eps*a",
    }.get(sp.tag, "g(a) = -lambda * a**2")


# ---------------------------------------------------------------------------
# hierarchy conditions
# ---------------------------------------------------------------------------

def hierarchy_ok(sp: SuperpotentialInstance, n: int, phase: Phase) -> bool:
    """Whether level n sits in a strictly increasing chain E_0 < ... < E_n."""
    if n < 0:
        return False
    p = sp.params
    if phase is Phase.BROKEN:
        if sp.tag is ClassTag.IIIA:
            return True  # spacing -2*hbar*eps > 0 since eps < 0
        if sp.tag in CLASS_IIIB:
            aprime = p.B + p.hbar / 2.0
            return p.lam * aprime < 0 and p.lam * (aprime + n * p.hbar) < 0
        return False
    if n == 0:
        return True
    tag = sp.tag
    if tag is ClassTag.IA or tag is ClassTag.IIIA:
        return True
    # the conditions below are dE/dn > 0 evaluated at level n (the binding
    # constraint: each bracket worsens monotonically along the chain)
    if tag is ClassTag.IB:
        return p.a + n * p.hbar < 0
    if tag is ClassTag.IIA:
        return p.a > 0
    if tag is ClassTag.IIB:
        an = p.a + n * p.hbar
        return p.a > 0 and p.lam * an ** 4 < p.B ** 2
    # IIIB: lam*(a + k*hbar) < 0 along the chain; endpoints suffice
    return p.lam * p.a < 0 and p.lam * (p.a + n * p.hbar) < 0


def hierarchy_max_n(sp: SuperpotentialInstance, phase: Phase,
                    n_cap: int = 64) -> int:
    """Largest n (capped) with a valid hierarchy; -1 if even n=0 fails."""
    n = -1
    while n < n_cap and hierarchy_ok(sp, n + 1, phase):
        n += 1
    return n


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def _unbroken_closed_form(sp: SuperpotentialInstance, n: int) -> float:
    p = sp.params
    an = p.a + n * p.hbar
    tag = sp.tag
    if tag is ClassTag.IA:
        return n * p.omega * p.hbar
    if tag is ClassTag.IB:
        return (p.alpha ** 2) * (p.a ** 2 - an ** 2)
    if tag is ClassTag.IIA:
        return (p.B ** 2) * (1.0 / p.a ** 2 - 1.0 / an ** 2)
    if tag is ClassTag.IIB:
        return ((p.B ** 2) * (1.0 / p.a ** 2 - 1.0 / an ** 2)
                + p.lam * (p.a ** 2 - an ** 2))
    if tag is ClassTag.IIIA:
        return 2.0 * n * p.omega * p.hbar
    return p.lam * (p.a ** 2 - an ** 2) + 0.0  # +0.0 kills negative zero at n=0


def unbroken_energy(sp: SuperpotentialInstance, n: int) -> float:
    """E_n of the minus partner in the unbroken phase (E_0 = 0)."""
    if n < 0:
        raise HierarchyError("level index must be non-negative")
    report = classify_phase(sp)
    if report.phase is not Phase.UNBROKEN:
        raise PhaseError(f"{sp.name}: unbroken_energy on a broken-phase instance")
    if not standard_orientation(sp):
        raise PhaseError(
            f"{sp.name}: unbroken with reversed orientation (W > 0 left, "
            "W < 0 right); negate the parameters to use the spectrum formulas"
        )
    if not hierarchy_ok(sp, n, Phase.UNBROKEN):
        raise HierarchyError(
            f"{sp.name}: hierarchy condition fails at n = {n} "
            f"(valid through n = {hierarchy_max_n(sp, Phase.UNBROKEN)})"
        )
    return _unbroken_closed_form(sp, n)


def _broken_closed_form(sp: SuperpotentialInstance, n: int) -> float:
    p = sp.params
    if sp.tag is ClassTag.IIIA:
        return (2.0 * p.a - p.hbar * (1 + 2 * n)) * sp.epsilon
    return p.lam * (p.a ** 2 - (p.B + n * p.hbar + p.hbar / 2.0) ** 2)


def broken_energy(sp: SuperpotentialInstance, n: int) -> float:
    """E_n in the broken phase, via the discrete map to the unbroken system.

    Computed both from the closed form and by composing the map with the
    unbroken spectrum; the two must agree to rounding.
    """
    if n < 0:
        raise HierarchyError("level index must be non-negative")
    if sp.tag not in (ClassTag.IIIA,) + CLASS_IIIB:
        raise UnsupportedClassError(
            f"{sp.name}: no broken-phase spectrum for class {sp.tag.value}; "
            "Classes I/II have a single-intersection broken phase"
        )
    report = classify_phase(sp)
    if report.phase is not Phase.BROKEN:
        raise PhaseError(f"{sp.name}: broken_energy on an unbroken instance")
    if not hierarchy_ok(sp, n, Phase.BROKEN):
        raise HierarchyError(
            f"{sp.name}: hierarchy condition fails at n = {n} "
            f"(valid through n = {hierarchy_max_n(sp, Phase.BROKEN)})"
        )
    dm = discrete_si_map(sp)
    mapped = sp.with_params(**_mapped_overrides(sp, dm))
    via_map = unbroken_energy(mapped, n) + dm.energy_shift
    closed = _broken_closed_form(sp, n)
    if abs(via_map - closed) > 1e-12 * max(1.0, abs(closed)):
        raise RuntimeError(
            f"{sp.name}: discrete-map energy {via_map!r} disagrees with the "
            f"closed form {closed!r} at n = {n}"
        )
    return closed


def _mapped_overrides(sp: SuperpotentialInstance, dm: DiscreteMap) -> dict:
    out = {"a": dm.mapped_params.a}
    if dm.mapped_params.B is not None:
        out["B"] = dm.mapped_params.B
    return out


def energy(sp: SuperpotentialInstance, n: int) -> tuple[Phase, float]:
    """Phase-appropriate level: (phase, E_n)."""
    phase = classify_phase(sp).phase
    if phase is Phase.BROKEN:
        return phase, broken_energy(sp, n)
    return phase, unbroken_energy(sp, n)


def isospectral_pair(sp: SuperpotentialInstance, n: int) -> tuple[float, float]:
    """Matched (E_minus, E_plus) pair at index n.

    Broken phase: the partners are exactly isospectral, E_minus_n = E_plus_n.
    Unbroken phase: E_minus_{n+1} = E_plus_n; the minus ground state E = 0
    is unpaired and not returned here.
    """
    phase = classify_phase(sp).phase
    if phase is Phase.BROKEN:
        e = broken_energy(sp, n)
        return e, e
    e = unbroken_energy(sp, n + 1)
    return e, e


def build_spectrum(sp: SuperpotentialInstance, n_levels: int = 10) -> SpectrumResult:
    """First n_levels levels, truncated at the hierarchy bound if it binds."""
    phase = classify_phase(sp).phase
    formula = _formula_id(sp, phase)
    levels = []
    for n in range(n_levels):
        if not hierarchy_ok(sp, n, phase):
            break
        value = (broken_energy(sp, n) if phase is Phase.BROKEN
                 else unbroken_energy(sp, n))
        levels.append(EnergyLevel(n=n, value=value, phase=phase, formula_id=formula))
    return SpectrumResult(
        instance=sp.name,
        phase=phase,
        levels=tuple(levels),
        g_function=g_description(sp),
        hierarchy_condition_satisfied=True,
    )


def _formula_id(sp: SuperpotentialInstance, phase: Phase) -> str:
    if phase is Phase.BROKEN:
        if sp.tag is ClassTag.IIIA:
            return "broken/IIIA: (2a - hbar*(1+2n))*eps"
        return "broken/IIIB: lambda*(a**2 - (B + n*hbar + hbar/2)**2)"
    return {
        ClassTag.IA: "unbroken/IA: n*omega*hbar",
        ClassTag.IB: "unbroken/IB: alpha**2*(a**2 - (a+n*hbar)**2)",
        ClassTag.IIA: "unbroken/IIA: B**2/a**2 - B**2/(a+n*hbar)**2",
        ClassTag.IIB: "unbroken/IIB: B**2/a**2 - B**2/(a+n*hbar)**2 "
                      "+ lambda*(a**2 - (a+n*hbar)**2)",
        ClassTag.IIIA: "unbroken/IIIA: 2*n*omega*hbar",
    }.get(sp.tag, "unbroken/IIIB: lambda*(a**2 - (a+n*hbar)**2)")
