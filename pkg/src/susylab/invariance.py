"""Shape-invariance checks, phase classification and BSWKB applicability.

The additive identity

    W**2(x,a) + hbar*W'(x,a) + g(a) = W**2(x,a+hbar) - hbar*W'(x,a+hbar) + g(a+hbar)

holds exactly for every catalog closed form; ``additive_si_residual``
measures how much rounding is left.  The discrete (phase-changing) maps

    IIIA:  a -> -a                 shift (2a - hbar)*eps
    IIIB:  (a, B) -> (B + hbar/2, a + hbar/2)   shift lam*(a**2 - (B + hbar/2)**2)

turn a broken-phase system into an unbroken one at a constant energy
offset; ``verify_discrete_si`` confirms the constancy on a grid.

Phase classification uses the boundary signs of W: equal signs mean
broken supersymmetry, opposite signs unbroken.  Signs come from stored
closed-form asymptotics, never from evaluating W at large |x|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DomainError,
    IndeterminatePhaseError,
    ParameterError,
    PhaseError,
    UnsupportedClassError,
    UnsupportedParametersError,
)
from .superpotentials import (
    CLASS_I,
    CLASS_II,
    ClassTag,
    ParamRecord,
    SuperpotentialInstance,
    standard_grid,
)


class Phase(str, Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"


class Applicability(str, Enum):
    TWO_TURNING_POINTS = "TwoTurningPoints"
    SINGLE_INTERSECTION = "SingleIntersection"
    NO_INTERSECTION = "NoIntersection"


@dataclass(frozen=True)
class PhaseReport:
    phase: Phase
    sign_left: int
    sign_right: int
    evidence: dict

    def as_dict(self) -> dict:
        return {
            "phase": self.phase.value,
            "signs": [self.sign_left, self.sign_right],
            "evidence": dict(self.evidence),
        }


@dataclass(frozen=True)
class DiscreteMap:
    source_params: ParamRecord
    mapped_params: ParamRecord
    energy_shift: float

    def as_dict(self) -> dict:
        return {"map": self.mapped_params.as_dict(), "shift": self.energy_shift}


@dataclass(frozen=True)
class BswkbApplicability:
    kind: Applicability
    rationale: str


def _sign(v: float) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


# ---------------------------------------------------------------------------
# boundary-sign asymptotics
# ---------------------------------------------------------------------------

def boundary_signs(sp: SuperpotentialInstance) -> tuple[int, int, dict]:
    """Signs of W approaching the left/right boundaries, with evidence.

    Uses the leading asymptotic coefficient at each boundary; when a
    leading coefficient cancels exactly (e.g. a = B for the trigonometric
    branch) the sign of the subleading interior approach is used instead.
    A returned 0 means the limit genuinely vanishes with no definite
    interior sign scale, which makes the phase indeterminate.
    """
    p = sp.params
    tag = sp.tag
    ev: dict = {}

    if tag is ClassTag.IA:
        ev["asymptotic"] = "W ~ (omega/2)*x at both infinities"
        return -_sign(p.omega), _sign(p.omega), ev

    if tag is ClassTag.IB:
        flat = _sign(p.alpha * p.a)
        ev["asymptotic"] = "W -> alpha*a at the flat end, -exp(alpha*x) dominates the other"
        ev["flat_value"] = p.alpha * p.a
        if p.alpha < 0:
            return -1, flat, ev
        return flat, -1, ev

    if tag in (ClassTag.IIA, ClassTag.IIB, ClassTag.IIIA):
        left = -_sign(p.a)
        ev["left"] = "W ~ -a/x as x -> 0+"
        if tag is ClassTag.IIA:
            flat = p.B / p.a
            ev["right"] = "W -> B/a"
        elif tag is ClassTag.IIB:
            flat = -p.a * math.sqrt(p.lam) + p.B / p.a
            ev["right"] = "W -> -a*sqrt(lambda) + B/a"
        else:
            ev["right"] = "W ~ (omega/2)*x as x -> inf"
            return left, _sign(p.omega), ev
        ev["flat_value"] = flat
        return left, _sign(flat), ev

    if tag is ClassTag.IIIB_NEG_LAMBDA:
        # W ~ (B - a)*|f1| at the left pole, (B + a)*f1 at the right pole;
        # on a degenerate edge W -> 0 from the side fixed by sign(B).
        sl = _sign(p.B - p.a) if p.B != p.a else _sign(p.B)
        sr = _sign(p.B + p.a) if p.B != -p.a else _sign(p.B)
        ev["left_coefficient"] = p.B - p.a
        ev["right_coefficient"] = p.B + p.a
        ev["asymptotic"] = "W ~ (B -+ a)/u near the poles"
        return sl, sr, ev

    if tag is ClassTag.IIIB_POS_LAMBDA_BOUNDED:
        ev["asymptotic"] = "f2 -> 0 and f1 -> -+sqrt(lambda); W -> -+a*sqrt(lambda)"
        return _sign(p.a), -_sign(p.a), ev

    # unbounded hyperbolic branch; which side of the pole fixes sign(f1)
    if sp.domain.x_right <= 0.0:  # x < 0, f1 > sqrt(lambda)
        sr = _sign(p.a + p.B) if p.B != -p.a else _sign(p.a)
        ev["asymptotic"] = "W ~ (a+B)/|u| at the pole, W -> a*sqrt(lambda) at -inf"
        ev["pole_coefficient"] = p.a + p.B
        return _sign(p.a), sr, ev
    sl = _sign(p.B - p.a) if p.B != p.a else -_sign(p.a)
    ev["asymptotic"] = "W ~ (B-a)/u at the pole, W -> -a*sqrt(lambda) at inf"
    ev["pole_coefficient"] = p.B - p.a
    return sl, -_sign(p.a), ev


def classify_phase(sp: SuperpotentialInstance) -> PhaseReport:
    """Broken iff W carries the same sign at both boundaries of the domain."""
    sl, sr, ev = boundary_signs(sp)
    if sl == 0 or sr == 0:
        raise IndeterminatePhaseError(
            f"{sp.name}: boundary sign of W vanishes (signs {sl}, {sr}); "
            "phase undecidable from asymptotics"
        )
    phase = Phase.BROKEN if sl == sr else Phase.UNBROKEN
    return PhaseReport(phase=phase, sign_left=sl, sign_right=sr, evidence=ev)


def standard_orientation(sp: SuperpotentialInstance) -> bool:
    """True when W < 0 at the left and W > 0 at the right boundary.

    The unbroken spectrum formulas assume this orientation (the zero mode
    belongs to the minus partner); for the mirrored orientation negate W
    by mapping the parameters.
    """
    sl, sr, _ = boundary_signs(sp)
    return sl < 0 < sr


# ---------------------------------------------------------------------------
# additive shape invariance
# ---------------------------------------------------------------------------

def additive_si_residual(sp: SuperpotentialInstance, grid=None) -> float:
    """Max over the grid of |V_plus(x, a) + g(a) - V_minus(x, a+hbar) - g(a+hbar)|."""
    from .spectra import g_value  # local import: spectra depends on this module

    if grid is None:
        grid = standard_grid(sp)
    x = np.asarray(grid, dtype=float)
    if x.size == 0:
        raise DomainError("empty grid")
    stepped = sp.with_params(a=sp.params.a + sp.params.hbar)
    lhs = sp.partner(x, "plus") + g_value(sp, sp.params.a)
    rhs = stepped.partner(x, "minus") + g_value(sp, stepped.params.a)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# discrete (phase-changing) shape invariance
# ---------------------------------------------------------------------------

_DISCRETE_TAGS = (
    ClassTag.IIIA,
    ClassTag.IIIB_NEG_LAMBDA,
    ClassTag.IIIB_POS_LAMBDA_UNBOUNDED,
)


def discrete_si_map(sp: SuperpotentialInstance) -> DiscreteMap:
    """Parameter map relating V_plus at one parameter set to V_minus at another.

    IIIA maps a -> -a with constant offset (2a - hbar)*eps; IIIB swaps
    (a, B) -> (B + hbar/2, a + hbar/2) with offset lam*(a**2 - (B + hbar/2)**2).
    The bounded hyperbolic branch is excluded: there f2**2 = lam - f1**2
    breaks the algebra behind the map, and that branch never reaches a
    broken phase anyway.
    """
    p = sp.params
    if sp.tag is ClassTag.IIIA:
        mapped = sp.with_params(a=-p.a).params
        shift = (2.0 * p.a - p.hbar) * sp.epsilon
        return DiscreteMap(p, mapped, shift)
    if sp.tag in (ClassTag.IIIB_NEG_LAMBDA, ClassTag.IIIB_POS_LAMBDA_UNBOUNDED):
        mapped = sp.with_params(a=p.B + p.hbar / 2.0, B=p.a + p.hbar / 2.0).params
        shift = p.lam * (p.a ** 2 - (p.B + p.hbar / 2.0) ** 2)
        return DiscreteMap(p, mapped, shift)
    if sp.tag is ClassTag.IIIB_POS_LAMBDA_BOUNDED:
        raise UnsupportedClassError(
            "the bounded hyperbolic branch has f2**2 = lambda - f1**2; the "
            "discrete map identity does not hold and the branch is never broken"
        )
    raise UnsupportedClassError(
        f"no phase-changing discrete map is available for class {sp.tag.value}"
    )


def potential_gap_stats(sp: SuperpotentialInstance, mapped: ParamRecord,
                        grid) -> tuple[float, float]:
    """Deviation-from-constant and mean of V_plus(x; sp) - V_minus(x; mapped)."""
    x = np.asarray(grid, dtype=float)
    if x.size == 0:
        raise DomainError("empty grid")
    mapped_sp = sp.with_params(**_override_fields(sp, mapped))
    d = sp.partner(x, "plus") - mapped_sp.partner(x, "minus")
    mean = float(np.mean(d))
    return float(np.max(np.abs(d - mean))), mean


def _override_fields(sp: SuperpotentialInstance, mapped: ParamRecord) -> dict:
    out = {"a": mapped.a}
    if mapped.B is not None:
        out["B"] = mapped.B
    return out


def verify_discrete_si(sp: SuperpotentialInstance,
                       grid=None) -> tuple[float, float]:
    """(max deviation from constant, measured shift) for the discrete map."""
    dm = discrete_si_map(sp)
    if grid is None:
        grid = standard_grid(sp)
    return potential_gap_stats(sp, dm.mapped_params, grid)


# ---------------------------------------------------------------------------
# BSWKB applicability
# ---------------------------------------------------------------------------

def bswkb_applicability(sp: SuperpotentialInstance, E: float) -> BswkbApplicability:
    """Case analysis: can W**2 = E bound a two-turning-point region?

    Requires a broken-phase instance and E > 0.  Classes I and II have a
    monotonic, nowhere-zero W in the broken phase, so W**2 meets any level
    at most once.  Class III splits by sub-tag; the unbounded hyperbolic
    branch additionally has parameter sectors where W**2 has no interior
    minimum, reported as UnsupportedParametersError.
    """
    if E <= 0:
        raise ParameterError("BSWKB applicability is defined for E > 0")
    blocked = blocked_reason(sp)
    if blocked is not None:
        raise UnsupportedParametersError(f"{sp.name}: {blocked}")
    report = classify_phase(sp)
    if report.phase is not Phase.BROKEN:
        raise PhaseError(_unbroken_message(sp))
    p = sp.params

    if sp.tag in CLASS_I or sp.tag in CLASS_II:
        roman = "Class I" if sp.tag in CLASS_I else "Class II"
        reason = (f"single intersection ({roman}): W is monotonic and never "
                  "zero in the broken phase, so W**2 has no interior minimum")
        if E > _flat_boundary_value(sp) ** 2:
            return BswkbApplicability(Applicability.SINGLE_INTERSECTION, reason)
        return BswkbApplicability(
            Applicability.NO_INTERSECTION,
            "E below the boundary value of W**2 (" + reason + ")",
        )

    if sp.tag is ClassTag.IIIA:
        floor = 2.0 * p.a * sp.epsilon  # min of W**2, positive since a, eps < 0
        if E > floor:
            return BswkbApplicability(
                Applicability.TWO_TURNING_POINTS,
                f"W**2 has interior minimum 2*a*eps = {floor:g} < E",
            )
        return BswkbApplicability(
            Applicability.NO_INTERSECTION, f"E <= min W**2 = {floor:g}"
        )

    if sp.tag is ClassTag.IIIB_NEG_LAMBDA:
        if abs(p.a) == abs(p.B):
            return BswkbApplicability(
                Applicability.SINGLE_INTERSECTION,
                "single intersection (|a| = |B|): neither W nor W' vanishes, "
                "so (W**2)' = 2*W*W' cannot be zero",
            )
        floor = p.B ** 2 - p.a ** 2  # broken phase has |a| < |B|
        if E > floor:
            return BswkbApplicability(
                Applicability.TWO_TURNING_POINTS,
                f"W**2 has interior minimum B**2 - a**2 = {floor:g} < E",
            )
        return BswkbApplicability(
            Applicability.NO_INTERSECTION, f"E <= min W**2 = {floor:g}"
        )

    if sp.domain.x_right <= 0.0:
        # f1 > 0 branch (aB > 0 or a = -B survive blocked_reason): W is
        # monotonic between the pole and the flat end, so W**2 meets any
        # level at most once.
        flat = p.lam * p.a ** 2
        lo, hi = (0.0, flat) if p.a == -p.B else (flat, math.inf)
        if lo < E < hi:
            return BswkbApplicability(
                Applicability.SINGLE_INTERSECTION,
                "single intersection (f1 > 0 branch): W is monotonic on this "
                "side of the pole; W**2 has no interior minimum",
            )
        return BswkbApplicability(
            Applicability.NO_INTERSECTION,
            f"E outside the range of W**2 on the f1 > 0 branch "
            f"({lo:g}, {'inf' if math.isinf(hi) else f'{hi:g}'})",
        )

    # f1 < 0 branch, aB > 0 with |a| > |B| (the broken sector that survives
    # blocked_reason): W**2 dips to lam*(a**2 - B**2) and flattens to
    # lam*a**2 at the regular end.
    floor = p.lam * (p.a ** 2 - p.B ** 2)
    ceiling = p.lam * p.a ** 2
    if E <= floor:
        return BswkbApplicability(
            Applicability.NO_INTERSECTION, f"E <= min W**2 = {floor:g}"
        )
    if E >= ceiling:
        return BswkbApplicability(
            Applicability.SINGLE_INTERSECTION,
            f"E >= lam*a**2 = {ceiling:g}, the boundary value of W**2; the "
            "outer turning point escapes to the regular end",
        )
    return BswkbApplicability(
        Applicability.TWO_TURNING_POINTS,
        f"W**2 has interior minimum lam*(a**2 - B**2) = {floor:g} < E < {ceiling:g}",
    )


def blocked_reason(sp: SuperpotentialInstance) -> str | None:
    """Reason string when the sign table rules BSWKB out for these parameters.

    Returns None when the parameters are fine (including all unbroken
    configurations; phase is checked separately).  Only the unbounded
    hyperbolic branch has such sectors.
    """
    if sp.tag is not ClassTag.IIIB_POS_LAMBDA_UNBOUNDED:
        return None
    p = sp.params
    f1_positive = sp.domain.x_right <= 0.0
    if f1_positive:
        if p.a * p.B < 0 and p.a != -p.B:
            return ("sign table (f1 > 0, a*B < 0, a != -B): the case analysis "
                    "rules out a consistent broken phase; BSWKB does not apply")
        return None
    if p.a == p.B:
        return ("sign table (f1 < 0, a = B): W**2 has no interior minimum; "
                "BSWKB condition does not apply")
    if p.a * p.B < 0:
        return ("sign table (f1 < 0, a*B < 0): W**2 has no interior minimum; "
                "BSWKB condition does not apply")
    return None


def single_intersection_reason(sp: SuperpotentialInstance) -> str | None:
    """Class-level reason when a broken instance can never have two turning
    points, independent of E.  Used for skip messages in reports."""
    if sp.tag in CLASS_I:
        return "single intersection (Class I): W monotonic, never zero when broken"
    if sp.tag in CLASS_II:
        return "single intersection (Class II): W monotonic, never zero when broken"
    if sp.tag is ClassTag.IIIB_NEG_LAMBDA and abs(sp.params.a) == abs(sp.params.B):
        return "single intersection (|a| = |B|)"
    if sp.tag is ClassTag.IIIB_POS_LAMBDA_UNBOUNDED:
        blocked = blocked_reason(sp)
        if blocked is not None:
            return blocked
        if sp.domain.x_right <= 0.0:  # f1 > 0, aB > 0 or a = -B
            return ("single intersection (f1 > 0 branch): W is monotonic on "
                    "this side of the pole")
    return None


def _flat_boundary_value(sp: SuperpotentialInstance) -> float:
    """Limiting value of W at the non-divergent boundary (Classes I/II)."""
    p = sp.params
    if sp.tag is ClassTag.IB:
        return p.alpha * p.a
    if sp.tag is ClassTag.IIA:
        return p.B / p.a
    if sp.tag is ClassTag.IIB:
        return -p.a * math.sqrt(p.lam) + p.B / p.a
    raise UnsupportedClassError(f"no flat boundary for class {sp.tag.value}")


def _unbroken_message(sp: SuperpotentialInstance) -> str:
    if sp.tag is ClassTag.IIIB_POS_LAMBDA_BOUNDED:
        return (f"{sp.name}: the bounded hyperbolic branch never enters a "
                "broken supersymmetric phase (f2 vanishes at both ends and "
                "f1 is odd); BSWKB is a broken-phase condition")
    return f"{sp.name}: instance is in the unbroken phase; BSWKB applies to broken SUSY"
