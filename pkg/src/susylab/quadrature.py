"""Turning points and the SWKB/BSWKB action integral.

The quantization checks evaluate

    I = integral_{x1}^{x2} sqrt(E - W**2(x)) dx

between the two solutions of W(x) = +-sqrt(E) and compare against
n*pi*hbar (unbroken) or (n + 1/2)*pi*hbar (broken).  The integrand has
inverse-square-root behaviour at both endpoints, so the integral is
computed with a Gauss-Chebyshev rule of the second kind: writing
E - W**2 = (x - x1)*(x2 - x)*h(x) with h smooth, the nodes
x_k = m + w*cos(k*pi/(n+1)) integrate sqrt(h) against the weight
sqrt((x-x1)(x2-x)) with geometric convergence.  Node counts double until
two successive estimates agree to 1e-11.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BracketError,
    ConvergenceFailureError,
    NegativeIntegrandError,
    NoTurningPointsError,
    SingleIntersectionError,
)
from .invariance import (
    Applicability,
    Phase,
    bswkb_applicability,
    classify_phase,
)
from .spectra import broken_energy, unbroken_energy
from .superpotentials import EXCLUSION_RADIUS, SuperpotentialInstance

#: Residual tolerance at a polished turning point: |W**2 - E| <= ROOT_TOL*max(1, E).
ROOT_TOL = 1e-13
#: Self-consistency threshold for node doubling.
INTEGRAL_TOL = 1e-11
#: Hard cap on quadrature nodes.
NODE_CAP = 2 ** 20

_GROWTH = 1.7
_MAX_EXPAND = 400


@dataclass(frozen=True)
class TurningPoints:
    x1: float
    x2: float
    bracket_metadata: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        return self.x1 == self.x2


@dataclass(frozen=True)
class QuantizationReport:
    instance: str
    n: int
    phase: Phase
    hbar: float
    E: float
    turning: TurningPoints
    integral: float
    target: float
    abs_error: float
    quadrature_metadata: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "instance": self.instance,
            "phase": self.phase.value,
            "n": self.n,
            "hbar": self.hbar,
            "E": self.E,
            "x1": self.turning.x1,
            "x2": self.turning.x2,
            "integral": self.integral,
            "target": self.target,
            "abs_error": self.abs_error,
        }

    def csv_row(self) -> list:
        d = self.as_dict()
        return [d[k] for k in ("instance", "phase", "n", "hbar", "E",
                               "x1", "x2", "integral", "target", "abs_error")]


# ---------------------------------------------------------------------------
# bracketing helpers
# ---------------------------------------------------------------------------

def _probes(sp: SuperpotentialInstance, start: float, side: int):
    """Points marching from ``start`` toward the left (-1) or right (+1)
    boundary: additive-geometric toward an infinite end, proportional
    approach toward a finite one."""
    d = sp.domain
    bound = d.x_right if side > 0 else d.x_left
    if math.isinf(bound):
        step = max(0.05, 0.05 * abs(start))
        x = start
        for _ in range(_MAX_EXPAND):
            step *= _GROWTH
            x = start + side * step
            yield x
    else:
        gap = bound - start
        for k in range(1, _MAX_EXPAND):
            x = bound - gap / (_GROWTH ** k)
            if abs(bound - x) <= 10 * EXCLUSION_RADIUS:
                return
            yield x


def _bracket(sp: SuperpotentialInstance, fn, start: float, side: int):
    """First sign change of fn marching from start toward a boundary."""
    f_prev = fn(start)
    x_prev = start
    if f_prev == 0.0:
        return x_prev, x_prev
    for x in _probes(sp, start, side):
        f = fn(x)
        if f == 0.0:
            return x, x
        if (f > 0) != (f_prev > 0):
            return (x_prev, x) if x_prev < x else (x, x_prev)
        x_prev, f_prev = x, f
    raise BracketError(
        f"{sp.name}: no sign change found expanding toward the "
        f"{'right' if side > 0 else 'left'} boundary"
    )


def _solve(sp: SuperpotentialInstance, fn, lo: float, hi: float) -> tuple[float, int]:
    if lo == hi:
        return lo, 0
    root, res = brentq(fn, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                       maxiter=200, full_output=True)
    return float(root), int(res.iterations)


def _anchor(sp: SuperpotentialInstance) -> float:
    """Interior starting point for outward searches."""
    d = sp.domain
    if math.isfinite(d.x_left) and math.isfinite(d.x_right):
        return 0.5 * (d.x_left + d.x_right)
    if math.isfinite(d.x_left):
        return d.x_left + 1.0
    if math.isfinite(d.x_right):
        return d.x_right - 1.0
    return 0.0


def _zero_of_W(sp: SuperpotentialInstance) -> tuple[float, int]:
    """Unique zero of W for an unbroken instance."""
    start = _anchor(sp)
    w0 = sp.W(start)
    if w0 == 0.0:
        return start, 0
    _, sign_right, _ = _signs(sp)
    side = -1 if (w0 > 0) == (sign_right > 0) else 1
    lo, hi = _bracket(sp, sp.W, start, side)
    return _solve(sp, sp.W, lo, hi)


def _signs(sp):
    from .invariance import boundary_signs
    return boundary_signs(sp)


def _minimum_of_W2(sp: SuperpotentialInstance) -> tuple[float, int]:
    """Interior stationary point of W (hence of W**2) for a broken
    two-turning-point instance, via the sign change of W'."""
    start = _anchor(sp)
    wp = sp.W_prime(start)
    if wp == 0.0:
        return start, 0
    for side in (1, -1):
        try:
            lo, hi = _bracket(sp, sp.W_prime, start, side)
        except BracketError:
            continue
        return _solve(sp, sp.W_prime, lo, hi)
    raise SingleIntersectionError(
        f"{sp.name}: W' has no interior zero; W**2 is monotonic"
    )


def turning_points(sp: SuperpotentialInstance, E: float) -> TurningPoints:
    """The pair x1 < x2 with W(x1)**2 = W(x2)**2 = E and W**2 < E between.

    Unbroken instances bracket outward from the zero of W (E = 0 returns
    the degenerate pair there); broken instances bracket outward from the
    interior minimum of W**2.  Roots are polished on W**2 - E until the
    residual is below ROOT_TOL*max(1, E).
    """
    phase = classify_phase(sp).phase
    if E < 0:
        raise NoTurningPointsError(f"E = {E} below min W**2")
    meta: dict = {"phase": phase.value}

    if phase is Phase.UNBROKEN:
        center, it0 = _zero_of_W(sp)
        if E == 0.0:
            return TurningPoints(center, center, {"center_iterations": it0,
                                                  "degenerate": True, **meta})
        orientation = 1.0 if sp.W_prime(center) >= 0 else -1.0
        target_right = orientation * math.sqrt(E)
        x2, it2 = _root_on_side(sp, center, +1, target_right)
        x1, it1 = _root_on_side(sp, center, -1, -target_right)
    else:
        verdict = bswkb_applicability(sp, E)
        if verdict.kind is Applicability.SINGLE_INTERSECTION:
            raise SingleIntersectionError(f"{sp.name}: {verdict.rationale}")
        if verdict.kind is Applicability.NO_INTERSECTION:
            raise NoTurningPointsError(f"{sp.name}: {verdict.rationale}")
        center, it0 = _minimum_of_W2(sp)
        s = 1.0 if sp.W(center) > 0 else -1.0
        x2, it2 = _root_on_side(sp, center, +1, s * math.sqrt(E))
        x1, it1 = _root_on_side(sp, center, -1, s * math.sqrt(E))

    x1, x2 = min(x1, x2), max(x1, x2)
    x1 = _polish(sp, x1, E)
    x2 = _polish(sp, x2, E)
    for x in (x1, x2):
        if abs(sp.W(x) ** 2 - E) > ROOT_TOL * max(1.0, abs(E)):
            raise ConvergenceFailureError(
                f"{sp.name}: turning-point residual {abs(sp.W(x)**2 - E):.2e} "
                f"exceeds {ROOT_TOL:.0e}*max(1, E) at x = {x}"
            )
    meta.update({"center": center, "center_iterations": it0,
                 "iterations": (it1, it2)})
    return TurningPoints(x1, x2, meta)


def _root_on_side(sp, center, side, target):
    fn = lambda x: sp.W(x) - target
    lo, hi = _bracket(sp, fn, center, side)
    return _solve(sp, fn, lo, hi)


def _polish(sp: SuperpotentialInstance, x: float, E: float) -> float:
    """A couple of Newton steps on W**2 - E using the analytic derivative."""
    for _ in range(3):
        w = sp.W(x)
        p = w * w - E
        if abs(p) <= 0.25 * ROOT_TOL * max(1.0, abs(E)):
            break
        dp = 2.0 * w * sp.W_prime(x)
        if dp == 0.0:
            break
        step = p / dp
        x_new = x - step
        d = sp.domain
        if not (d.x_left < x_new < d.x_right):
            break
        x = x_new
    return x


# ---------------------------------------------------------------------------
# the action integral
# ---------------------------------------------------------------------------

def swkb_integral(sp: SuperpotentialInstance, E: float,
                  tp: TurningPoints) -> float:
    value, _ = swkb_integral_with_metadata(sp, E, tp)
    return value


def swkb_integral_with_metadata(sp: SuperpotentialInstance, E: float,
                                tp: TurningPoints) -> tuple[float, dict]:
    """Gauss-Chebyshev (second kind) evaluation of the action integral.

    With x = m + w*cos(theta) the rule reads

        I ~= pi*w**2/(n+1) * sum_k sin(theta_k)**2 * f(x_k),
        f(x) = sqrt( (E - W**2(x)) / ((x - x1)*(x2 - x)) ),

    where f is smooth because the turning points are simple zeros of
    E - W**2.  Doubles n until |I_2n - I_n| < 1e-11.
    """
    if tp.degenerate:
        return 0.0, {"nodes": 0, "delta": 0.0}
    x1, x2 = tp.x1, tp.x2
    m = 0.5 * (x1 + x2)
    w = 0.5 * (x2 - x1)
    floor = -1e-12 * max(1.0, abs(E))

    def estimate(n: int) -> float:
        theta = np.arange(1, n + 1) * (math.pi / (n + 1))
        x = m + w * np.cos(theta)
        raw = E - np.square(sp.W(x))
        if np.any(raw < floor):
            worst = float(np.min(raw))
            raise NegativeIntegrandError(
                f"{sp.name}: E - W**2 reaches {worst:.3e} inside ({x1}, {x2}); "
                "turning points do not bracket the allowed region"
            )
        ratio = np.clip(raw, 0.0, None) / ((x - x1) * (x2 - x))
        weights = np.square(np.sin(theta))
        return float(math.pi * w * w / (n + 1) * np.dot(weights, np.sqrt(ratio)))

    n = 31
    prev = estimate(n)
    while True:
        n = 2 * n + 1
        if n > NODE_CAP:
            raise ConvergenceFailureError(
                f"{sp.name}: quadrature failed to settle below {INTEGRAL_TOL} "
                f"within {NODE_CAP} nodes"
            )
        cur = estimate(n)
        delta = abs(cur - prev)
        if delta < INTEGRAL_TOL:
            return cur, {"nodes": n, "delta": delta}
        prev = cur


# ---------------------------------------------------------------------------
# quantization verification
# ---------------------------------------------------------------------------

def verify_quantization(sp: SuperpotentialInstance, n: int) -> QuantizationReport:
    """Energy -> turning points -> integral -> comparison with the target.

    Target is n*pi*hbar in the unbroken phase and (n + 1/2)*pi*hbar in the
    broken phase.  Broken Class I/II instances are refused upstream (no
    broken spectrum, single intersection).
    """
    phase = classify_phase(sp).phase
    hbar = sp.params.hbar
    if phase is Phase.BROKEN:
        E = broken_energy(sp, n)
        target = (n + 0.5) * math.pi * hbar
    else:
        E = unbroken_energy(sp, n)
        target = n * math.pi * hbar
    tp = turning_points(sp, E)
    integral, meta = swkb_integral_with_metadata(sp, E, tp)
    return QuantizationReport(
        instance=sp.name, n=n, phase=phase, hbar=hbar, E=E, turning=tp,
        integral=integral, target=target, abs_error=abs(integral - target),
        quadrature_metadata=meta,
    )


def hbar_sweep(sp: SuperpotentialInstance, n: int,
               hbars) -> list[QuantizationReport]:
    """One QuantizationReport per hbar value; empty input gives empty output."""
    return [verify_quantization(sp.with_params(hbar=float(h)), n) for h in hbars]
