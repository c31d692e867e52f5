"""Negativity volume N(t) of a PQD and the ordering threshold search.

For a unit-norm state, Int W d^2beta = 1 exactly (the analytic term
integrals telescope to the squared norm), so

    N(t) = Int |W| - 1 = 2 Int max(-W, 0).

The right-hand side is the quantity integrated here: it vanishes
identically outside the negativity pockets, so the quadrature error is
controlled by the pocket rims alone and the smooth positive bulk costs
nothing.  Midpoint sums on dyadic refinements supply a Richardson-style
error estimate; the plane outside the window is charged with an analytic
Gaussian tail bound per term.

Near t = -1 the pockets shrink onto the zeros of the Husimi function and
fall below any fixed grid.  Those zeros are located once per state, and
square patches around them are cut out of the global grid and integrated
on much finer local grids, which is what makes threshold searches at tight
negativity floors feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NotIntegrable, OrderingTooHigh, TailBoundExceeded
from .phase_space import PqdFunction, _form_is_real, dyadic_char, superposition_pqd
from .states import SuperpositionState, state_extents

__all__ = [
    "QuadratureSpec",
    "NegativityCurve",
    "negativity_volume",
    "negativity_curve",
    "find_threshold",
    "husimi_zero_candidates",
    "integrable_ordering_sup",
]

# Margin kept below the exact integrability boundary when bisecting t.
T_SUP_MARGIN = 1e-6
# Default negativity floor and t resolution for threshold searches.
EPS_NEG_DEFAULT = 1e-4
TOL_T_DEFAULT = 1e-3

_PATCH_CELLS = 4  # patch half-extent, in coarse-grid cells
_PATCH_MIN_H = 1.5e-4  # finest local step; resolves any pocket above ~1e-10 mass
_PATCH_FLOOR = 1e-11  # error floor charged per patch that resolves nothing


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the window, grid sizes, and target accuracy."""

    window: float = 8.0
    base_resolution: int = 256
    refine_depth: int = 4
    tol: float = 1e-6

    def __post_init__(self):
        if not self.window > 0:
            raise ValueError("window half-width must be positive")
        if self.base_resolution < 64:
            raise ValueError("base resolution must be at least 64 points per axis")
        if self.refine_depth < 0:
            raise ValueError("refinement depth must be >= 0")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def for_state(cls, state: SuperpositionState, **overrides) -> "QuadratureSpec":
        """Window covering every branch center plus 4 sigma of the widest branch."""
        amax, rmax = state_extents(state)
        spread = math.exp(rmax)
        window = 4.0 * (amax * spread + spread)
        return cls(**{"window": max(window, 6.0), **overrides})


@dataclass(frozen=True)
class NegativityCurve:
    """(t, N, err) samples; strictly increasing t, N non-decreasing within 2 err."""

    points: tuple

    def __post_init__(self):
        pts = tuple((float(t), float(n), float(e)) for t, n, e in self.points)
        object.__setattr__(self, "points", pts)
        for (t0, n0, e0), (t1, n1, e1) in zip(pts, pts[1:]):
            if not t1 > t0:
                raise ValueError("curve orderings must be strictly increasing")
            if n0 > n1 + 2.0 * max(e0, e1):
                raise ValueError(
                    f"negativity decreased beyond twice the error between t={t0} and t={t1}"
                )
        for t, n, e in pts:
            if n < -e:
                raise ValueError(f"negative volume below -err at t={t}")

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


# ---------------------------------------------------------------------------
# tail bound
# ---------------------------------------------------------------------------


def _tail_outside(terms, window: float) -> float:
    """Upper bound on Int_{outside square} sum |f_i|, term by term.

    Each term obeys |f(y)| = peak * e^{-(y-c)^T S (y-c)/2}; every point
    outside the square lies at distance >= d from the center (d the
    sup-norm gap to the nearest edge, 0 if the center is outside), so the
    term mass is at most peak * (2 pi / lambda_min) e^{-lambda_min d^2 / 2}.
    """
    total = 0.0
    for term in terms:
        peak, center, prec = term.envelope()
        lam = float(np.linalg.eigvalsh(prec)[0])
        if lam <= 0.0:
            raise NotIntegrable("PQD term does not decay; tail bound undefined")
        d = min(window - abs(center[0]), window - abs(center[1]))
        d = max(d, 0.0)
        total += peak * (2.0 * math.pi / lam) * math.exp(-0.5 * lam * d * d)
    return total


def _interference_terms(pqd: PqdFunction) -> tuple:
    """Terms that can push W below zero.

    A real form with positive prefactor is a positive Gaussian and never
    contributes negativity on its own, so max(-W, 0) <= sum of |f_i| over
    the remaining (interference) terms pointwise.
    """
    out = []
    for term in pqd.terms:
        if _form_is_real(term) and term.prefactor.real > 0.0:
            continue
        out.append(term)
    return tuple(out)


def _pocket_window(terms, spec: QuadratureSpec) -> float:
    """Smallest window that still bounds the outside negative mass.

    The integrand vanishes wherever the interference terms are negligible,
    so the grid can shrink well below the full support window; the excluded
    region is charged to the tail at a tenth of the overall budget.
    """
    target = 0.1 * spec.tol
    if 2.0 * _tail_outside(terms, spec.window) > target:
        return spec.window
    lo, hi = 1.0, spec.window
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if 2.0 * _tail_outside(terms, mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def _oscillation_scale(pqd: PqdFunction, window: float) -> float:
    """Largest phase gradient of any term inside the window (rad per unit)."""
    worst = 0.0
    for term in pqd.terms:
        k = float(np.linalg.norm(term.lin.imag))
        k += window * float(np.linalg.norm(term.quad.imag, 2))
        worst = max(worst, k)
    return worst


# ---------------------------------------------------------------------------
# masked global + patch quadrature
# ---------------------------------------------------------------------------


def _merge_boxes(boxes: list) -> list:
    """Union overlapping index rectangles into their bounding rectangles."""
    out = list(boxes)
    merged = True
    while merged:
        merged = False
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                a, b = out[i], out[j]
                if a[0] <= b[1] and b[0] <= a[1] and a[2] <= b[3] and b[2] <= a[3]:
                    out[i] = (
                        min(a[0], b[0]),
                        max(a[1], b[1]),
                        min(a[2], b[2]),
                        max(a[3], b[3]),
                    )
                    del out[j]
                    merged = True
                    break
            if merged:
                break
    return out


def _focus_boxes(focus, window: float, n0: int) -> list:
    """Index rectangles (i0, i1, j0, j1) on the coarse grid, one per focus point.

    Boxes are snapped to coarse cell edges so that every dyadic refinement
    of the global grid keeps them aligned; (i1, j1) are exclusive.
    """
    h0 = 2.0 * window / n0
    boxes = []
    for z in focus:
        ci = (z.real + window) / h0
        cj = (z.imag + window) / h0
        i0 = max(int(math.floor(ci)) - _PATCH_CELLS, 0)
        i1 = min(int(math.ceil(ci)) + _PATCH_CELLS, n0)
        j0 = max(int(math.floor(cj)) - _PATCH_CELLS, 0)
        j1 = min(int(math.ceil(cj)) + _PATCH_CELLS, n0)
        if i1 > i0 and j1 > j0:
            boxes.append((i0, i1, j0, j1))
    return _merge_boxes(boxes)


def _midpoint_axis(lo: float, hi: float, n: int) -> np.ndarray:
    h = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * h


def _negative_mass_grid(pqd: PqdFunction, x1, x2, workers: int = 1) -> float:
    """Sum of max(-W, 0) over the tensor grid, in deterministic block order."""
    n1 = x1.size
    block = max(1, min(n1, 1 << 22) // max(x2.size, 1))
    sums = []

    def one(lo: int, hi: int) -> float:
        w = pqd.evaluate_grid(x1[lo:hi], x2)
        np.negative(w, out=w)
        np.maximum(w, 0.0, out=w)
        return float(w.sum())

    ranges = [(lo, min(lo + block, n1)) for lo in range(0, n1, block)]
    if workers > 1 and len(ranges) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(lambda r: one(*r), ranges))
    else:
        sums = [one(*r) for r in ranges]
    return math.fsum(sums)


def _global_masked(pqd, spec, boxes, level: int, workers: int) -> float:
    """Masked midpoint sum at dyadic level `level` (integral, not density)."""
    n = spec.base_resolution * (1 << level)
    scale = 1 << level
    w = spec.window
    h = 2.0 * w / n
    x1 = _midpoint_axis(-w, w, n)
    x2 = _midpoint_axis(-w, w, n)

    total = _negative_mass_grid(pqd, x1, x2, workers)
    # remove box interiors; box edges coincide with cell edges at every level
    inside = []
    for (i0, i1, j0, j1) in boxes:
        a, b = i0 * scale, i1 * scale
        c, d = j0 * scale, j1 * scale
        if b > a and d > c:
            inside.append(_negative_mass_grid(pqd, x1[a:b], x2[c:d], workers))
    return (total - math.fsum(inside)) * h * h


def _patch_integral(pqd, spec, box, tol_local: float, workers: int):
    """(mass, err) over one box via local midpoint refinement."""
    h0 = 2.0 * spec.window / spec.base_resolution
    x_lo = -spec.window + box[0] * h0
    x_hi = -spec.window + box[1] * h0
    y_lo = -spec.window + box[2] * h0
    y_hi = -spec.window + box[3] * h0
    side = max(x_hi - x_lo, y_hi - y_lo)

    n = 8 * max(box[1] - box[0], box[3] - box[2])  # start 8x finer than global
    prev = None
    best = 0.0
    err = _PATCH_FLOOR
    while True:
        x1 = _midpoint_axis(x_lo, x_hi, n)
        x2 = _midpoint_axis(y_lo, y_hi, n)
        cell = ((x_hi - x_lo) / n) * ((y_hi - y_lo) / n)
        cur = _negative_mass_grid(pqd, x1, x2, workers) * cell
        if prev is not None:
            err = abs(cur - prev)
            best = cur
            if err <= tol_local or (cur == 0.0 and prev == 0.0):
                err = max(err, _PATCH_FLOOR)
                break
        prev = cur
        best = cur
        if side / n <= _PATCH_MIN_H or n >= 4096:
            err = max(err, _PATCH_FLOOR)
            break
        n *= 2
    return best, max(err, _PATCH_FLOOR)


def negativity_volume(
    state: SuperpositionState,
    t: float,
    spec: QuadratureSpec | None = None,
    *,
    focus=None,
    workers: int = 1,
):
    """(N, err) with N = 2 Int max(-W^{(t)}, 0).

    The grid covers only the pocket window -- the smallest square outside
    which the interference terms, and hence any negative mass, are bounded
    below a tenth of the tolerance; states whose terms are all positive
    Gaussians return (0, 0) immediately.

    `focus` is an optional sequence of complex points (typically Husimi
    zeros) that receive fine local patches; pass the output of
    husimi_zero_candidates when sweeping many orderings of one state.

    Raises NotIntegrable if any branch pair fails at this t, and
    TailBoundExceeded if the analytic exterior bound alone exceeds the
    requested tolerance (window too small for this state).
    """
    spec = spec if spec is not None else QuadratureSpec.for_state(state)
    pqd = superposition_pqd(state, t)

    interference = _interference_terms(pqd)
    if not interference:
        return 0.0, 0.0

    tail = 2.0 * _tail_outside(interference, spec.window)
    if tail > spec.tol:
        raise TailBoundExceeded(
            f"exterior bound {tail:.3e} exceeds tolerance {spec.tol:.3e}; widen the window"
        )
    window = _pocket_window(interference, spec)
    tail = 2.0 * _tail_outside(interference, window)
    local = replace(spec, window=window)

    if focus is None:
        focus = husimi_zero_candidates(state, window=window)
    boxes = _focus_boxes(focus, window, spec.base_resolution)

    # start fine enough to sample every term's oscillation
    k_osc = _oscillation_scale(pqd, window)
    level = 0
    while (
        2.0 * window / (spec.base_resolution * (1 << level)) > math.pi / (2.0 * k_osc + 1e-12)
        and level < spec.refine_depth
    ):
        level += 1

    budget = spec.tol
    prev = _global_masked(pqd, local, boxes, level, workers)
    cur = prev
    err_global = abs(prev)
    while level < spec.refine_depth:
        level += 1
        cur = _global_masked(pqd, local, boxes, level, workers)
        err_global = abs(cur - prev)
        if err_global <= 0.5 * budget or (cur == 0.0 and prev == 0.0):
            break
        prev = cur

    patch_mass = 0.0
    patch_err = 0.0
    if boxes:
        tol_local = 0.5 * budget / len(boxes)
        for box in boxes:
            mass, perr = _patch_integral(pqd, local, box, tol_local, workers)
            patch_mass += mass
            patch_err += perr

    value = 2.0 * (cur + patch_mass)
    err = 2.0 * (err_global + patch_err) + tail
    return value, err


def negativity_curve(
    state: SuperpositionState,
    t_min: float,
    t_max: float,
    n_points: int,
    spec: QuadratureSpec | None = None,
    *,
    workers: int = 1,
) -> NegativityCurve:
    """Sample N(t) on an even grid of orderings, sharing one focus-point scan."""
    if not t_min < t_max:
        raise ValueError("need t_min < t_max")
    if n_points < 2:
        raise ValueError("need at least two curve points")
    spec = spec if spec is not None else QuadratureSpec.for_state(state)
    focus = husimi_zero_candidates(state, window=spec.window)
    pts = []
    for t in np.linspace(t_min, t_max, n_points):
        val, err = negativity_volume(state, float(t), spec, focus=focus, workers=workers)
        pts.append((float(t), val, err))
    return NegativityCurve(tuple(pts))


# ---------------------------------------------------------------------------
# ordering threshold
# ---------------------------------------------------------------------------


def integrable_ordering_sup(state: SuperpositionState) -> float:
    """Exact supremum of integrable orderings, minus a 1e-6 safety margin.

    The ordering enters every branch-pair form as A(t) = A(0) - t I, so
    positive-definiteness of Re A(t) holds exactly for t below the smallest
    eigenvalue of Re A(0) over the pairs; no numerical search is needed.
    """
    t_sup = math.inf
    for ket in state.branches:
        for bra in state.branches:
            base = dyadic_char(ket, bra, 0.0)
            lam = float(np.linalg.eigvalsh(base.quad.real)[0])
            t_sup = min(t_sup, lam)
    return t_sup - T_SUP_MARGIN


def find_threshold(
    state: SuperpositionState,
    eps_neg: float = EPS_NEG_DEFAULT,
    tol_t: float = TOL_T_DEFAULT,
    spec: QuadratureSpec | None = None,
    *,
    workers: int = 1,
) -> float:
    """Largest ordering t with N(t) <= eps_neg, located to within tol_t.

    Bisection runs on [-1, t_sup]: the Husimi point t = -1 is non-negative
    for every state, so it certifies the lower end; if negativity persists
    for every t > -1 the function returns -1.0 exactly.  Single-branch
    (Gaussian) states are positive wherever defined and return t_sup
    immediately.
    """
    if not eps_neg > 0:
        raise ValueError("negativity floor must be positive")
    if not tol_t > 0:
        raise ValueError("ordering tolerance must be positive")
    spec = spec if spec is not None else QuadratureSpec.for_state(state)
    t_sup = integrable_ordering_sup(state)

    if len(state.branches) == 1:
        return t_sup

    focus = husimi_zero_candidates(state, window=spec.window)

    def below(t: float) -> bool:
        try:
            val, err = negativity_volume(state, t, spec, focus=focus, workers=workers)
            if abs(val - eps_neg) > 3.0 * err:
                return val <= eps_neg
            tight = replace(
                spec,
                tol=min(spec.tol, max(eps_neg / 4.0, 1e-12)),
                refine_depth=spec.refine_depth + 2,
            )
            val, err = negativity_volume(state, t, tight, focus=focus, workers=workers)
        except (OrderingTooHigh, TailBoundExceeded):
            # this close to the integrability supremum the PQD cannot be
            # evaluated; treat it as not certified and keep bisecting lower
            return False
        return val <= eps_neg

    lo = -1.0
    hi = t_sup
    if hi <= lo:
        return lo
    if below(hi):
        return hi
    while hi - lo > tol_t:
        mid = 0.5 * (lo + hi)
        if below(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Husimi zero search
# ---------------------------------------------------------------------------


def husimi_zero_candidates(
    state: SuperpositionState,
    window: float | None = None,
    *,
    scan_resolution: int = 384,
    rel_cut: float = 0.05,
    cap: int = 32,
) -> tuple:
    """Approximate zeros of the Husimi function inside the window.

    These are the only points where negativity can survive as t -> -1, so
    they serve as focus points for the patch quadrature.  Works on a scan
    grid of the t = -1 PQD: local minima below rel_cut times the grid
    maximum are polished by shrinking 5x5 stencils, deduplicated, and
    capped at the `cap` lowest values.  Single-branch states have none.
    """
    if len(state.branches) == 1:
        return ()
    if window is None:
        spec = QuadratureSpec.for_state(state)
        window = spec.window
    pqd = superposition_pqd(state, -1.0)
    axis = np.linspace(-window, window, scan_resolution)
    q = pqd.evaluate_grid(axis, axis)
    qmax = float(q.max())
    if qmax <= 0.0:
        return ()

    interior = q[1:-1, 1:-1]
    is_min = np.ones_like(interior, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbor = q[1 + di : scan_resolution - 1 + di, 1 + dj : scan_resolution - 1 + dj]
            is_min &= interior <= neighbor
    is_min &= interior < rel_cut * qmax
    ii, jj = np.nonzero(is_min)

    step = axis[1] - axis[0]
    found = []
    for i, j in zip(ii, jj):
        z = complex(axis[i + 1], axis[j + 1])
        h = step
        val = float(interior[i, j])
        # shrink a 5x5 stencil around the running minimum
        while h > 1e-7:
            offs = np.linspace(-h, h, 5)
            pts = (z.real + offs)[:, None] + 1j * (z.imag + offs)[None, :]
            vals = np.asarray(pqd(pts.ravel())).reshape(5, 5)
            k = int(np.argmin(vals))
            z = complex(pts.ravel()[k])
            val = float(vals.ravel()[k])
            h *= 0.5
        found.append((val, z))

    found.sort(key=lambda p: p[0])
    kept = []
    for val, z in found:
        if all(abs(z - w) > 0.05 for w in kept):
            kept.append(z)
        if len(kept) >= cap:
            break
    return tuple(kept)
