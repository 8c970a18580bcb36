"""Least-squares extraction of device parameters from measured curves.

All fitters share one engine: damped least squares (scipy's trust-region
reflective solver) with finite-difference Jacobians, a cap of 200
iterations and a relative step tolerance of 1e-10. Parameter
uncertainties come from the Jacobian at the optimum via the usual
linearized covariance (J^T J)^-1 scaled by the residual variance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks

from .errors import DomainError
from .etalon import _MIN_CONTRAST, finesse_fwhm
from .series import SpectrumSeries
from .slab import DEFAULT_INDEX_MODEL, IndexModel, SlabCoefficients, SlabParams, slab_coefficients
from .constants import SPEED_OF_LIGHT


@dataclass
class FitResult:
    """Outcome of one least-squares fit.

    params/sigmas are keyed by parameter name; sigma is NaN where the
    covariance is singular. ``converged`` False means the iteration cap
    was hit before the step tolerance.
    """

    params: dict
    sigmas: dict
    residual_norm: float
    converged: bool
    iterations: int
    extra: dict = field(default_factory=dict)


@dataclass
class _Solution:
    """least_squares result mapped back to unnormalized units."""

    x: np.ndarray
    jac: np.ndarray
    cost: float
    nfev: int
    status: int


def _solve(residual_fn, x0, bounds=(-np.inf, np.inf)) -> _Solution:
    """Damped least squares on internally normalized parameters.

    Parameters and residuals are rescaled to order unity before the
    solver sees them; otherwise the termination tests (which mix
    absolute and relative measures) misfire for physical magnitudes like
    1e-10 V^2/Hz, stopping at the seed.
    """
    x0 = np.asarray(x0, dtype=float)
    scale = np.where(np.abs(x0) > 0.0, np.abs(x0), 1.0)
    lo = np.broadcast_to(np.asarray(bounds[0], dtype=float), x0.shape)
    hi = np.broadcast_to(np.asarray(bounds[1], dtype=float), x0.shape)
    f0 = np.asarray(residual_fn(x0), dtype=float)
    fscale = float(np.max(np.abs(f0)))
    if not np.isfinite(fscale) or fscale == 0.0:
        fscale = 1.0

    def normalized(theta):
        return np.asarray(residual_fn(theta * scale), dtype=float) / fscale

    res = least_squares(
        normalized,
        x0 / scale,
        bounds=(lo / scale, hi / scale),
        method="trf",
        xtol=1e-10,
        ftol=1e-12,
        gtol=1e-14,
        max_nfev=200 * (x0.size + 1),
    )
    return _Solution(
        x=res.x * scale,
        jac=res.jac * (fscale / scale),
        cost=res.cost * fscale * fscale,
        nfev=int(res.nfev),
        status=int(res.status),
    )


def _sigmas(res, n_points: int) -> np.ndarray:
    """Linearized 1-sigma uncertainties from the Jacobian at the optimum."""
    n_free = n_points - res.x.size
    if n_free <= 0:
        return np.full(res.x.size, np.nan)
    variance = 2.0 * res.cost / n_free
    try:
        cov = np.linalg.inv(res.jac.T @ res.jac) * variance
        diag = np.diag(cov).copy()
        diag[diag < 0] = np.nan
        return np.sqrt(diag)
    except np.linalg.LinAlgError:
        return np.full(res.x.size, np.nan)


def _airy_transmission_curve(wavelengths, gap, refl, trans4):
    """|t|^4 / |1 - mu|^2 with mu = -R(lam) exp(-2 i omega gap / c)."""
    omega = 2.0 * np.pi * SPEED_OF_LIGHT / wavelengths
    mu = -refl * np.exp(-2j * omega * gap / SPEED_OF_LIGHT)
    return trans4 / np.abs(1.0 - mu) ** 2


def fit_airy_wavelength(
    series: SpectrumSeries,
    gap_guess: float,
    thickness: float,
    index_model: IndexModel = DEFAULT_INDEX_MODEL,
) -> FitResult:
    """Cavity gap from a white-light transmission spectrum.

    The model is the two-identical-slab fringe pattern with the slab's own
    dispersion folded in: at each wavelength the slab coefficients are
    evaluated from (thickness, index model), and only the gap and an
    overall amplitude are fitted. Fringe maxima sit where the round-trip
    phase crosses 2 pi, so the fringe spacing pins the gap at roughly
    lambda^2 / (2 gap) per fringe.

    Parameters
    ----------
    series : SpectrumSeries
        Wavelength axis (any length unit suffix) vs transmission.
    gap_guess : float
        Starting gap in meters; must be within about a quarter fringe
        order of the truth to avoid locking onto a neighboring order.
    thickness : float
        Slab thickness in meters, held fixed.

    Returns
    -------
    FitResult
        params: gap_m, amplitude.
    """
    lam = series.x_si()
    y = np.asarray(series.y, dtype=float)
    if lam.size < 8:
        raise DomainError("need at least 8 spectral points to fit the fringe")
    if gap_guess <= 0:
        raise DomainError(f"gap guess must be > 0, got {gap_guess}")

    # slab response at each wavelength is independent of the gap: hoist it
    refl = np.empty(lam.size)
    trans4 = np.empty(lam.size)
    for i, lv in enumerate(lam):
        c = slab_coefficients(SlabParams(n=index_model(lv), thickness=thickness), lv)
        refl[i] = c.reflectivity
        trans4[i] = c.transmissivity ** 2

    shape = _airy_transmission_curve(lam, gap_guess, refl, trans4)
    amp0 = max(y.max(), 1e-30) / max(shape.max(), 1e-30)

    def residuals(p):
        amp, gap = p
        return amp * _airy_transmission_curve(lam, gap, refl, trans4) - y

    res = _solve(residuals, [amp0, gap_guess],
                 bounds=([0.0, 0.1 * gap_guess], [np.inf, 10.0 * gap_guess]))
    sig = _sigmas(res, lam.size)
    return FitResult(
        params={"amplitude": res.x[0], "gap_m": res.x[1]},
        sigmas={"amplitude": sig[0], "gap_m": sig[1]},
        residual_norm=float(np.sqrt(2.0 * res.cost)),
        converged=bool(res.status > 0),
        iterations=int(res.nfev),
    )


def fit_airy_timescan(
    ramp,
    transmission,
    wavelength: float,
    displacement_per_volt: float,
) -> FitResult:
    """Fringe contrast from a piezo-scanned transmission trace.

    The gap follows the ramp through a smooth actuator law
    d(V) = a V + b V^2 (the quadratic soaks up actuator nonlinearity), so
    the trace is a stretched fringe

        T(V) = A (1 - R)^2 / (1 + R^2 - 2 R cos(phi0 + 2 k d(V)))

    Fitted parameters: amplitude A, reflectivity R, phase offset phi0 and
    the actuator coefficients. The fringe sharpness is reported as the
    spacing-to-width ratio computed from the fitted R.

    Parameters
    ----------
    ramp : array_like
        Scan coordinate (piezo voltage), monotone.
    transmission : array_like
        Detected transmission, same length.
    wavelength : float
        Drive wavelength, meters.
    displacement_per_volt : float
        Starting value for the linear actuator coefficient, m/V.

    Returns
    -------
    FitResult
        params: amplitude, reflectivity, phase_rad, gain_m_v, curvature_m_v2,
        finesse (NaN when the fitted contrast is too low to define a width).
    """
    v = np.asarray(ramp, dtype=float)
    y = np.asarray(transmission, dtype=float)
    if v.size != y.size or v.size < 16:
        raise DomainError("scan needs matching ramp/transmission, >= 16 samples")
    dv = np.diff(v)
    if not (np.all(dv > 0) or np.all(dv < 0)):
        raise DomainError("ramp must be monotone")

    # contrast seed; a flat trace has nothing to fit
    lo, hi = float(y.min()), float(y.max())
    if hi <= 0 or (hi - lo) < 1e-3 * hi:
        raise DomainError("no resolvable fringe in the scan (flat trace)")
    ratio = np.sqrt(max(lo, 0.0) / hi)
    r_seed = min(max((1.0 - ratio) / (1.0 + ratio), 0.02), 0.95)

    # require at least two fringe maxima so the period is actually in the data
    mid = 0.5 * (hi + lo)
    peak_idx = find_peaks(y, height=mid)[0]
    if peak_idx.size < 2:
        raise DomainError(
            f"found {peak_idx.size} fringe maxima, need >= 2 to pin the actuator gain"
        )

    k = 2.0 * np.pi / wavelength

    def model(p):
        amp, refl, phi0, a, b = p
        phase = phi0 + 2.0 * k * (a * v + b * v * v)
        return amp * (1.0 - refl) ** 2 / (1.0 + refl * refl - 2.0 * refl * np.cos(phase))

    def residuals(p):
        return model(p) - y

    # adjacent fringe maxima sit half a wavelength apart in displacement,
    # so the peak positions pin the actuator law up to sign: with three or
    # more peaks the quadratic term is observable too
    sgn = -1.0 if displacement_per_volt < 0 else 1.0
    vp = v[peak_idx]
    dv = np.diff(vp)
    if vp.size >= 3:
        rows = np.stack([dv, vp[1:] ** 2 - vp[:-1] ** 2], axis=1)
        (a_pk, b_pk), *_ = np.linalg.lstsq(
            rows, np.full(dv.size, sgn * 0.5 * wavelength) * np.sign(dv), rcond=None
        )
    else:
        a_pk = sgn * 0.5 * wavelength / dv[0] * np.sign(dv[0])
        b_pk = 0.0

    # valleys carry phase too: extrema of a monotone phase sweep alternate
    # max/min exactly pi apart, so three or more of them solve the whole
    # actuator law plus offset as one linear system
    extrema_seed = None
    valley_idx = find_peaks(-y, prominence=0.1 * (hi - lo))[0]
    marks = sorted(
        [(float(v[i]), 0) for i in peak_idx] + [(float(v[i]), 1) for i in valley_idx]
    )
    alternating = all(
        marks[i][1] != marks[i + 1][1] for i in range(len(marks) - 1)
    )
    if len(marks) >= 3 and alternating:
        vx = np.array([m[0] for m in marks])
        targets = (np.pi if marks[0][1] == 1 else 0.0) + np.pi * np.arange(len(marks))
        design = np.stack([2.0 * k * vx, 2.0 * k * vx ** 2, np.ones_like(vx)], axis=1)
        (a_e, b_e, c_e), *_ = np.linalg.lstsq(design, targets, rcond=None)
        if sgn * a_e < 0:
            a_e, b_e, c_e = -a_e, -b_e, -c_e
        extrema_seed = [hi, r_seed, float(c_e), float(a_e), float(b_e)]

    # landscape is multimodal in phase, gain and curvature (fringe-order
    # aliasing): shortlist coarse seeds by SSE, polish the best few
    span = abs(v[-1] - v[0])
    gain_seeds = [a_pk] if displacement_per_volt == 0 else [a_pk, displacement_per_volt]
    seeds = []
    if extrema_seed is not None:
        seeds.append((float(np.sum(residuals(extrema_seed) ** 2)), extrema_seed))
    for gain in gain_seeds:
        for frac in (-0.25, 0.0, 0.25):
            b0 = b_pk + frac * gain / span
            for phi0 in np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False):
                p0 = [hi, r_seed, phi0, gain, b0]
                seeds.append((float(np.sum(residuals(p0) ** 2)), p0))
    seeds.sort(key=lambda item: item[0])

    fit_bounds = (
        [0.0, 0.0, -np.inf, -np.inf, -np.inf],
        [np.inf, 0.999999, np.inf, np.inf, np.inf],
    )
    res = None
    for _, p0 in seeds[:4]:
        trial = _solve(residuals, p0, bounds=fit_bounds)
        if res is None or trial.cost < res.cost:
            res = trial
    sig = _sigmas(res, v.size)
    refl = float(res.x[1])
    if refl > _MIN_CONTRAST:
        fin = finesse_fwhm(
            SlabCoefficients.from_reflectivity(refl),
            SlabCoefficients.from_reflectivity(refl),
        )
    else:
        fin = float("nan")
    names = ("amplitude", "reflectivity", "phase_rad", "gain_m_v", "curvature_m_v2")
    params = dict(zip(names, map(float, res.x)))
    params["finesse"] = fin
    sigmas = dict(zip(names, map(float, sig)))
    sigmas["finesse"] = float("nan")
    return FitResult(
        params=params,
        sigmas=sigmas,
        residual_norm=float(np.sqrt(2.0 * res.cost)),
        converged=bool(res.status > 0),
        iterations=int(res.nfev),
    )


def fit_thickness(
    points,
    thickness_guess: float,
    index_model: IndexModel = DEFAULT_INDEX_MODEL,
    search_max: float | None = None,
) -> FitResult:
    """Film thickness from single-slab reflectivities at a few wavelengths.

    R(lambda; L) is periodic in L with period lambda / (2 n), so the
    squared misfit has a lattice of local minima. A coarse scan locates
    every basin up to ``search_max``; each is refined, and the best
    refined minimum is reported. When several basins tie (inevitable for
    a single measured point), the one nearest the guess is chosen and the
    ambiguity flagged.

    Parameters
    ----------
    points : iterable of (wavelength_m, reflectivity)
    thickness_guess : float
        Starting thickness, meters.
    search_max : float, optional
        Upper edge of the basin scan; defaults to a bit over twice the
        guess or half a period past it, whichever is larger.

    Returns
    -------
    FitResult
        params: thickness_m. extra: candidates (list of (thickness_m,
        residual_norm)), unique (False when distinct basins tie).
    """
    pts = [(float(l), float(r)) for l, r in points]
    if not pts:
        raise DomainError("no measured points")
    for lam, refl in pts:
        if lam <= 0 or not (0.0 <= refl < 1.0):
            raise DomainError(f"bad point (lambda={lam}, R={refl})")
    if thickness_guess <= 0:
        raise DomainError(f"thickness guess must be > 0, got {thickness_guess}")

    lam = np.array([p[0] for p in pts])
    meas = np.array([p[1] for p in pts])
    n_of_lam = np.array([index_model(lv) for lv in lam])

    def residuals(p):
        thick = p[0]
        model = np.array(
            [
                slab_coefficients(SlabParams(n=nv, thickness=thick), lv).reflectivity
                for nv, lv in zip(n_of_lam, lam)
            ]
        )
        return model - meas

    if search_max is None:
        period = float(np.max(lam / (2.0 * n_of_lam)))
        search_max = max(2.5 * thickness_guess, thickness_guess + period)

    # coarse SSE scan to find every basin
    grid = np.linspace(1e-10, search_max, 512)
    sse = np.array([float(np.sum(residuals([g]) ** 2)) for g in grid])
    interior = np.arange(1, grid.size - 1)
    basins = interior[(sse[interior] < sse[interior - 1]) & (sse[interior] <= sse[interior + 1])]
    starts = list(grid[basins]) or [thickness_guess]

    candidates = []
    for start in starts:
        res = _solve(residuals, [start], bounds=([1e-12], [search_max * 1.5]))
        candidates.append((float(res.x[0]), float(np.sqrt(2.0 * res.cost)), res))
    # dedupe refined minima that collapsed into the same basin
    candidates.sort(key=lambda c: c[0])
    unique_cands = []
    for cand in candidates:
        if not unique_cands or abs(cand[0] - unique_cands[-1][0]) > 1e-3 * max(cand[0], 1e-12):
            unique_cands.append(cand)

    best_norm = min(c[1] for c in unique_cands)
    tied = [c for c in unique_cands if c[1] <= best_norm + 1e-9 * (1.0 + best_norm)]
    chosen = min(tied, key=lambda c: abs(c[0] - thickness_guess))
    res = chosen[2]
    sig = _sigmas(res, len(pts))
    return FitResult(
        params={"thickness_m": float(res.x[0])},
        sigmas={"thickness_m": float(sig[0])},
        residual_norm=chosen[1],
        converged=bool(res.status > 0),
        iterations=int(res.nfev),
        extra={
            "candidates": [(c[0], c[1]) for c in unique_cands],
            "unique": len(tied) == 1,
        },
    )


def fit_lorentzian(series: SpectrumSeries, n_peaks: int | None = None) -> FitResult:
    """Multi-peak Lorentzian plus constant floor, for noise spectra.

    Each peak is h / (1 + 4 (f - f0)^2 / w^2) with full width w at half
    height. Seeding follows the usual spectral heuristic: local maxima
    standing above three times the median mark the peaks.

    Parameters
    ----------
    series : SpectrumSeries
        Frequency axis vs spectral density.
    n_peaks : int, optional
        Fit exactly this many peaks (the highest seeds); default: as many
        as the seeding finds.

    Returns
    -------
    FitResult
        params: floor plus peak<i>_center_hz, peak<i>_fwhm_hz,
        peak<i>_height, peak<i>_q for each peak, ordered by center.
    """
    f = series.x_si()
    y = np.asarray(series.y, dtype=float)
    if f.size < 8:
        raise DomainError("need at least 8 spectral points")
    floor0 = float(np.median(y))
    raw, props = find_peaks(y, height=3.0 * floor0)
    if raw.size == 0:
        raise DomainError("no peaks above 3x the median floor")

    def halfwidth_span(i):
        # walk out to the half-height crossings on either side
        half = floor0 + 0.5 * (y[i] - floor0)
        left = i
        while left > 0 and y[left] > half:
            left -= 1
        right = i
        while right < y.size - 1 and y[right] > half:
            right += 1
        return left, right

    # Tallest first. A candidate whose own half-height span already holds
    # an accepted seed is a noise wiggle on that peak's flank (its walk
    # climbs over the taller summit), not a second line.
    idx = []
    spans = {}
    for i in raw[np.argsort(props["peak_heights"])[::-1]]:
        left, right = halfwidth_span(int(i))
        if any(left <= j <= right for j in idx):
            continue
        idx.append(int(i))
        spans[int(i)] = (left, right)
    if n_peaks is not None:
        if n_peaks < 1:
            raise DomainError(f"n_peaks must be >= 1, got {n_peaks}")
        if len(idx) < n_peaks:
            raise DomainError(f"seeding found {len(idx)} peaks, requested {n_peaks}")
        idx = idx[:n_peaks]
    idx = sorted(idx)

    df = float(np.median(np.diff(f)))
    p0 = [floor0]
    lo_b, hi_b = [0.0], [np.inf]
    for i in idx:
        left, right = spans[i]
        width = max((right - left) * df, df)
        p0 += [float(f[i]), width, float(y[i] - floor0)]
        lo_b += [float(f.min()), 0.25 * df, 0.0]
        hi_b += [float(f.max()), float(f.max() - f.min()) * 2.0, np.inf]

    npk = len(idx)

    def model(p):
        out = np.full_like(f, p[0])
        for j in range(npk):
            c, w, h = p[1 + 3 * j : 4 + 3 * j]
            out = out + h / (1.0 + 4.0 * (f - c) ** 2 / (w * w))
        return out

    res = _solve(lambda p: model(p) - y, p0, bounds=(lo_b, hi_b))
    sig = _sigmas(res, f.size)

    params = {"floor": float(res.x[0])}
    sigmas = {"floor": float(sig[0])}
    centers = [(float(res.x[1 + 3 * j]), j) for j in range(npk)]
    for rank, (center, j) in enumerate(sorted(centers)):
        w = float(res.x[2 + 3 * j])
        params[f"peak{rank}_center_hz"] = center
        params[f"peak{rank}_fwhm_hz"] = w
        params[f"peak{rank}_height"] = float(res.x[3 + 3 * j])
        params[f"peak{rank}_q"] = center / w if w > 0 else float("nan")
        sigmas[f"peak{rank}_center_hz"] = float(sig[1 + 3 * j])
        sigmas[f"peak{rank}_fwhm_hz"] = float(sig[2 + 3 * j])
        sigmas[f"peak{rank}_height"] = float(sig[3 + 3 * j])
        sigmas[f"peak{rank}_q"] = float("nan")
    return FitResult(
        params=params,
        sigmas=sigmas,
        residual_norm=float(np.sqrt(2.0 * res.cost)),
        converged=bool(res.status > 0),
        iterations=int(res.nfev),
        extra={"n_peaks": npk},
    )
