"""Finite-type analysis: Fourier decomposition of closed curves into Laplace
eigencomponents, the minimal polynomial of Delta acting on H, and the 2-type
constructions (conjugate, dual, invariants) built on the decomposition.

A closed unit-speed curve of length T has eigencomponents
x_t = a_t cos(w_t s) + b_t sin(w_t s), w_t = 2 pi t / T, with Delta x_t = w_t^2 x_t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft, linalg

from lapgeo.config import DEFAULT_TOLERANCES, Tolerances
from lapgeo.differencing import spectral_derivative
from lapgeo.errors import BadOrder, GeometryError, InputError, Not2Type, NotClosed, NotUnitSpeed
from lapgeo.frenet import UNIT_SPEED_TOL, Verdict, reparametrize_unit_speed
from lapgeo.immersions import Axis, Grid, SampledImmersion, induced_metric, mean_curvature_vector
from lapgeo.utils.log import get_logger

logger = get_logger(__name__)

NOISE_FLOOR = 1e3 * np.finfo(float).eps
CONDITION_LIMIT = 1e12
EIGEN_RTOL = 1e-9
DUAL_RTOL = 1e-12


# === Closed curves ===


def _closed_axis(curve: SampledImmersion) -> Axis:
    if curve.n != 1:
        raise GeometryError(f"spectral analysis needs a curve (n = 1), got n = {curve.n}")
    axis = curve.grid.axes[0]
    if not axis.periodic:
        raise NotClosed(f"{curve.label or 'curve'} is sampled on an open axis")
    return axis


def speed_defect(curve: SampledImmersion) -> float:
    """sup | |x'| - 1 | with x' from the trigonometric interpolant."""
    axis = _closed_axis(curve)
    d1 = spectral_derivative(curve.points, axis.period, axis=0, deriv=1)
    return float(np.max(np.abs(np.linalg.norm(d1, axis=-1) - 1.0)))


def unit_speed_curve(
    curve: SampledImmersion,
    tol: Tolerances = DEFAULT_TOLERANCES,
    reparametrize: bool = False,
) -> tuple[SampledImmersion, bool]:
    """(unit-speed closed curve, whether it had to be reparametrized).

    Without `reparametrize` a curve that is not unit speed raises NotUnitSpeed.
    """
    defect = speed_defect(curve)
    if defect <= UNIT_SPEED_TOL:
        return curve, False
    if not reparametrize:
        raise NotUnitSpeed(f"{curve.label or 'curve'}: speed deviates from 1 by {defect:.3g} > {UNIT_SPEED_TOL:g}")
    logger.info("reparametrizing %s to arclength (speed defect %.3g)", curve.label, defect)
    return reparametrize_unit_speed(curve, tol), True


def curve_laplacian(points: np.ndarray, period: float) -> np.ndarray:
    """Delta x = -(1/v) d/du (x_u / v) on a closed curve of any speed v."""
    du = spectral_derivative(points, period, axis=0, deriv=1)
    speed = np.linalg.norm(du, axis=-1)[:, None]
    return -spectral_derivative(du / speed, period, axis=0, deriv=1) / speed


# === Decomposition ===


@dataclass(frozen=True, eq=False)
class Component:
    t: int
    eigenvalue: float
    a: np.ndarray
    b: np.ndarray

    @property
    def amplitude(self) -> float:
        return math.sqrt(float(self.a @ self.a + self.b @ self.b))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Retained eigencomponents of a closed unit-speed curve.

    `k_type` is None for an infinite-type verdict; `closure` is the sup defect
    of x0 + sum of retained components against the samples, relative to sup |x|.
    """

    period: float
    start: float
    count: int
    mean: np.ndarray
    components: list[Component]
    type_set: list[int]
    order: tuple[int, int] | None
    k_type: int | None
    closure: float
    tail: list[int] = field(default_factory=list)
    reparametrized: bool = False
    label: str = ""

    @property
    def infinite(self) -> bool:
        return self.k_type is None

    def omega(self, t: int) -> float:
        return 2.0 * math.pi * t / self.period

    def samples(self) -> np.ndarray:
        return self.start + self.period * np.arange(self.count) / self.count

    def grid(self) -> Grid:
        return Grid((Axis(self.count, self.start, self.start + self.period, True),))

    def get(self, t: int) -> Component:
        for c in self.components:
            if c.t == t:
                return c
        raise KeyError(f"frequency {t} is not in the type set {self.type_set}")

    def component(self, t: int, deriv: int = 0) -> np.ndarray:
        """d^deriv/ds^deriv of x_t on the sample grid."""
        c = self.get(t)
        w = self.omega(t)
        phase = np.exp(1j * w * (self.samples() - self.start)) * (1j * w) ** deriv
        return np.real(np.outer(phase, c.a - 1j * c.b))

    def synthesize(self, signs: dict[int, float] | None = None) -> np.ndarray:
        """x0 + sum of sign_t x_t over the type set (all signs +1 by default)."""
        signs = signs or {}
        out = np.broadcast_to(self.mean, (self.count, self.mean.size)).copy()
        for t in self.type_set:
            out += signs.get(t, 1.0) * self.component(t)
        return out

    def eigencomponents(self) -> list[tuple[float, np.ndarray, list[np.ndarray]]]:
        """(eigenvalue, x_t samples, [d x_t / ds]) per retained frequency."""
        return [(self.get(t).eigenvalue, self.component(t), [self.component(t, 1)]) for t in self.type_set]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "period": self.period,
            "mean": self.mean,
            "components": [
                {"t": c.t, "lambda": c.eigenvalue, "a": c.a, "b": c.b} for c in self.components if c.t in self.type_set
            ],
            "type_set": self.type_set,
            "order": list(self.order) if self.order else None,
            "k_type": "infinite" if self.infinite else self.k_type,
            "closure": self.closure,
            "reparametrized": self.reparametrized,
        }


def _finite(type_set: list, tail: list, top: float, nyquist: float) -> bool:
    # band-limited: nothing between amp_tol and round-off past the last retained term
    return bool(type_set) and not tail and top < nyquist / 2


def decompose_closed_curve(
    curve: SampledImmersion,
    tol: Tolerances = DEFAULT_TOLERANCES,
    reparametrize: bool = False,
) -> SpectralDecomposition:
    curve, reparametrized = unit_speed_curve(curve, tol, reparametrize)
    axis = curve.grid.axes[0]
    N = axis.count
    nyquist = N // 2
    coeffs = fft.rfft(curve.points, axis=0) / N
    mean = coeffs[0].real

    components = []
    for t in range(1, nyquist + 1):
        c = coeffs[t]
        if N % 2 == 0 and t == nyquist:
            a, b = c.real, np.zeros_like(c.real)
        else:
            a, b = 2.0 * c.real, -2.0 * c.imag
        components.append(Component(t, (2.0 * math.pi * t / axis.period) ** 2, a, b))

    amps = np.array([c.amplitude for c in components])
    peak = float(amps.max())
    if peak == 0.0:
        raise GeometryError(f"{curve.label or 'curve'} has no oscillating component")
    type_set = [c.t for c, amp in zip(components, amps) if amp > tol.amp_tol * peak]
    last = type_set[-1]
    tail = [c.t for c, amp in zip(components, amps) if c.t > last and amp > NOISE_FLOOR * peak]
    finite = _finite(type_set, tail, last, nyquist)

    D = SpectralDecomposition(
        period=axis.period,
        start=axis.start,
        count=N,
        mean=mean,
        components=components,
        type_set=type_set,
        order=(type_set[0], last),
        k_type=len(type_set) if finite else None,
        closure=0.0,
        tail=tail,
        reparametrized=reparametrized,
        label=curve.label,
    )
    defect = np.linalg.norm(curve.points - D.synthesize(), axis=-1)
    closure = float(np.max(defect) / max(curve.scale, np.finfo(float).tiny))
    D = replace(D, closure=closure)
    logger.debug(
        "%s: %s-type, order %s, closure %.3g",
        curve.label,
        "infinite" if D.infinite else D.k_type,
        D.order,
        closure,
    )
    return D


# === Minimal polynomial ===


@dataclass(frozen=True, eq=False)
class MinimalPolynomialFit:
    """P(t) = t^k + c_1 t^(k-1) + ... + c_k with P(Delta) H ~ 0."""

    degree: int
    coefficients: np.ndarray
    residual: float
    roots: np.ndarray
    terminating: bool
    condition: float
    history: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def monic(self) -> np.ndarray:
        return np.concatenate([[1.0], self.coefficients])

    def to_dict(self) -> dict:
        roots = self.roots
        if np.iscomplexobj(roots):
            roots = {"re": roots.real, "im": roots.imag}
        return {
            "degree": self.degree,
            "coefficients": self.monic,
            "residual": self.residual,
            "roots": roots,
            "terminating": self.terminating,
            "condition": self.condition,
            "history": self.history,
            "warnings": self.warnings,
        }


def _band_limited_powers(H: np.ndarray, period: float, k: int) -> list[np.ndarray]:
    """[H, Delta H, ..., Delta^k H], with modes below round-off dropped first."""
    N = H.shape[0]
    coeffs = fft.rfft(H, axis=0)
    amps = np.linalg.norm(np.abs(coeffs), axis=-1)
    coeffs[amps <= NOISE_FLOOR * amps.max()] = 0.0
    lam = (2.0 * math.pi * np.arange(coeffs.shape[0]) / period) ** 2
    return [fft.irfft(coeffs * (lam**j)[:, None], n=N, axis=0) for j in range(k + 1)]


def polynomial_roots(monic: np.ndarray) -> np.ndarray:
    """Roots of a monic polynomial, real when the imaginary parts are round-off."""
    k = monic.size - 1
    if k == 1:
        roots = np.array([-monic[1]], dtype=complex)
    elif k == 2:
        b, c = monic[1], monic[2]
        disc = complex(b * b - 4.0 * c)
        q = -0.5 * (b + math.copysign(1.0, b or 1.0) * np.sqrt(disc))
        roots = np.array([q, c / q if q != 0 else 0.0], dtype=complex)
    else:
        roots = np.roots(monic)
    scale = max(float(np.max(np.abs(roots))), 1.0)
    if np.all(np.abs(roots.imag) <= 1e-9 * scale):
        return np.sort(roots.real)
    return roots[np.argsort(roots.real)]


def minimal_polynomial_fit(
    curve: SampledImmersion,
    k_max: int = 8,
    tol: Tolerances = DEFAULT_TOLERANCES,
    reparametrize: bool = False,
) -> MinimalPolynomialFit:
    """Smallest k with |Delta^k H + c_1 Delta^(k-1) H + ... + c_k H| <= poly_tol |Delta^k H|."""
    if k_max < 1:
        raise InputError(f"k_max must be >= 1, got {k_max}")
    curve, _ = unit_speed_curve(curve, tol, reparametrize)
    axis = curve.grid.axes[0]
    H = spectral_derivative(curve.points, axis.period, axis=0, deriv=2)
    if not np.any(H):
        raise GeometryError(f"{curve.label or 'curve'} has vanishing mean curvature")
    powers = [p.ravel() for p in _band_limited_powers(H, axis.period, k_max)]

    history: list[float] = []
    warnings: list[str] = []
    fit = None
    for k in range(1, k_max + 1):
        target = powers[k]
        columns = np.stack([powers[k - j] for j in range(1, k + 1)], axis=1)
        norms = np.linalg.norm(columns, axis=0)
        norms[norms == 0.0] = 1.0
        scaled, _, _, sv = linalg.lstsq(columns / norms, -target)
        coefficients = scaled / norms
        condition = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
        defect = target + columns @ coefficients
        residual = float(np.linalg.norm(defect) / np.linalg.norm(target))
        history.append(residual)
        if condition > CONDITION_LIMIT:
            msg = f"degree {k}: least-squares condition number {condition:.3g}"
            warnings.append(msg)
            logger.warning("⚠️ %s: %s", curve.label, msg)
        fit = (k, coefficients, residual, condition)
        if residual <= tol.poly_tol:
            break

    k, coefficients, residual, condition = fit
    terminating = residual <= tol.poly_tol
    if not terminating:
        logger.info("%s: minimal polynomial does not terminate up to degree %d (residual %.3g)", curve.label, k, residual)
    roots = polynomial_roots(np.concatenate([[1.0], coefficients]))
    return MinimalPolynomialFit(k, coefficients, residual, roots, terminating, condition, history, warnings)


# === Linear independence: Delta x = A x + b ===


@dataclass(frozen=True, eq=False)
class LinearFit:
    A: np.ndarray
    b: np.ndarray
    residual: float
    scale: float
    threshold: float
    linearly_independent: bool

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "b": self.b,
            "residual": self.residual,
            "threshold": self.threshold,
            "linearly_independent": self.linearly_independent,
        }


def linear_fit_Ax_b(
    S: SampledImmersion,
    fd_order: int = 4,
    tol: Tolerances = DEFAULT_TOLERANCES,
    trim: int | None = None,
) -> LinearFit:
    """Least-squares A, b with Delta x ~ A x + b; residuals are RMS over the untrimmed samples."""
    fields = mean_curvature_vector(S, induced_metric(S, fd_order, tol, trim))
    mask = fields.mask
    x = S.points[mask]
    lap = fields.laplacian[mask]
    design = np.hstack([x, np.ones((x.shape[0], 1))])
    coef, *_ = linalg.lstsq(design, lap)
    A, b = coef[:-1].T, coef[-1]
    residual = float(np.sqrt(np.mean(np.sum((lap - design @ coef) ** 2, axis=-1))))
    scale = float(np.sqrt(np.mean(np.sum(lap**2, axis=-1))))
    threshold = tol.fit_tol * scale
    return LinearFit(A, b, residual, scale, threshold, residual <= threshold)


# === 2-type constructions ===


def _two_type(D: SpectralDecomposition) -> tuple[int, int]:
    if D.k_type != 2:
        kind = "infinite" if D.infinite else f"{D.k_type}"
        raise Not2Type(f"{D.label or 'curve'} is of {kind} type, not 2-type")
    return D.type_set[0], D.type_set[1]


@dataclass(frozen=True, eq=False)
class ConjugateCurve:
    curve: SampledImmersion
    unit_speed: bool
    speed_defect: float
    p: int
    q: int


def conjugate_2type(D: SpectralDecomposition) -> ConjugateCurve:
    """x0 + x_p - x_q on the grid of D."""
    p, q = _two_type(D)
    points = D.synthesize({q: -1.0})
    curve = SampledImmersion(D.grid(), points, f"conjugate({D.label})")
    defect = speed_defect(curve)
    return ConjugateCurve(curve, defect <= UNIT_SPEED_TOL, defect, p, q)


def conjugate_laplace_relations(D: SpectralDecomposition, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """Delta x = l_p x_p + l_q x_q on the curve, and the conjugate relation
    Delta' x' = l_p x_p - l_q x_q measured in the conjugate's own metric."""
    conj = conjugate_2type(D)
    lp, lq = D.get(conj.p).eigenvalue, D.get(conj.q).eigenvalue
    xp, xq = D.component(conj.p), D.component(conj.q)

    def relative(got: np.ndarray, want: np.ndarray) -> tuple[np.ndarray, float]:
        defect = np.linalg.norm(got - want, axis=-1)
        return defect, float(np.max(defect) / np.max(np.linalg.norm(want, axis=-1)))

    _, original = relative(curve_laplacian(D.synthesize(), D.period), lp * xp + lq * xq)
    defect_field, residual = relative(curve_laplacian(conj.curve.points, D.period), lp * xp - lq * xq)
    return Verdict(
        "conjugate_laplace",
        residual <= tol.fit_tol,
        defect_field,
        residual,
        tol.fit_tol,
        {"original_residual": original, "lambda_p": lp, "lambda_q": lq, "conjugate_unit_speed": conj.unit_speed},
    )


@dataclass(frozen=True)
class DualTypeCheck:
    eigenvalues: tuple[float, float]
    dual: bool
    null_2type: bool


def dual_2type_check(eigenvalues: tuple[float, float] | list[float]) -> DualTypeCheck:
    """Dual 2-type iff l1 = -l2 != 0; a zero eigenvalue flags null 2-type instead.

    Closed-curve decompositions only produce positive eigenvalues, so this works
    on eigenvalue pairs supplied directly.
    """
    values = tuple(float(v) for v in eigenvalues)
    if len(values) != 2:
        raise InputError(f"dual 2-type check needs two eigenvalues, got {len(values)}")
    l1, l2 = values
    big = max(abs(l1), abs(l2))
    if big == 0.0:
        return DualTypeCheck(values, False, False)
    zero = [abs(v) <= DUAL_RTOL * big for v in values]
    null = any(zero) and not all(zero)
    dual = not any(zero) and abs(l1 + l2) <= DUAL_RTOL * big
    return DualTypeCheck(values, dual, null)


@dataclass(frozen=True)
class TwoTypeInvariants:
    alpha2: float
    tau: float
    h2: float


def spherical_2type_invariants(lambda_p: float, lambda_q: float, n: int) -> TwoTypeInvariants:
    """alpha^2, scalar curvature tau and |h|^2 of a spherical 2-type submanifold (both constant)."""
    if n < 2:
        raise InputError(f"dimension n must be >= 2, got {n}")
    if not lambda_p < lambda_q:
        raise BadOrder(f"eigenvalues must satisfy lambda_p < lambda_q, got {lambda_p} >= {lambda_q}")
    s, prod = lambda_p + lambda_q, lambda_p * lambda_q
    return TwoTypeInvariants(s / n - prod / n**2, s / n - prod / (n * (n - 1)), s)


def reconstruct_two_components(
    S: SampledImmersion,
    L: np.ndarray,
    lambda_1: float,
    lambda_2: float,
    center: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """x1 = (l2 (x - x0) - L) / (l2 - l1) and x2 = (L - l1 (x - x0)) / (l2 - l1).

    x0 defaults to the center of mass of S.
    """
    if lambda_1 == lambda_2:
        raise BadOrder(f"2-type reconstruction needs distinct eigenvalues, got {lambda_1} twice")
    if center is None:
        fields = induced_metric(S, trim=0)
        w = S.grid.weights() * fields.sqrt_det_g
        center = np.einsum("...,...m->m", w, S.points) / np.sum(w)
    x = S.points - np.asarray(center, dtype=float)
    L = np.asarray(L, dtype=float)
    gap = lambda_2 - lambda_1
    return (lambda_2 * x - L) / gap, (L - lambda_1 * x) / gap


# === Subspace structure ===


@dataclass(frozen=True, eq=False)
class OrthogonalityReport:
    linearly_independent: bool
    orthogonal: bool
    pointwise_orthogonal: bool
    strongly_pointwise_orthogonal: bool
    dimensions: dict[float, int]
    span_dim: int
    max_cosine: float
    pointwise_residual: float
    strong_residual: float
    bases: dict[float, np.ndarray] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "linearly_independent": self.linearly_independent,
            "orthogonal": self.orthogonal,
            "pointwise_orthogonal": self.pointwise_orthogonal,
            "strongly_pointwise_orthogonal": self.strongly_pointwise_orthogonal,
            "dimensions": {f"{k:.12g}": v for k, v in self.dimensions.items()},
            "span_dim": self.span_dim,
            "max_cosine": self.max_cosine,
            "pointwise_residual": self.pointwise_residual,
            "strong_residual": self.strong_residual,
        }


def _span(samples: np.ndarray, rank_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the sample vectors."""
    flat = samples.reshape(-1, samples.shape[-1])
    _, sv, vt = linalg.svd(flat, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((flat.shape[-1], 0))
    rank = int(np.sum(sv > rank_tol * sv[0]))
    return vt[:rank].T


def _pair_cosine(u: np.ndarray, v: np.ndarray) -> float:
    """sup |<u, v>| / (sup |u| sup |v|) over samples."""
    dots = np.abs(np.einsum("...m,...m->...", u, v))
    scale = np.max(np.linalg.norm(u, axis=-1)) * np.max(np.linalg.norm(v, axis=-1))
    return float(np.max(dots) / scale) if scale > 0 else 0.0


def orthogonality_report(D, tol: Tolerances = DEFAULT_TOLERANCES) -> OrthogonalityReport:
    """Subspace relations between the eigencomponents of a finite-type decomposition.

    Works on SpectralDecomposition and TorusDecomposition alike.
    """
    if D.infinite:
        raise GeometryError(f"{D.label or 'decomposition'} is of infinite type")
    comps = D.eigencomponents()
    bases = {lam: _span(values, tol.rank_tol) for lam, values, _ in comps}
    dims = {lam: int(b.shape[1]) for lam, b in bases.items()}
    stacked = np.hstack(list(bases.values()))
    span_dim = int(_span(stacked.T, tol.rank_tol).shape[1]) if stacked.size else 0

    max_cos = pointwise = strong = 0.0
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            (li, xi, dxi), (lj, xj, dxj) = comps[i], comps[j]
            if dims[li] and dims[lj]:
                angles = linalg.subspace_angles(bases[li], bases[lj])
                max_cos = max(max_cos, float(np.max(np.cos(angles))))
            pointwise = max(pointwise, _pair_cosine(xi, xj))
            for a in dxi:
                for b in dxj:
                    strong = max(strong, _pair_cosine(a, b))

    return OrthogonalityReport(
        linearly_independent=sum(dims.values()) == span_dim,
        orthogonal=max_cos <= tol.angle_tol,
        pointwise_orthogonal=pointwise <= tol.angle_tol,
        strongly_pointwise_orthogonal=strong <= tol.angle_tol,
        dimensions=dims,
        span_dim=span_dim,
        max_cosine=max_cos,
        pointwise_residual=pointwise,
        strong_residual=strong,
        bases=bases,
    )


# === Flat tori ===


@dataclass(frozen=True, eq=False)
class EigenGroup:
    eigenvalue: float
    samples: np.ndarray
    modes: int


@dataclass(frozen=True, eq=False)
class TorusDecomposition:
    """Eigencomponents of a doubly periodic immersion with flat unit metric, grouped by eigenvalue."""

    grid: Grid
    mean: np.ndarray
    groups: list[EigenGroup]
    k_type: int | None
    closure: float
    label: str = ""

    @property
    def infinite(self) -> bool:
        return self.k_type is None

    @property
    def type_set(self) -> list[float]:
        return [g.eigenvalue for g in self.groups]

    def eigencomponents(self) -> list[tuple[float, np.ndarray, list[np.ndarray]]]:
        out = []
        for g in self.groups:
            derivs = [spectral_derivative(g.samples, a.period, axis=i) for i, a in enumerate(self.grid.axes)]
            out.append((g.eigenvalue, g.samples, derivs))
        return out

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "mean": self.mean,
            "eigenvalues": self.type_set,
            "modes": [g.modes for g in self.groups],
            "k_type": "infinite" if self.infinite else self.k_type,
            "closure": self.closure,
        }


def decompose_flat_torus(S: SampledImmersion, tol: Tolerances = DEFAULT_TOLERANCES) -> TorusDecomposition:
    if S.n != 2:
        raise GeometryError(f"torus decomposition needs a surface (n = 2), got n = {S.n}")
    if not all(S.grid.periodic):
        raise NotClosed(f"{S.label or 'surface'} is not periodic in both parameters")
    axes = S.grid.axes
    d = [spectral_derivative(S.points, a.period, axis=i) for i, a in enumerate(axes)]
    g = np.stack([np.stack([np.einsum("...m,...m->...", di, dj) for dj in d], -1) for di in d], -2)
    flat_defect = float(np.max(np.abs(g - np.eye(2))))
    if flat_defect > UNIT_SPEED_TOL:
        raise GeometryError(f"{S.label or 'surface'}: metric differs from the flat unit metric by {flat_defect:.3g}")

    N1, N2 = S.grid.shape
    coeffs = fft.fftn(S.points, axes=(0, 1)) / (N1 * N2)
    k1 = 2.0 * math.pi * fft.fftfreq(N1, axes[0].period / N1)
    k2 = 2.0 * math.pi * fft.fftfreq(N2, axes[1].period / N2)
    lam = k1[:, None] ** 2 + k2[None, :] ** 2
    amps = np.linalg.norm(np.abs(coeffs), axis=-1)
    amps[0, 0] = 0.0
    peak = float(amps.max())
    if peak == 0.0:
        raise GeometryError(f"{S.label or 'surface'} has no oscillating component")
    keep = amps > tol.amp_tol * peak

    groups: list[EigenGroup] = []
    for value in np.unique(lam[keep]):
        if groups and abs(value - groups[-1].eigenvalue) <= EIGEN_RTOL * value:
            continue
        sel = keep & (np.abs(lam - value) <= EIGEN_RTOL * value)
        samples = fft.ifftn(np.where(sel[..., None], coeffs, 0.0), axes=(0, 1)).real * (N1 * N2)
        groups.append(EigenGroup(float(value), samples, int(sel.sum())))

    top = groups[-1].eigenvalue
    tail = (~keep) & (amps > NOISE_FLOOR * peak) & (lam > top * (1 + EIGEN_RTOL))
    nyquist = min((math.pi * N1 / axes[0].period) ** 2, (math.pi * N2 / axes[1].period) ** 2)
    finite = not tail.any() and top < nyquist / 4
    mean = coeffs[0, 0].real
    recon = mean + sum(grp.samples for grp in groups)
    closure = float(np.max(np.linalg.norm(S.points - recon, axis=-1)) / S.scale)
    return TorusDecomposition(S.grid, mean, groups, len(groups) if finite else None, closure, S.label)
