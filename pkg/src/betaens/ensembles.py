"""Bidiagonal matrix models and spectra.

Builds the lower-bidiagonal random factors whose Gram matrices realize the
beta-Laguerre and beta-Jacobi eigenvalue ensembles, assembles the symmetric
tridiagonal Gram matrices, and extracts sorted spectra.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .numerics import ConsistencyError, ParameterError, _as_generator, sample_beta, sample_chi_square

__all__ = [
    "EnsembleParams",
    "LaguerreBidiagonal",
    "JacobiBidiagonal",
    "SymmetricTridiagonal",
    "Spectrum",
    "SpectrumKind",
    "laguerre_dofs",
    "jacobi_beta_parameters",
    "sample_laguerre_bidiagonal",
    "sample_jacobi_bidiagonal",
    "gram_tridiagonal",
    "eigenvalues",
    "sample_spectrum",
    "sample_laguerre_tridiagonal_batch",
    "sample_jacobi_tridiagonal_batch",
    "clamp_unit_eigenvalues",
    "tridiagonal_power_traces",
    "batch_chunk_sizes",
]

#: Eigenvalues may overshoot the unit interval by at most this much before the
#: overshoot is treated as a real error rather than floating-point noise.
UNIT_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class EnsembleParams:
    """Parameter set (beta, m, a1, a2) shared by every formula in the package.

    ``a2`` is optional: omit it for purely Laguerre quantities.  Derived
    symbols: ``eta = beta/2``, ``r = 1 + eta*(m-1)``, and ``a = a1 + a2``
    when ``a2`` is present.
    """

    beta: float
    m: int
    a1: float
    a2: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "a1", float(self.a1))
        if self.a2 is not None:
            object.__setattr__(self, "a2", float(self.a2))
        if not float(self.beta) > 0.0 or not np.isfinite(self.beta):
            raise ParameterError("beta must be positive")
        m = self.m
        if isinstance(m, float) and not m.is_integer():
            raise ParameterError("m must be a positive integer")
        m = int(m)
        if m < 1:
            raise ParameterError("m must be a positive integer")
        object.__setattr__(self, "m", m)
        bound = self.beta * (m - 1) / 2.0
        if not np.isfinite(self.a1) or not self.a1 > bound:
            raise ParameterError(f"a1 must exceed beta*(m-1)/2 = {bound} (got a1={self.a1})")
        if self.a2 is not None and (not np.isfinite(self.a2) or not self.a2 > bound):
            raise ParameterError(f"a2 must exceed beta*(m-1)/2 = {bound} (got a2={self.a2})")

    @property
    def eta(self) -> float:
        return self.beta / 2.0

    @property
    def r(self) -> float:
        return 1.0 + self.eta * (self.m - 1)

    @property
    def has_a2(self) -> bool:
        return self.a2 is not None

    @property
    def a(self) -> float:
        if self.a2 is None:
            raise ParameterError("a2 is required for this quantity but was not given")
        return self.a1 + self.a2

    def require_a2(self) -> "EnsembleParams":
        """Return self, raising if ``a2`` is absent."""
        if self.a2 is None:
            raise ParameterError("a2 is required for this quantity but was not given")
        return self


@dataclass(frozen=True)
class LaguerreBidiagonal:
    """Lower-bidiagonal factor of the Laguerre model.

    ``x`` holds the m diagonal entries, ``y`` the m-1 subdiagonal entries
    (row i+1); all entries are nonnegative square roots of chi-square draws.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or y.ndim != 1 or y.size != max(x.size - 1, 0) or x.size < 1:
            raise ParameterError("bidiagonal factor needs m diagonal and m-1 subdiagonal entries")
        if np.any(x < 0.0) or np.any(y < 0.0):
            raise ParameterError("bidiagonal factor entries must be nonnegative")

    @property
    def m(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class JacobiBidiagonal:
    """Beta-variate ingredients of the Jacobi model's bidiagonal factor.

    ``c`` holds c_1..c_m and ``cp`` holds c'_1..c'_{m-1}; complements
    ``s = 1 - c`` and ``sp = 1 - cp`` are derived.  All entries are strictly
    inside (0, 1).
    """

    c: np.ndarray
    cp: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float)
        cp = np.asarray(self.cp, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "cp", cp)
        if c.ndim != 1 or cp.ndim != 1 or cp.size != max(c.size - 1, 0) or c.size < 1:
            raise ParameterError("jacobi factor needs m primary and m-1 auxiliary variates")
        for arr in (c, cp):
            if arr.size and (np.any(arr <= 0.0) or np.any(arr >= 1.0)):
                raise ParameterError("jacobi factor variates must lie strictly inside (0, 1)")

    @property
    def m(self) -> int:
        return self.c.size

    @property
    def s(self) -> np.ndarray:
        return 1.0 - self.c

    @property
    def sp(self) -> np.ndarray:
        return 1.0 - self.cp


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Symmetric tridiagonal matrix stored as diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if d.ndim != 1 or e.ndim != 1 or e.size != max(d.size - 1, 0) or d.size < 1:
            raise ParameterError("tridiagonal needs m diagonal and m-1 off-diagonal entries")

    @property
    def m(self) -> int:
        return self.diag.size


class SpectrumKind(str, enum.Enum):
    """Which eigenvalue law a spectrum belongs to."""

    JACOBI_UNIT = "jacobi"
    JACOBI_SCALED = "jacobi-scaled"
    LAGUERRE = "laguerre"


@dataclass(frozen=True)
class Spectrum:
    """Sorted (nonincreasing) eigenvalue vector of one ensemble draw."""

    values: np.ndarray
    kind: SpectrumKind

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "kind", SpectrumKind(self.kind))
        if v.ndim != 1 or v.size < 1 or np.any(~np.isfinite(v)):
            raise ParameterError("spectrum must be a nonempty finite vector")
        if np.any(np.diff(v) > 0.0):
            raise ParameterError("spectrum values must be sorted nonincreasing")
        if self.kind is SpectrumKind.JACOBI_UNIT and (v[-1] < 0.0 or v[0] > 1.0):
            raise ParameterError("unit-interval spectrum must lie in [0, 1]")
        if self.kind in (SpectrumKind.JACOBI_SCALED, SpectrumKind.LAGUERRE) and v[-1] < 0.0:
            raise ParameterError("spectrum values must be nonnegative")

    @property
    def m(self) -> int:
        return self.values.size


def laguerre_dofs(params: EnsembleParams) -> tuple[np.ndarray, np.ndarray]:
    """Chi-square degrees of freedom of the Laguerre factor entries.

    Diagonal: ``2*a1 - beta*(i-1)`` for i = 1..m.  Subdiagonal (row i):
    ``beta*(m - (i-1))`` for i = 2..m, i.e. ``beta*(m-1)`` down to ``beta``.
    """
    i = np.arange(params.m, dtype=float)
    x_dof = 2.0 * params.a1 - params.beta * i
    y_dof = params.beta * (params.m - np.arange(1, params.m, dtype=float))
    return x_dof, y_dof


def jacobi_beta_parameters(params: EnsembleParams) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Beta-law parameters of the Jacobi factor variates.

    ``c_i ~ Beta(a1 - eta*(m-i), a2 - eta*(m-i))`` for i = 1..m and
    ``c'_i ~ Beta(eta*i, a1 + a2 - eta*(2m-i-1))`` for i = 1..m-1.
    """
    params.require_a2()
    m, eta = params.m, params.eta
    gap = eta * (m - np.arange(1, m + 1, dtype=float))
    c_alpha = params.a1 - gap
    c_beta = params.a2 - gap
    i = np.arange(1, m, dtype=float)
    cp_alpha = eta * i
    cp_beta = params.a - eta * (2 * m - i - 1)
    for arr in (c_alpha, c_beta, cp_alpha, cp_beta):
        if arr.size and np.any(arr <= 0.0):
            raise ParameterError("jacobi factor requires all Beta-law parameters positive")
    return c_alpha, c_beta, cp_alpha, cp_beta


def sample_laguerre_bidiagonal(params: EnsembleParams, rng) -> LaguerreBidiagonal:
    """Draw the Laguerre model's bidiagonal factor (independent chi entries)."""
    gen = _as_generator(rng)
    x_dof, y_dof = laguerre_dofs(params)
    x = np.sqrt(sample_chi_square(x_dof, gen))
    y = np.sqrt(sample_chi_square(y_dof, gen)) if y_dof.size else np.empty(0)
    return LaguerreBidiagonal(x=x, y=y)


def sample_jacobi_bidiagonal(params: EnsembleParams, rng) -> JacobiBidiagonal:
    """Draw the Jacobi model's Beta variates c and c'."""
    gen = _as_generator(rng)
    c_alpha, c_beta, cp_alpha, cp_beta = jacobi_beta_parameters(params)
    c = np.atleast_1d(sample_beta(c_alpha, c_beta, gen))
    cp = np.atleast_1d(sample_beta(cp_alpha, cp_beta, gen)) if cp_alpha.size else np.empty(0)
    return JacobiBidiagonal(c=c, cp=cp)


def _jacobi_factor_entries(bid: JacobiBidiagonal) -> tuple[np.ndarray, np.ndarray]:
    """Magnitudes of the Jacobi factor's diagonal and subdiagonal entries.

    Row i has diagonal ``sqrt(c_{m+1-i} * s'_{m-i})`` (with ``s'_0 = 1``) and
    subdiagonal ``sqrt(s_{m+1-i} * c'_{m+1-i})``; subdiagonal signs do not
    affect the Gram spectrum and are not stored.
    """
    c, cp = bid.c, bid.cp
    s, sp = bid.s, bid.sp
    c_rev = c[::-1]
    sp_ext = np.concatenate([sp[::-1], [1.0]])
    d = np.sqrt(c_rev * sp_ext)
    if bid.m == 1:
        return d, np.empty(0)
    e = np.sqrt(s[::-1][1:] * cp[::-1])
    return d, e


def gram_tridiagonal(bid: LaguerreBidiagonal | JacobiBidiagonal) -> SymmetricTridiagonal:
    """Gram matrix (factor times its transpose) of a lower-bidiagonal factor.

    For a factor with diagonal d and subdiagonal e the Gram matrix is
    tridiagonal with diagonal ``d_i^2 + e_{i-1}^2`` (``e_0 = 0``) and
    off-diagonal ``d_i * e_i``.
    """
    if isinstance(bid, LaguerreBidiagonal):
        d, e = bid.x, bid.y
    elif isinstance(bid, JacobiBidiagonal):
        d, e = _jacobi_factor_entries(bid)
    else:
        raise TypeError("gram_tridiagonal expects a bidiagonal factor")
    diag = d * d
    if e.size:
        diag = diag.copy()
        diag[1:] += e * e
    off = d[:-1] * e
    return SymmetricTridiagonal(diag=diag, offdiag=off)


def eigenvalues(t: SymmetricTridiagonal) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, sorted nonincreasing."""
    if t.m == 1:
        return t.diag.astype(float).copy()
    w = eigvalsh_tridiagonal(t.diag, t.offdiag, lapack_driver="sterf")
    return np.ascontiguousarray(w[::-1])


def clamp_unit_eigenvalues(values: np.ndarray, tol: float = UNIT_CLAMP_TOL) -> np.ndarray:
    """Clamp eigenvalues into [0, 1], tolerating only tiny overshoot.

    Overshoot beyond ``tol`` on either side indicates a real defect and
    raises :class:`ConsistencyError` instead of being masked.
    """
    v = np.asarray(values, dtype=float)
    if np.any(v < -tol) or np.any(v > 1.0 + tol):
        raise ConsistencyError("eigenvalue outside [0, 1] beyond the clamping tolerance")
    return np.clip(v, 0.0, 1.0)


def sample_spectrum(kind, params: EnsembleParams, rng) -> Spectrum:
    """Draw one spectrum of the requested kind.

    ``laguerre`` returns Gram eigenvalues of the Laguerre factor;
    ``jacobi`` returns unit-interval eigenvalues; ``jacobi-scaled`` returns
    them multiplied by 2a.
    """
    kind = SpectrumKind(kind)
    gen = _as_generator(rng)
    if kind is SpectrumKind.LAGUERRE:
        t = gram_tridiagonal(sample_laguerre_bidiagonal(params, gen))
        w = eigenvalues(t)
        scale = max(float(np.max(np.abs(w))), 1.0)
        if np.any(w < -1e-10 * scale):
            raise ConsistencyError("negative Laguerre eigenvalue beyond roundoff tolerance")
        return Spectrum(values=np.clip(w, 0.0, None), kind=kind)
    params.require_a2()
    t = gram_tridiagonal(sample_jacobi_bidiagonal(params, gen))
    lam = clamp_unit_eigenvalues(eigenvalues(t))
    if kind is SpectrumKind.JACOBI_UNIT:
        return Spectrum(values=lam, kind=kind)
    return Spectrum(values=2.0 * params.a * lam, kind=kind)


def tridiagonal_power_traces(
    diag: np.ndarray, offdiag: np.ndarray, shift: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """tr((T - shift*I)^k) for k = 1, 2, 3 of batched symmetric tridiagonals.

    Exact entry-level identities: with centered diagonal ``dv = d - shift``
    and off-diagonal squares ``w = e^2``,

    - k=1: sum(dv)
    - k=2: sum(dv^2) + 2*sum(w)
    - k=3: sum(dv^3) + 3*sum(w * (dv_i + dv_{i+1}))

    Accepts (m,) vectors or (n, m) batches; returns arrays of trace values.
    """
    d = np.atleast_2d(np.asarray(diag, dtype=float))
    e = np.atleast_2d(np.asarray(offdiag, dtype=float))
    dv = d - float(shift)
    w = e * e
    t1 = dv.sum(axis=1)
    t2 = (dv * dv).sum(axis=1) + 2.0 * w.sum(axis=1)
    t3 = (dv * dv * dv).sum(axis=1) + 3.0 * (w * (dv[:, :-1] + dv[:, 1:])).sum(axis=1)
    return t1, t2, t3


#: Draws per vectorized chunk are capped so temporaries stay ~tens of MB.
_CHUNK_BUDGET = 4_000_000


def batch_chunk_sizes(n: int, m: int) -> list[int]:
    """Split ``n`` draws of size-m objects into memory-bounded chunks."""
    chunk = max(256, _CHUNK_BUDGET // max(m, 1))
    sizes = [chunk] * (n // chunk)
    if n % chunk:
        sizes.append(n % chunk)
    return sizes


# ---------------------------------------------------------------------------
# Vectorized batch samplers (used by the Monte Carlo estimators)

def sample_laguerre_tridiagonal_batch(params: EnsembleParams, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` Laguerre Gram tridiagonals at once.

    Returns ``(diag, offdiag)`` with shapes (n, m) and (n, m-1); row k holds
    the k-th draw.
    """
    gen = _as_generator(rng)
    x_dof, y_dof = laguerre_dofs(params)
    m = params.m
    x2 = sample_chi_square(x_dof, gen, size=(n, m))
    if m == 1:
        return x2, np.empty((n, 0))
    y2 = sample_chi_square(y_dof, gen, size=(n, m - 1))
    diag = x2.copy()
    diag[:, 1:] += y2
    off = np.sqrt(x2[:, : m - 1] * y2)
    return diag, off


def sample_jacobi_tridiagonal_batch(params: EnsembleParams, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` Jacobi Gram tridiagonals (unit-interval variable) at once."""
    gen = _as_generator(rng)
    c_alpha, c_beta, cp_alpha, cp_beta = jacobi_beta_parameters(params)
    m = params.m
    c = sample_beta(c_alpha, c_beta, gen, size=(n, m))
    if m == 1:
        return c, np.empty((n, 0))
    cp = sample_beta(cp_alpha, cp_beta, gen, size=(n, m - 1))
    s = 1.0 - c
    sp = 1.0 - cp
    c_rev = c[:, ::-1]
    sp_ext = np.concatenate([sp[:, ::-1], np.ones((n, 1))], axis=1)
    fd = np.sqrt(c_rev * sp_ext)
    fe = np.sqrt(s[:, ::-1][:, 1:] * cp[:, ::-1])
    diag = fd * fd
    diag[:, 1:] += fe * fe
    off = fd[:, :-1] * fe
    return diag, off
