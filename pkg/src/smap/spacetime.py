"""Space-time Fourier analysis of windowed trajectories.

A trajectory on [0, T] is extended by free evolution to a symmetric window
[-T_w, T_w], multiplied by the smooth time window so it is compactly
supported, and transformed in all d+1 axes with a continuum-normalized
unitary convention: the discrete transform approximates the symmetric
Fourier transform, so the (d+1)-dimensional Plancherel identity holds
exactly with the grid quadrature weights.

On top of the spectrum this module computes the dyadic-shell norms that
weight distance from the free-evolution paraboloid, directional mixed
norms over lattice fibrations, the one-sided square-sum upper bounds for
whole-trajectory norms, and the ratio diagnostics that probe the expected
k-uniformity of the linear estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmptyEnsemble, UnsupportedDirection, WindowTooShort
from .grid import GridSpec
from .report import NormReport
from .solver import COMPLEX_CHART, Trajectory, free_trajectory
from .spectral import (
    PLATEAU,
    SUPPORT,
    chi,
    eta_shell,
    fft_workers,
    psi,
    samples_of,
    spectrum_of,
)

TIME_CUT = 2.0  # physical-time restriction used by the maximal-function norm


@dataclass
class DirectionSet:
    """Unit vectors used for directional norms; closed under negation."""

    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] == 0:
            raise ValueError("vectors must be a non-empty (L, d) array")
        norms = np.sqrt(np.sum(self.vectors**2, axis=1))
        if np.any(np.abs(norms - 1.0) > 1e-15):
            raise ValueError("direction vectors must be unit length to 1e-15")
        for e in self.vectors:
            if not any(np.array_equal(-e, f) for f in self.vectors):
                raise ValueError("direction set must be closed under negation")

    def __len__(self):
        return self.vectors.shape[0]

    def __iter__(self):
        return iter(self.vectors)

    @classmethod
    def default(cls, d: int) -> "DirectionSet":
        """Signed coordinate axes plus all normalized face diagonals."""
        ints = []
        for axis in range(d):
            m = np.zeros(d)
            m[axis] = 1.0
            ints += [m, -m]
        for a in range(d):
            for b in range(a + 1, d):
                for sa in (1.0, -1.0):
                    for sb in (1.0, -1.0):
                        m = np.zeros(d)
                        m[a], m[b] = sa, sb
                        ints.append(m)
        vecs = np.array([m / np.sqrt(np.sum(m**2)) for m in ints])
        return cls(vecs)


def lattice_vector(e: np.ndarray, d: int) -> np.ndarray:
    """Integer vector with entries in {-1,0,1} aligned with e, if any.

    Only such directions fibrate the sampling lattice exactly (axes and
    diagonals); anything else raises UnsupportedDirection.
    """
    e = np.asarray(e, dtype=np.float64)
    if e.shape != (d,):
        raise UnsupportedDirection(f"direction shape {e.shape} does not match d={d}")
    best = None
    for flat in range(3**d):
        m = np.array([(flat // 3**a) % 3 - 1 for a in range(d)], dtype=np.float64)
        if not m.any():
            continue
        unit = m / np.sqrt(np.sum(m**2))
        if np.max(np.abs(unit - e)) <= 1e-12:
            best = m.astype(np.int64)
            break
    if best is None:
        raise UnsupportedDirection(f"direction {e} is not lattice-aligned")
    return best


@dataclass
class SpaceTimeSpectrum:
    """Discrete (d+1)-dimensional Fourier data of a windowed trajectory.

    values[b, i1, ..., id] approximates the symmetric-convention transform at
    (tau_b, xi_i); tau runs on (pi/T_w) * Z in FFT layout along axis 0.
    """

    grid: GridSpec
    t_window: float
    values: np.ndarray
    windowed: bool = True

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != self.grid.d + 1:
            raise ValueError("values must have one time axis plus the grid axes")
        if self.values.shape[1:] != self.grid.shape:
            raise ValueError("spatial extent does not match the grid")

    @property
    def m_t(self) -> int:
        return self.values.shape[0]

    @property
    def dt(self) -> float:
        return 2.0 * self.t_window / self.m_t

    @property
    def cell_measure(self) -> float:
        """Frequency-space cell volume dxi^d * dtau."""
        return (1.0 / self.grid.period) ** self.grid.d * (math.pi / self.t_window)

    def tau(self) -> np.ndarray:
        return (math.pi / self.t_window) * np.fft.fftfreq(self.m_t, d=1.0 / self.m_t)

    def tau_broadcast(self) -> np.ndarray:
        return self.tau().reshape((self.m_t,) + (1,) * self.grid.d)

    def omega(self) -> np.ndarray:
        """Distance coordinate tau + |xi|^2 from the free paraboloid."""
        return self.tau_broadcast() + self.grid.wavenumber_sq()

    def l2_mass(self) -> float:
        return float(np.sqrt(self.cell_measure * np.sum(np.abs(self.values) ** 2)))

    def shell_weights(self, k: int) -> np.ndarray:
        return eta_shell(k, np.sqrt(self.grid.wavenumber_sq()))

    def shell_project(self, k: int) -> "SpaceTimeSpectrum":
        return SpaceTimeSpectrum(
            self.grid, self.t_window, self.values * self.shell_weights(k), self.windowed
        )

    def region_mask(self, k: int, j: int) -> np.ndarray:
        """Indicator of the dyadic region |xi| ~ 2^k, |tau + |xi|^2| <= 2^(j+1)."""
        radius = np.sqrt(self.grid.wavenumber_sq())
        if k == 0:
            shell = radius <= 2.0
        else:
            shell = (radius >= 2.0 ** (k - 1)) & (radius <= 2.0 ** (k + 1))
        return shell & (np.abs(self.omega()) <= 2.0 ** (j + 1))

    def shell_mass_disjoint(self, k: int) -> float:
        """L2 mass on the disjoint annulus 2^(k-1) < |xi| <= 2^k (|xi| <= 1 for k=0)."""
        radius = np.sqrt(self.grid.wavenumber_sq())
        if k == 0:
            sel = radius <= 1.0
        else:
            sel = (radius > 2.0 ** (k - 1)) & (radius <= 2.0**k)
        total = np.sum(np.abs(self.values[:, sel]) ** 2)
        return float(np.sqrt(self.cell_measure * total))


def _st_scale(grid: GridSpec, t_window: float, m_t: int) -> float:
    # C with F = C * phase * fft_ortho(u); fixed by the exact Plancherel identity.
    dt = 2.0 * t_window / m_t
    dxi_dtau = (1.0 / grid.period) ** grid.d * (math.pi / t_window)
    return math.sqrt(grid.cell_volume * dt / dxi_dtau)


def _st_phase(grid: GridSpec, m_t: int) -> np.ndarray:
    return _st_phase_cached(grid.d, grid.n, m_t)


@lru_cache(maxsize=8)
def _st_phase_cached(d: int, n: int, m_t: int) -> np.ndarray:
    # Sign pattern translating FFT output to transforms with centered coordinates.
    sign_t = (-1.0) ** np.arange(m_t)
    out = sign_t.reshape((m_t,) + (1,) * d).copy()
    for axis in range(d):
        shape = [1] * (d + 1)
        shape[axis + 1] = n
        out = out * ((-1.0) ** np.arange(n)).reshape(shape)
    out.flags.writeable = False
    return out


def window_profile(times: np.ndarray, t_window: float) -> np.ndarray:
    """Smooth window equal to 1 on the inner 78% of [-T_w, T_w], 0 at the ends."""
    return psi(SUPPORT * np.asarray(times) / t_window)


def windowed_samples(traj: Trajectory, t_window: float = 1.0):
    """Symmetric-window samples of a trajectory, extended by free evolution.

    Returns (times, samples) with times = -T_w + dt*m, m = 0..M_t-1, matching
    the trajectory's own step; samples are multiplied by the smooth window.
    """
    if traj.kind != COMPLEX_CHART:
        raise ValueError("space-time analysis needs a complex_chart trajectory")
    dt = traj.dt
    if dt <= 0:
        raise WindowTooShort("trajectory has fewer than two samples")
    m_t = int(round(2.0 * t_window / dt))
    if abs(m_t * dt - 2.0 * t_window) > 1e-12 * max(1.0, t_window):
        raise ValueError(f"dt={dt} does not divide the window [-{t_window}, {t_window}]")
    if m_t < 16:
        raise WindowTooShort(f"window has {m_t} samples, need at least 16")
    times = -t_window + dt * np.arange(m_t)

    samples = np.empty((m_t,) + traj.grid.shape, dtype=np.complex128)
    t0, t_end = float(traj.times[0]), float(traj.times[-1])
    idx = np.round((times - t0) / dt).astype(int)
    inside = (idx >= 0) & (idx < len(traj)) & (
        np.abs(t0 + idx * dt - times) <= 1e-9 * max(1.0, t_window)
    )
    samples[inside] = traj.values[idx[inside]]
    left = times < t0
    left &= ~inside
    if np.any(left):
        ext = free_trajectory(traj.snapshot(0), times[left] - t0)
        samples[left] = ext.values
    right = times > t_end
    right &= ~inside
    if np.any(right):
        ext = free_trajectory(traj.snapshot(len(traj) - 1), times[right] - t_end)
        samples[right] = ext.values

    window = window_profile(times, t_window)
    samples *= window.reshape((m_t,) + (1,) * traj.grid.d)
    return times, samples


def spacetime_transform(traj: Trajectory, t_window: float = 1.0) -> SpaceTimeSpectrum:
    """Window the trajectory in time and transform in all d+1 axes."""
    _, samples = windowed_samples(traj, t_window)
    grid = traj.grid
    m_t = samples.shape[0]
    spec = spectrum_of(samples) * _st_phase(grid, m_t) * _st_scale(grid, t_window, m_t)
    return SpaceTimeSpectrum(grid, t_window, spec)


def inverse_spacetime(F: SpaceTimeSpectrum) -> np.ndarray:
    """Physical-space samples (M_t, *grid) of a space-time spectrum."""
    scale = _st_scale(F.grid, F.t_window, F.m_t)
    return samples_of(F.values * _st_phase(F.grid, F.m_t) / scale)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def _annulus(abs_omega: np.ndarray, j: int) -> np.ndarray:
    """Flat indices where the j-th shell bump of the paraboloid distance lives."""
    if j == 0:
        sel = abs_omega < SUPPORT
    else:
        sel = (abs_omega > PLATEAU * 2.0 ** (j - 1)) & (abs_omega < SUPPORT * 2.0**j)
    return np.flatnonzero(sel)


def _j_range(abs_omega: np.ndarray) -> int:
    top = float(abs_omega.max()) if abs_omega.size else 0.0
    return max(0, int(math.ceil(math.log2(max(top, 2.0)))) + 1)


def _xk_sum(masked: np.ndarray, omega: np.ndarray, cell_measure: float) -> float:
    """sum_j 2^(j/2) ||eta_j(omega) . masked||_L2 truncated at the grid's range."""
    abs_omega = np.abs(omega).ravel()
    power = np.abs(masked.ravel()) ** 2
    total = 0.0
    for j in range(_j_range(abs_omega) + 1):
        idx = _annulus(abs_omega, j)
        if idx.size == 0:
            continue
        w = eta_shell(j, abs_omega[idx])
        term = float(np.dot(w**2, power[idx]))
        if term > 0.0:
            total += 2.0 ** (j / 2.0) * math.sqrt(cell_measure * term)
    return total


def _shell_rows(F: SpaceTimeSpectrum, k: int):
    """Flat spatial indices carrying the shell-k bump, plus bump values there."""
    radius = np.sqrt(F.grid.wavenumber_sq()).ravel()
    w = eta_shell(k, radius)
    rows = np.flatnonzero(w > 0.0)
    return rows, w[rows]


def xk_norm(F: SpaceTimeSpectrum, k: int) -> float:
    """Dyadic space-time norm of the shell-k piece of the spectrum.

    Weights the L2 mass at distance ~2^j from the free paraboloid by 2^(j/2)
    and sums over j; the sum terminates at the sampled tau range.
    """
    if k < 0:
        raise ValueError(f"shell index must be >= 0, got {k}")
    flat, omega = _shell_flat(F, k)
    if flat is None:
        return 0.0
    return _xk_sum(flat, omega, F.cell_measure)


def _xk_stats(flat: np.ndarray, omega: np.ndarray, cell_measure: float):
    """One sweep computing the shell norm and its j-section sanity ratio.

    Only adjacent shell bumps overlap, so the section norms need just the
    per-j diagonal power sums and the off-diagonal sums on the overlap bands.
    """
    abs_omega = np.abs(omega).ravel()
    power = np.abs(flat.ravel()) ** 2
    j_max = _j_range(abs_omega)
    cm = cell_measure
    sq = np.zeros(j_max + 2)  # sum eta_j^2 |f|^2
    diag = np.zeros(j_max + 2)  # sum eta_j^4 |f|^2
    off = np.zeros(j_max + 2)  # sum eta_j^2 eta_{j+1}^2 |f|^2 (overlap band)
    for j in range(j_max + 1):
        idx = _annulus(abs_omega, j)
        if idx.size == 0:
            continue
        sub = abs_omega[idx]
        w2 = eta_shell(j, sub) ** 2
        p = power[idx]
        sq[j] = float(np.dot(w2, p))
        diag[j] = float(np.dot(w2**2, p))
        band = np.flatnonzero(sub > PLATEAU * 2.0**j)  # overlap with shell j+1
        if band.size:
            w_next2 = eta_shell(j + 1, sub[band]) ** 2
            off[j] = float(np.dot(w2[band] * w_next2, p[band]))
    xk = sum(
        2.0 ** (j / 2.0) * math.sqrt(cm * sq[j])
        for j in range(j_max + 1)
        if sq[j] > 0.0
    )
    if xk == 0.0:
        return 0.0, 0.0
    best = 0.0
    for j in range(j_max + 1):
        val = 2.0 ** (j / 2.0) * math.sqrt(cm * diag[j])
        if j >= 1:
            val += 2.0 ** ((j - 1) / 2.0) * math.sqrt(cm * off[j - 1])
        val += 2.0 ** ((j + 1) / 2.0) * math.sqrt(cm * off[j])
        best = max(best, val / xk)
    return xk, best


def _shell_flat(F: SpaceTimeSpectrum, k: int):
    """Shell-masked spectrum restricted to its carrier rows, with omega there."""
    rows, w = _shell_rows(F, k)
    if rows.size == 0:
        return None, None
    flat = F.values.reshape(F.m_t, -1)[:, rows] * w
    k2 = F.grid.wavenumber_sq().ravel()[rows]
    omega = F.tau()[:, None] + k2[None, :]
    return flat, omega


def xk_section_sanity(F: SpaceTimeSpectrum, k: int) -> float:
    """max_j ||eta_j(omega) . f_k||_Xk / ||f_k||_Xk; <= 1 by construction."""
    flat, omega = _shell_flat(F, k)
    if flat is None:
        return 0.0
    return _xk_stats(flat, omega, F.cell_measure)[1]


def _fiber_index(grid: GridSpec, m: np.ndarray) -> np.ndarray:
    idx = np.indices(grid.shape)
    c = np.zeros(grid.shape, dtype=np.int64)
    for axis in range(grid.d):
        c += int(m[axis]) * idx[axis]
    return np.mod(c, grid.n)


def lpq_norm(values, grid: GridSpec, dt: float, e, p, q) -> float:
    """Discrete mixed norm: L^q over the hyperplane fiber x time, L^p across
    the fiber offsets along a lattice-aligned direction e.

    values is a (M_t, *grid.shape) stack of physical samples (a Trajectory is
    accepted too); weights are the Riemann weights of the fibration, so
    p = q = 2 reproduces the space-time L2 norm for every lattice direction.
    """
    if isinstance(values, Trajectory):
        if values.kind != COMPLEX_CHART:
            raise ValueError("lpq_norm expects complex samples")
        grid, dt = values.grid, values.dt
        values = values.values
    if p not in (1, 2, np.inf) or q not in (2, np.inf):
        raise ValueError(f"unsupported exponents p={p}, q={q}")
    m = lattice_vector(np.asarray(e, dtype=np.float64), grid.d)
    m_len = math.sqrt(float(np.sum(m.astype(np.float64) ** 2)))
    dr = grid.spacing / m_len
    w_perp = grid.spacing ** (grid.d - 1) * m_len

    c = _fiber_index(grid, m).ravel()
    flat = values.reshape(values.shape[0], -1)
    if q == 2:
        per_point = dt * np.sum(np.abs(flat) ** 2, axis=0)
        fiber = w_perp * np.bincount(c, weights=per_point, minlength=grid.n)
        inner = np.sqrt(fiber)
    else:
        per_point = np.max(np.abs(flat), axis=0)
        inner = np.zeros(grid.n)
        np.maximum.at(inner, c, per_point)
    if p == 1:
        return float(dr * np.sum(inner))
    if p == 2:
        return float(np.sqrt(dr * np.sum(inner**2)))
    return float(np.max(inner))


def _sigma_upper(F: SpaceTimeSpectrum, sigma: float, weight=None) -> float:
    total = 0.0
    if weight is not None:
        F = SpaceTimeSpectrum(F.grid, F.t_window, F.values * weight, F.windowed)
    for k in range(F.grid.max_shell + 1):
        xk = xk_norm(F, k)
        total += 2.0 ** (2.0 * sigma * k) * xk**2
    return math.sqrt(total)


def fsigma_upper(traj, sigma: float, t_window: float = 1.0) -> float:
    """Square-summed shell bound on the solution-space norm of a trajectory.

    The per-shell building block is the ell-1-in-j norm, which dominates the
    sharper decomposition norm from above, so this is a one-sided bound.
    """
    F = traj if isinstance(traj, SpaceTimeSpectrum) else spacetime_transform(traj, t_window)
    return _sigma_upper(F, sigma)


def nsigma_upper(traj, sigma: float, t_window: float = 1.0) -> float:
    """Same square-summed bound with the inverse paraboloid weight attached."""
    F = traj if isinstance(traj, SpaceTimeSpectrum) else spacetime_transform(traj, t_window)
    return _sigma_upper(F, sigma, weight=1.0 / (F.omega() + 1j))


# ---------------------------------------------------------------------------
# Ratio diagnostics
# ---------------------------------------------------------------------------

def _physical_l2_slices(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    axes = tuple(range(1, grid.d + 1))
    return np.sqrt(grid.cell_volume * np.sum(np.abs(u) ** 2, axis=axes))


def _direction_label(e):
    return "(" + " ".join(f"{c:+.3f}" for c in e) + ")"


def _member_rows(name, member, directions, shells, t_window, mass_floor, fsigma_sigma):
    """Diagnostic rows for one ensemble member (thread-safe, pure)."""
    F = (
        member
        if isinstance(member, SpaceTimeSpectrum)
        else spacetime_transform(member, t_window)
    )
    ks = list(shells) if shells is not None else list(range(F.grid.max_shell + 1))
    total = F.l2_mass()
    if total <= mass_floor:
        return [(name, -1, "skipped", "-", 0.0)]
    grid = F.grid
    d = grid.d
    time_keep = np.abs(-F.t_window + F.dt * np.arange(F.m_t)) <= TIME_CUT
    rows = []
    xk_by_shell = {}
    for k in ks:
        flat, omega = _shell_flat(F, k)
        xk, r1 = _xk_stats(flat, omega, F.cell_measure) if flat is not None else (0.0, 0.0)
        xk_by_shell[k] = xk
        if xk <= mass_floor * max(total, 1.0):
            continue
        Fk = F.shell_project(k)
        u_k = inverse_spacetime(Fk)
        r4 = float(np.max(_physical_l2_slices(u_k, grid))) / xk

        # Per-point time reductions, shared by all lattice directions.
        flat_u = u_k.reshape(F.m_t, -1)
        sq_time = F.dt * np.sum(np.abs(flat_u) ** 2, axis=0)
        max_time = np.max(np.abs(flat_u[time_keep]), axis=0)

        r2_best, r2_dir = 0.0, "-"
        r3_best, r3_dir = 0.0, "-"
        for e in directions:
            m = lattice_vector(e, d)
            m_len = math.sqrt(float(np.sum(m.astype(np.float64) ** 2)))
            c = _fiber_index(grid, m).ravel()
            if k >= 100:
                # The one-sided frequency cutoff is non-trivial only here.
                xi_dot_e = sum(e[a] * grid.wavenumber_component(a) for a in range(d))
                cut = Fk.values * chi(k, 30, xi_dot_e)
                u_dir = inverse_spacetime(SpaceTimeSpectrum(grid, F.t_window, cut))
                r2 = 2.0 ** (k / 2.0) * lpq_norm(u_dir, grid, F.dt, e, np.inf, 2) / xk
            else:
                w_perp = grid.spacing ** (d - 1) * m_len
                fiber_sq = w_perp * np.bincount(c, weights=sq_time, minlength=grid.n)
                r2 = 2.0 ** (k / 2.0) * math.sqrt(float(np.max(fiber_sq))) / xk
            fiber_max = np.zeros(grid.n)
            np.maximum.at(fiber_max, c, max_time)
            dr = grid.spacing / m_len
            r3 = (
                2.0 ** (-(d - 1) * k / 2.0)
                / (k + 1.0) ** 2
                * math.sqrt(dr * float(np.sum(fiber_max**2)))
                / xk
            )
            if r2 > r2_best:
                r2_best, r2_dir = r2, _direction_label(e)
            if r3 > r3_best:
                r3_best, r3_dir = r3, _direction_label(e)

        rows += [
            (name, k, "Xk", "-", xk),
            (name, k, "R1", "-", r1),
            (name, k, "R2", r2_dir, r2_best),
            (name, k, "R3", r3_dir, r3_best),
            (name, k, "R4", "-", r4),
        ]

    if fsigma_sigma is not None:
        total_sq = 0.0
        for k in range(grid.max_shell + 1):
            xk = xk_by_shell.get(k)
            if xk is None:
                xk = xk_norm(F, k)
            total_sq += 2.0 ** (2.0 * fsigma_sigma * k) * xk**2
        rows.append(
            (name, -1, "Fsigma", f"sigma={fsigma_sigma:g}", math.sqrt(total_sq))
        )
    return rows


def lemma_diagnostics(
    ensemble,
    directions: DirectionSet,
    shells=None,
    t_window: float = 1.0,
    mass_floor: float = 1e-12,
    fsigma_sigma: float | None = None,
) -> NormReport:
    """Ratio statistics probing k-uniformity of the directional estimates.

    For every ensemble member and shell k with mass, reports (relative to the
    shell norm) the local-smoothing ratio R2, the maximal-function ratio R3,
    the time-slice ratio R4, the j-section sanity R1 and the shell norm
    itself; per-(k, quantity) maxima are appended with id 'max'. Passing
    fsigma_sigma adds one whole-trajectory Fsigma row per member. Members may
    be Trajectory objects, SpaceTimeSpectrum objects, or (id, member) pairs,
    and are processed independently (in parallel when SMAP_THREADS allows).
    """
    members = []
    for i, entry in enumerate(ensemble):
        if isinstance(entry, tuple):
            members.append((str(entry[0]), entry[1]))
        else:
            members.append((f"member{i}", entry))
    if not members:
        raise EmptyEnsemble("ensemble is empty")

    report = NormReport(
        kind="lemma_diagnostics",
        columns=["trajectory_id", "k", "quantity", "direction", "value"],
        meta={"t_window": t_window, "num_members": len(members)},
    )
    if shells is not None:
        report.meta["shells"] = ",".join(str(k) for k in shells)

    def process(pair):
        return _member_rows(
            pair[0], pair[1], directions, shells, t_window, mass_floor, fsigma_sigma
        )

    workers = min(fft_workers(), len(members))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            row_blocks = list(pool.map(process, members))
    else:
        row_blocks = [process(pair) for pair in members]

    maxima = {}
    for block in row_blocks:
        for row in block:
            report.add(*row)
            if row[2] in ("R1", "R2", "R3", "R4"):
                key = (row[1], row[2])
                maxima[key] = max(maxima.get(key, 0.0), row[4])
    for (k, quantity), value in sorted(maxima.items()):
        report.add("max", k, quantity, "-", value)
    return report


def ratio_slope(report: NormReport, quantity: str) -> float:
    """Least-squares slope of log2(per-k max ratio) against k."""
    ks, vals = [], []
    for row in report.rows:
        if row[0] == "max" and row[2] == quantity and row[4] > 0.0:
            ks.append(row[1])
            vals.append(math.log2(row[4]))
    if len(ks) < 2:
        raise ValueError(f"not enough shells with data for {quantity}")
    ks = np.asarray(ks, dtype=np.float64)
    vals = np.asarray(vals)
    return float(np.polyfit(ks, vals, 1)[0])


def pooled_max_slope(report: NormReport, quantities=("R2", "R3", "R4")) -> float:
    """Slope of log2 of the per-k maximum pooled across the given ratios."""
    pooled = {}
    for row in report.rows:
        if row[0] == "max" and row[2] in quantities and row[4] > 0.0:
            pooled[row[1]] = max(pooled.get(row[1], 0.0), row[4])
    if len(pooled) < 2:
        raise ValueError("not enough shells with data")
    ks = np.array(sorted(pooled), dtype=np.float64)
    vals = np.array([math.log2(pooled[int(k)]) for k in ks])
    return float(np.polyfit(ks, vals, 1)[0])
