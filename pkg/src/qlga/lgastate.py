"""Single-particle quantum lattice gas on a periodic 1D lattice.

A state is an amplitude field ``psi[x, a]`` over sites ``x`` in ``0..N-1`` and
velocity index ``a`` in ``{0, 1}`` (velocity -1 and +1). Flattened, site-major
ordering gives index ``2*x + a``, so velocity is the least significant bit.

One timestep advects, ``(x, v) -> (x + v, v)``, then applies the scattering
matrix ``S(s) = [[cos s, i sin s], [i sin s, cos s]]`` at every site.
"""

from dataclasses import dataclass

import numpy as np

from qlga import kernels

NORM_TOL = 1e-10
STEP_NORM_TOL = 1e-12

VELOCITIES = (-1, +1)


def velocity_index(v):
    """Map a velocity in ``{-1, +1}`` to its storage index."""
    if v == -1:
        return 0
    if v == 1:
        return 1
    raise ValueError(f"velocity must be -1 or +1, got {v!r}")


def check_lattice_size(N):
    if int(N) != N or N < 2:
        raise ValueError(f"lattice size must be an integer >= 2, got {N!r}")
    return int(N)


def canonical_angle(s):
    """Reduce a scattering angle to ``[0, 2*pi)`` for reporting."""
    if not np.isfinite(s):
        raise ValueError(f"scattering angle must be finite, got {s!r}")
    return float(np.mod(s, 2 * np.pi))


def scatter_matrix(s):
    c, sn = np.cos(s), np.sin(s)
    return np.array([[c, 1j * sn], [1j * sn, c]])


@dataclass(frozen=True)
class QlgaState:
    """Normalised amplitude field of shape ``(N, 2)``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise ValueError(f"amplitudes must have shape (N, 2), got {amps.shape}")
        check_lattice_size(amps.shape[0])
        norm = np.sum(np.abs(amps) ** 2)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised: <psi|psi> = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def N(self):
        return self.amplitudes.shape[0]

    @property
    def vector(self):
        """Flattened amplitudes in site-major order ``2*x + a``."""
        return self.amplitudes.reshape(-1)

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=np.complex128)
        if vec.ndim != 1 or vec.size % 2:
            raise ValueError("flattened state must be 1D with even length")
        return cls(vec.reshape(-1, 2))

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def __getitem__(self, key):
        x, v = key
        return self.amplitudes[x, velocity_index(v)]


def _state_unchecked(amps):
    # Kernel output is unitary up to rounding; skip the O(N) norm check.
    st = object.__new__(QlgaState)
    amps = np.ascontiguousarray(amps)
    amps.setflags(write=False)
    object.__setattr__(st, "amplitudes", amps)
    return st


def make_initial(N, kind="symmetric", *, x0=0, velocity=+1, width=1.0, momentum=0.0):
    """Build an initial state.

    ``kind`` is one of ``"delta"`` (amplitude 1 at ``(x0, velocity)``),
    ``"symmetric"`` (``1/sqrt 2`` on both velocities at ``x0``), ``"gaussian"``
    (a wave packet of the given ``width`` and ``momentum`` centred on ``x0``,
    split equally over both velocities) or ``"uniform"`` (the stationary
    uniform eigenstate, ``x0`` ignored).
    """
    N = check_lattice_size(N)
    if kind != "uniform" and not (0 <= x0 < N and int(x0) == x0):
        raise ValueError(f"x0 must lie in 0..{N - 1}, got {x0!r}")
    amps = np.zeros((N, 2), dtype=np.complex128)
    if kind == "delta":
        amps[int(x0), velocity_index(velocity)] = 1.0
    elif kind == "symmetric":
        amps[int(x0), :] = 1 / np.sqrt(2)
    elif kind == "gaussian":
        if not width > 0:
            raise ValueError(f"width must be positive, got {width!r}")
        x = np.arange(N)
        env = np.exp(-((x - x0) ** 2) / (4 * width**2)) * np.exp(1j * momentum * x)
        amps[:, 0] = env
        amps[:, 1] = env
        amps /= np.sqrt(np.sum(np.abs(amps) ** 2))
    elif kind == "uniform":
        amps[:, :] = 1 / np.sqrt(2 * N)
    else:
        raise ValueError(f"unknown initial state kind {kind!r}")
    return QlgaState(amps)


def uniform_eigenstate(N):
    """Uniform in x with velocity part (1, 1)/sqrt 2; P_t is 1/N for all t."""
    return make_initial(N, "uniform")


def advect(state):
    amps = state.amplitudes
    out = np.empty_like(amps)
    out[:, 0] = np.roll(amps[:, 0], -1)
    out[:, 1] = np.roll(amps[:, 1], 1)
    return _state_unchecked(out)


def unadvect(state):
    """Inverse of :func:`advect`: shift each velocity component back one site."""
    amps = state.amplitudes
    out = np.empty_like(amps)
    out[:, 0] = np.roll(amps[:, 0], 1)
    out[:, 1] = np.roll(amps[:, 1], -1)
    return _state_unchecked(out)


def scatter(state, s):
    return _state_unchecked(state.amplitudes @ scatter_matrix(s).T)


def _check_drift(before, after, tol):
    drift = abs(after.norm() - before.norm())
    if drift > tol:
        raise ArithmeticError(f"norm drifted by {drift:.3e} (allowed {tol:.1e})")
    return after


def step(state, s, check=False):
    """One timestep: advection then scattering."""
    out = _state_unchecked(kernels.qlga_step(state.amplitudes, np.cos(s), np.sin(s)))
    return _check_drift(state, out, STEP_NORM_TOL) if check else out


def evolve(state, s, t, check=False):
    """``t`` timesteps; with ``check`` the norm may drift by at most ``t * 1e-13``."""
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t!r}")
    if t == 0:
        return state
    out = _state_unchecked(kernels.qlga_evolve(state.amplitudes, np.cos(s), np.sin(s), int(t)))
    return _check_drift(state, out, t * 1e-13) if check else out


def position_distribution(state):
    """P(x) = |psi_{x,-1}|^2 + |psi_{x,+1}|^2."""
    amps = state.amplitudes
    return (amps.real**2 + amps.imag**2).sum(axis=1)


def advection_permutation(N):
    """The 2N x 2N advection matrix in site-major flattened coordinates."""
    N = check_lattice_size(N)
    P = np.zeros((2 * N, 2 * N))
    for x in range(N):
        P[2 * ((x - 1) % N), 2 * x] = 1.0
        P[2 * ((x + 1) % N) + 1, 2 * x + 1] = 1.0
    return P


def dense_unitary(N, s):
    """Full single-step operator as a dense ``2N x 2N`` matrix.

    Built as ``kron(I_N, S) @ P_advect``, independently of the stepping
    kernels, so it can serve as their oracle.
    """
    N = check_lattice_size(N)
    U = np.kron(np.eye(N), scatter_matrix(s)) @ advection_permutation(N)
    err = np.max(np.abs(U.conj().T @ U - np.eye(2 * N)))
    if err > NORM_TOL:
        raise ArithmeticError(f"dense unitary fails U^dag U = I by {err:.3e}")
    return U


def leading_front(P, x0=0):
    """Displacement ``d`` in ``0..N//2`` of the highest site of ``P`` right of ``x0``.

    For a reflection-symmetric state this is the distance the probability
    peak has travelled in either direction.
    """
    P = np.asarray(P)
    N = P.size
    d = np.arange(N // 2 + 1)
    return int(d[np.argmax(P[(x0 + d) % N])])
