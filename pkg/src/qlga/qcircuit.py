"""Gate-level circuits: state-vector simulation, QFT, shifts and the compiled QLGA step.

Qubit order is little-endian: qubit ``j`` has weight ``2**j`` in the basis
index. In the QLGA step circuit the position register is qubits ``0..n-1``
and the velocity qubit is ``n`` (value 1 means velocity +1), so the circuit
index of site ``x`` with velocity bit ``a`` is ``x + a * 2**n``. The lattice
module flattens the same pair as ``2*x + a``; :func:`lga_to_circuit_index`
is the bijection between the two.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from qlga.lgastate import dense_unitary, scatter_matrix

KINDS = ("H", "X", "PHASE", "SCATTER", "FCNOT", "SWAP")
_ARITY = {"H": 1, "X": 1, "PHASE": 1, "SCATTER": 1, "FCNOT": 2, "SWAP": 2}


@dataclass(frozen=True)
class Gate:
    """One elementary gate.

    ``param`` is the angle for PHASE (``diag(1, e^{i param})``) and SCATTER;
    ``table`` is ``(f(0), f(1))`` for FCNOT, whose targets are
    ``(query, response)``. Controls fire on value 1.
    """

    kind: str
    targets: tuple
    controls: tuple = ()
    param: float | None = None
    table: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if len(self.targets) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit in {self.kind} gate: {qubits}")
        if min(qubits) < 0:
            raise ValueError("qubit indices must be nonnegative")
        if self.kind in ("PHASE", "SCATTER") and self.param is None:
            raise ValueError(f"{self.kind} needs an angle")
        if self.kind == "FCNOT":
            if self.table is None or len(self.table) != 2 or set(self.table) - {0, 1}:
                raise ValueError("FCNOT needs a truth table (f(0), f(1)) of bits")
            object.__setattr__(self, "table", tuple(int(b) for b in self.table))

    @property
    def qubits(self):
        return self.targets + self.controls

    def matrix(self):
        """Unitary on the targets, local index ``sum bit(targets[k]) * 2**k``."""
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        if self.kind == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind == "PHASE":
            return np.diag([1.0, np.exp(1j * self.param)])
        if self.kind == "SCATTER":
            return scatter_matrix(self.param).astype(complex)
        if self.kind == "SWAP":
            M = np.zeros((4, 4), dtype=complex)
            for i in range(4):
                M[((i & 1) << 1) | (i >> 1), i] = 1
            return M
        M = np.zeros((4, 4), dtype=complex)
        for x, b in product((0, 1), repeat=2):
            M[x + 2 * (b ^ self.table[x]), x + 2 * b] = 1
        return M

    def inverse(self):
        if self.kind in ("PHASE", "SCATTER"):
            if self.kind == "PHASE":
                return Gate("PHASE", self.targets, self.controls, -self.param)
            # S(s)^-1 = S(-s)
            return Gate("SCATTER", self.targets, self.controls, -self.param)
        return self

    def controlled(self, control):
        return Gate(self.kind, self.targets, self.controls + (control,), self.param, self.table)

    def relabel(self, mapping):
        return Gate(
            self.kind,
            tuple(mapping[q] for q in self.targets),
            tuple(mapping[q] for q in self.controls),
            self.param,
            self.table,
        )


def format_gate(g):
    if g.kind == "FCNOT":
        params = f"{g.table[0]},{g.table[1]}"
    elif g.param is not None:
        params = f"{g.param:.12g}"
    else:
        params = ""
    line = f"{g.kind}({params}) {','.join(map(str, g.targets))}"
    if g.controls:
        line += f" [{','.join(map(str, g.controls))}]"
    return line


@dataclass
class Circuit:
    width: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("circuit width must be >= 1")
        for g in self.gates:
            self._check(g)

    def _check(self, g):
        if max(g.qubits) >= self.width:
            raise ValueError(f"gate {format_gate(g)} exceeds circuit width {self.width}")

    def append(self, g):
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates):
        for g in gates:
            self.append(g)
        return self

    def inverse(self):
        return Circuit(self.width, [g.inverse() for g in reversed(self.gates)])

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def pretty(self):
        """One gate per line, ``KIND(params) targets [controls]``."""
        return "".join(format_gate(g) + "\n" for g in self.gates)


# -- simulation -------------------------------------------------------------


def basis_state(m, index):
    v = np.zeros(2**m, dtype=complex)
    v[index] = 1.0
    return v


def _apply(tensor, g, m):
    # tensor has shape (2,)*m + (batch,); qubit q lives on axis m-1-q
    idx = [slice(None)] * (m + 1)
    for q in g.controls:
        idx[m - 1 - q] = 1
    idx = tuple(idx)
    sub = tensor[idx]
    kept = [ax for ax in range(m + 1) if not isinstance(idx[ax], int)]
    src = [kept.index(m - 1 - q) for q in reversed(g.targets)]
    k = len(g.targets)
    moved = np.moveaxis(sub, src, range(k))
    shape = moved.shape
    out = (g.matrix() @ moved.reshape(2**k, -1)).reshape(shape)
    tensor[idx] = np.moveaxis(out, range(k), src)


def _check_width(v, m):
    if v.shape[0] != 2**m:
        raise ValueError(f"state of length {v.shape[0]} does not fit {m} qubits")


def apply_gate(v, g, width=None):
    """Apply one gate to a state vector (or to the columns of a 2D array)."""
    v = np.array(v, dtype=complex)
    m = width if width is not None else int(round(np.log2(v.shape[0])))
    _check_width(v, m)
    if max(g.qubits) >= m:
        raise IndexError(f"gate {format_gate(g)} addresses a qubit outside 0..{m - 1}")
    batch = v.reshape(2**m, -1)
    tensor = batch.reshape((2,) * m + (batch.shape[1],))
    _apply(tensor, g, m)
    return tensor.reshape(v.shape)


def apply_circuit(v, c):
    v = np.array(v, dtype=complex)
    _check_width(v, c.width)
    m = c.width
    tensor = v.reshape((2,) * m + (-1,))
    for g in c.gates:
        _apply(tensor, g, m)
    return tensor.reshape(v.shape)


def circuit_matrix(c):
    """Dense unitary of a circuit; column ``j`` is the image of basis state ``j``."""
    return apply_circuit(np.eye(2**c.width, dtype=complex), c)


def measure_probabilities(v, qubit):
    """Exact probabilities ``(p0, p1)`` of reading ``qubit``."""
    v = np.asarray(v)
    m = int(round(np.log2(v.size)))
    probs = np.abs(v.reshape((2,) * m)) ** 2
    axes = tuple(ax for ax in range(m) if ax != m - 1 - qubit)
    p = probs.sum(axis=axes)
    return float(p[0]), float(p[1])


def sample_measurements(v, qubit, shots, seed=None):
    """Seeded sampling of one qubit; returns counts ``[n0, n1]``."""
    p0, p1 = measure_probabilities(v, qubit)
    rng = np.random.default_rng(seed)
    ones = rng.binomial(shots, min(1.0, max(0.0, p1 / (p0 + p1))))
    return [int(shots - ones), int(ones)]


# -- Fourier transform and shifts ------------------------------------------


def _qft_core(n):
    gates = []
    for j in reversed(range(n)):
        gates.append(Gate("H", (j,)))
        for k in reversed(range(j)):
            gates.append(Gate("PHASE", (j,), (k,), np.pi / 2 ** (j - k)))
    return gates


def _bit_reversal_swaps(n):
    return [Gate("SWAP", (i, n - 1 - i)) for i in range(n // 2)]


def qft_circuit(n):
    """F_N with ``(F_N)[j, k] = exp(2 pi i j k / N) / sqrt(N)``, ``N = 2**n``.

    n Hadamards, n(n-1)/2 controlled phases and floor(n/2) swaps.
    """
    if n < 1:
        raise ValueError("qft_circuit needs n >= 1")
    return Circuit(n, _qft_core(n) + _bit_reversal_swaps(n))


def dft_matrix(n):
    N = 2**n
    j = np.arange(N)
    return np.exp(2j * np.pi * np.outer(j, j) / N) / np.sqrt(N)


def phase_diag_circuit(n, k):
    """``diag(omega**(k*x))`` with ``omega = exp(2 pi i / N)`` as n single-qubit phases."""
    if n < 1:
        raise ValueError("phase_diag_circuit needs n >= 1")
    N = 2**n
    return Circuit(n, [Gate("PHASE", (j,), (), 2 * np.pi * k * 2**j / N) for j in range(n)])


def _fourier_parts(n, explicit_swaps):
    """Gate lists ``(F, F_dagger, qubit map for the diagonal)``.

    With ``explicit_swaps`` F is the full QFT. Otherwise F = R C is replaced
    by the swap-free ``R C R`` and the diagonal is relabelled by bit reversal,
    which leaves ``F D F_dagger`` unchanged because ``R R = I``.
    """
    if explicit_swaps:
        fwd = qft_circuit(n).gates
        dmap = list(range(n))
    else:
        rev = [n - 1 - q for q in range(n)]
        fwd = [g.relabel(rev) for g in _qft_core(n)]
        dmap = rev
    inv = [g.inverse() for g in reversed(fwd)]
    return fwd, inv, dmap


def _diag(n, k, dmap, control=None):
    gates = [g.relabel(dmap) for g in phase_diag_circuit(n, k).gates]
    if control is not None:
        gates = [g.controlled(control) for g in gates]
    return gates


def shift_circuit(n, direction, explicit_swaps=True):
    """Cyclic shift on n qubits through the Fourier basis.

    ``left`` maps ``|x> -> |x-1>`` as ``F diag(omega**x) F_dagger``; ``right``
    maps ``|x> -> |x+1>`` as ``F_dagger diag(omega**x) F``. Without explicit
    swaps the right shift is built as ``F diag(omega**-x) F_dagger`` instead,
    the only form that stays swap-free.
    """
    if n < 1:
        raise ValueError("shift_circuit needs n >= 1")
    fwd, inv, dmap = _fourier_parts(n, explicit_swaps)
    if direction == "left":
        gates = inv + _diag(n, 1, dmap) + fwd
    elif direction == "right":
        if explicit_swaps:
            gates = fwd + _diag(n, 1, dmap) + inv
        else:
            gates = inv + _diag(n, -1, dmap) + fwd
    else:
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    return Circuit(n, gates)


def cyclic_shift_matrix(n, offset):
    """Permutation ``|x> -> |x + offset mod N>``."""
    N = 2**n
    P = np.zeros((N, N))
    P[(np.arange(N) + offset) % N, np.arange(N)] = 1
    return P


def qlga_step_circuit(n, s, merge_qft=False, explicit_swaps=False):
    """One QLGA timestep on ``n + 1`` qubits.

    Left shift of the position register, then a right shift by two
    conditioned on the velocity qubit, then scattering on the velocity qubit.
    Only the diagonal phases of the conditional shift are controlled; the
    Fourier transforms around them cancel when the control is 0.

    ``merge_qft`` drops the adjacent ``F`` / ``F_dagger`` pair between the two
    shifts. ``explicit_swaps`` builds every transform with its swap network;
    the default relabels qubits instead, so the gate total is exactly
    ``2n^2 + 4n + 1`` (``n^2 + 3n + 1`` merged).
    """
    if n < 1:
        raise ValueError("qlga_step_circuit needs n >= 1")
    vel = n
    fwd, inv, dmap = _fourier_parts(n, explicit_swaps)
    gates = inv + _diag(n, 1, dmap)
    if not merge_qft:
        gates += fwd + inv
    gates += _diag(n, -2, dmap, control=vel) + fwd
    gates.append(Gate("SCATTER", (vel,), (), float(s)))
    return Circuit(n + 1, gates)


def lga_to_circuit_index(n):
    """``perm[2*x + a] = x + a * 2**n`` for the ``2 * 2**n`` (site, velocity) pairs."""
    N = 2**n
    i = np.arange(2 * N)
    return (i // 2) + (i % 2) * N


def verify_against_dense(n, s, merge_qft=False, explicit_swaps=False):
    """Max entrywise error between the compiled step and ``dense_unitary(2**n, s)``."""
    if not 1 <= n <= 6:
        raise ValueError(f"verify_against_dense is limited to 1 <= n <= 6, got {n}")
    U_circ = circuit_matrix(qlga_step_circuit(n, s, merge_qft, explicit_swaps))
    perm = lga_to_circuit_index(n)
    U_lga = dense_unitary(2**n, s)
    return float(np.max(np.abs(U_circ[np.ix_(perm, perm)] - U_lga)))


# -- counting ---------------------------------------------------------------


@dataclass
class GateCountReport:
    width: int
    counts: dict
    total: int
    controlled: int
    swap_cnot_equivalent: int

    def to_dict(self):
        return asdict(self)


def gate_key(g):
    return "C" * len(g.controls) + g.kind


def gate_count(c):
    counts = {}
    for g in c.gates:
        key = gate_key(g)
        counts[key] = counts.get(key, 0) + 1
    swaps = sum(v for k, v in counts.items() if k.endswith("SWAP"))
    return GateCountReport(
        width=c.width,
        counts=dict(sorted(counts.items())),
        total=len(c.gates),
        controlled=sum(1 for g in c.gates if g.controls),
        swap_cnot_equivalent=3 * swaps,
    )


def quadratic_count_fit(n_values, s=np.pi / 4, **step_kwargs):
    """Fit ``a n^2 + b n + c`` to step-circuit totals at the first three n.

    Returns ``(coeffs, totals, residuals)``; coefficients are exact fractions
    and residuals are exact integers (as Fractions) for every n given.
    """
    n_values = list(n_values)
    if len(n_values) < 3:
        raise ValueError("need at least three n values")
    totals = {n: gate_count(qlga_step_circuit(n, s, **step_kwargs)).total for n in n_values}
    (n0, n1, n2) = n_values[:3]
    A = [[Fraction(n * n), Fraction(n), Fraction(1)] for n in (n0, n1, n2)]
    y = [Fraction(totals[n]) for n in (n0, n1, n2)]
    coeffs = _solve3(A, y)
    residuals = {
        n: totals[n] - (coeffs[0] * n * n + coeffs[1] * n + coeffs[2]) for n in n_values
    }
    return coeffs, totals, residuals


def _solve3(A, y):
    # exact Gaussian elimination on a 3x3 system of Fractions
    M = [row[:] + [v] for row, v in zip(A, y)]
    for i in range(3):
        piv = next(r for r in range(i, 3) if M[r][i] != 0)
        M[i], M[piv] = M[piv], M[i]
        for r in range(3):
            if r != i and M[r][i] != 0:
                f = M[r][i] / M[i][i]
                M[r] = [a - f * b for a, b in zip(M[r], M[i])]
    return tuple(M[i][3] / M[i][i] for i in range(3))


# -- the two-bit XOR problem ------------------------------------------------

QUERY, RESPONSE = 0, 1


def dj_circuit(f):
    """Evaluate ``f(0) XOR f(1)`` with a single FCNOT call; ``f = (f(0), f(1))``."""
    f = tuple(int(b) for b in f)
    if len(f) != 2 or set(f) - {0, 1}:
        raise ValueError(f"f must be a pair of bits, got {f!r}")
    return Circuit(
        2,
        [
            Gate("H", (QUERY,)),
            Gate("X", (RESPONSE,)),
            Gate("H", (RESPONSE,)),
            Gate("FCNOT", (QUERY, RESPONSE), table=f),
            Gate("H", (QUERY,)),
        ],
    )


def dj_query_distribution(f):
    v = apply_circuit(basis_state(2, 0), dj_circuit(f))
    return measure_probabilities(v, QUERY)


def classical_one_query_strategies():
    """Success probability of every deterministic one-query strategy.

    A strategy queries ``x`` and outputs ``g(answer)``; success is averaged
    over the four functions ``f``. Returns ``{(x, g0, g1): Fraction}``.
    """
    functions = list(product((0, 1), repeat=2))
    table = {}
    for x, g0, g1 in product((0, 1), repeat=3):
        g = (g0, g1)
        wins = sum(g[f[x]] == (f[0] ^ f[1]) for f in functions)
        table[(x, g0, g1)] = Fraction(wins, len(functions))
    return table


def classical_one_query_bound():
    return float(max(classical_one_query_strategies().values()))
