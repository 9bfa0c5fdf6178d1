"""Truncated multimode Fock space: layouts, states, operators, reductions.

A ModeLayout fixes an ordered set of labelled modes with per-mode cutoffs and
defines the row-major flattening between occupation tuples and flat indices.
Everything downstream (Hamiltonians, reductions, snapshots) speaks in terms of
a layout, so cutoff changes never touch call sites.
"""

import hashlib
import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (ConfigError, InvalidStateError, TruncationError)

SNAPSHOT_MAGIC = b"TPGS"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class ModeLayout:
    """Ordered labelled modes with cutoffs; cutoff d means levels 0..d-1."""

    labels: tuple
    cutoffs: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        cutoffs = tuple(int(c) for c in self.cutoffs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "cutoffs", cutoffs)
        if len(labels) != len(cutoffs):
            raise ConfigError("labels and cutoffs length mismatch")
        if len(set(labels)) != len(labels):
            raise ConfigError("duplicate mode labels: %r" % (labels,))
        if not labels:
            raise ConfigError("layout needs at least one mode")
        for c in cutoffs:
            if c < 1:
                raise ConfigError("cutoffs must be >= 1, got %r" % (cutoffs,))

    @property
    def dim(self):
        out = 1
        for c in self.cutoffs:
            out *= c
        return out

    @property
    def nmodes(self):
        return len(self.labels)

    def axis(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise ConfigError("no mode %r in layout %r" % (label, self.labels))

    def cutoff(self, label):
        return self.cutoffs[self.axis(label)]

    def index(self, occupations):
        """Flat row-major index of an occupation tuple."""
        if len(occupations) != self.nmodes:
            raise ConfigError("expected %d occupations, got %d"
                              % (self.nmodes, len(occupations)))
        idx = 0
        for n, c in zip(occupations, self.cutoffs):
            if not 0 <= n < c:
                raise ConfigError("occupation %d outside cutoff %d" % (n, c))
            idx = idx * c + n
        return idx

    def occupations(self, index):
        """Inverse of index()."""
        if not 0 <= index < self.dim:
            raise ConfigError("flat index %d outside dimension %d"
                              % (index, self.dim))
        out = []
        for c in reversed(self.cutoffs):
            out.append(index % c)
            index //= c
        return tuple(reversed(out))

    def restricted(self, keep):
        """Sub-layout of the kept labels, in this layout's order."""
        keep = set(keep)
        unknown = keep - set(self.labels)
        if unknown:
            raise ConfigError("unknown labels %r" % sorted(unknown))
        pairs = [(l, c) for l, c in zip(self.labels, self.cutoffs) if l in keep]
        if not pairs:
            raise ConfigError("must keep at least one mode")
        return ModeLayout(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


@dataclass
class StateVector:
    """Pure state over a layout, amplitudes in the layout's row-major basis."""

    layout: ModeLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.layout.dim,):
            raise InvalidStateError("amplitude shape %r does not match dim %d"
                                    % (amps.shape, self.layout.dim))
        self.amplitudes = amps

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        n = self.norm()
        if n == 0.0:
            raise InvalidStateError("cannot normalize the zero vector")
        return StateVector(self.layout, self.amplitudes / n)

    def tensor(self):
        """Amplitudes reshaped to one axis per mode."""
        return self.amplitudes.reshape(self.layout.cutoffs)

    def density(self):
        a = self.amplitudes
        return DensityOperator(self.layout, np.outer(a, a.conj()), validate=False)

    def top_level_mass(self, label):
        """Probability of the highest retained Fock level of one mode.

        This is the quantity the truncation audits watch: if it is not tiny the
        cutoff is biting.
        """
        ax = self.layout.axis(label)
        t = self.tensor()
        sl = [slice(None)] * self.layout.nmodes
        sl[ax] = self.layout.cutoffs[ax] - 1
        return float(np.sum(np.abs(t[tuple(sl)]) ** 2))

    def overlap(self, other):
        if other.layout != self.layout:
            raise ConfigError("layout mismatch in overlap")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass
class DensityOperator:
    """Mixed state over a layout. Hermiticity and unit trace are checked at
    construction; positivity is only checked on demand (it costs an eigensolve)."""

    layout: ModeLayout
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        d = self.layout.dim
        if m.shape != (d, d):
            raise InvalidStateError("matrix shape %r does not match dim %d"
                                    % (m.shape, d))
        self.matrix = m
        if self.validate:
            herm = np.abs(m - m.conj().T).max()
            if herm > 1e-10:
                raise InvalidStateError("matrix not Hermitian (max dev %.3e)" % herm)
            tr = np.trace(m).real
            if abs(tr - 1.0) > 1e-8:
                raise InvalidStateError("trace %.12f is not 1" % tr)

    def trace(self):
        return float(np.trace(self.matrix).real)

    def purity(self):
        return float(np.vdot(self.matrix, self.matrix).real)

    def validate_positive(self, tol=1e-10):
        w = np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2.0)
        if w.min() < -tol:
            raise InvalidStateError("negative eigenvalue %.3e" % w.min())
        return self

    def tensor(self):
        """Matrix reshaped to ket axes then bra axes, one per mode."""
        shape = self.layout.cutoffs + self.layout.cutoffs
        return self.matrix.reshape(shape)


@dataclass
class SparseOperator:
    """Sparse operator bound to a layout (CSR storage)."""

    layout: ModeLayout
    data: sp.csr_matrix

    def __post_init__(self):
        d = self.layout.dim
        m = sp.csr_matrix(self.data)
        if m.shape != (d, d):
            raise InvalidStateError("operator shape %r does not match dim %d"
                                    % (m.shape, d))
        self.data = m

    def dagger(self):
        return SparseOperator(self.layout, self.data.conj().T.tocsr())

    def apply(self, state):
        if state.layout != self.layout:
            raise ConfigError("layout mismatch in apply")
        return StateVector(self.layout, self.data @ state.amplitudes)

    def expectation(self, state):
        if isinstance(state, StateVector):
            return complex(np.vdot(state.amplitudes, self.data @ state.amplitudes))
        return complex((self.data @ state.matrix).diagonal().sum())

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            if other.layout != self.layout:
                raise ConfigError("layout mismatch in product")
            return SparseOperator(self.layout, (self.data @ other.data).tocsr())
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, SparseOperator):
            if other.layout != self.layout:
                raise ConfigError("layout mismatch in sum")
            return SparseOperator(self.layout, (self.data + other.data).tocsr())
        return NotImplemented

    def __rmul__(self, scalar):
        return SparseOperator(self.layout, (scalar * self.data).tocsr())


def _single_mode_lowering(cutoff):
    return sp.diags(np.sqrt(np.arange(1, cutoff)), 1, format="csr")


def build_ladder(layout, label):
    """Annihilation operator for one mode, embedded into the full space."""
    ax = layout.axis(label)
    mats = []
    for i, c in enumerate(layout.cutoffs):
        mats.append(_single_mode_lowering(c) if i == ax else sp.identity(c, format="csr"))
    full = mats[0]
    for m in mats[1:]:
        full = sp.kron(full, m, format="csr")
    return SparseOperator(layout, full)


def number_operator(layout, label):
    a = build_ladder(layout, label)
    return SparseOperator(layout, (a.data.conj().T @ a.data).tocsr())


def vacuum_state(layout):
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(layout, amps)


def basis_state(layout, occupations):
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[layout.index(occupations)] = 1.0
    return StateVector(layout, amps)


def coherent_state(cutoff, alpha, label="P", tail_tol=1e-8):
    """Truncated coherent state |alpha> on a single-mode layout.

    Fails with TruncationError when the discarded Poisson tail mass exceeds
    tail_tol, reporting the smallest adequate cutoff. The retained amplitudes
    are renormalized.
    """
    alpha = complex(alpha)
    nbar = abs(alpha) ** 2
    # Poisson weights by stable log accumulation
    n = np.arange(max(cutoff, 1))
    log_terms = n * np.log(nbar) - nbar if nbar > 0 else np.where(n == 0, 0.0, -np.inf)
    log_terms = log_terms - np.cumsum(np.log(np.maximum(n, 1)))
    probs = np.exp(log_terms)
    tail = 1.0 - probs[:cutoff].sum()
    if tail > tail_tol:
        need = cutoff
        while need < 16384:
            need = max(need + 1, int(need * 1.3))
            k = np.arange(need)
            lt = (k * np.log(nbar) - nbar) - np.cumsum(np.log(np.maximum(k, 1)))
            if 1.0 - np.exp(lt).sum() <= tail_tol:
                break
        raise TruncationError(
            "coherent state |alpha|=%.4g loses tail mass %.3e at cutoff %d"
            % (abs(alpha), tail, cutoff), mode=label, suggested_cutoff=need)
    phases = np.ones(cutoff, dtype=np.complex128)
    if alpha != 0:
        phase = alpha / abs(alpha) if abs(alpha) > 0 else 1.0
        phases = phase ** n[:cutoff]
    amps = np.sqrt(probs[:cutoff]) * phases
    amps = amps / np.linalg.norm(amps)
    return StateVector(ModeLayout((label,), (cutoff,)), amps)


def product_state(*states):
    """Tensor product of StateVectors with disjoint labels."""
    labels = []
    cutoffs = []
    amps = np.ones(1, dtype=np.complex128)
    for s in states:
        labels.extend(s.layout.labels)
        cutoffs.extend(s.layout.cutoffs)
        amps = np.kron(amps, s.amplitudes)
    return StateVector(ModeLayout(tuple(labels), tuple(cutoffs)), amps)


def partial_trace(state, keep):
    """Reduced density operator over the kept labels.

    Accepts a StateVector or DensityOperator; the result's mode order follows
    the parent layout, not the order of `keep`.
    """
    layout = state.layout
    sub = layout.restricted(keep)
    keep_axes = [layout.axis(l) for l in sub.labels]
    drop_axes = [i for i in range(layout.nmodes) if i not in keep_axes]
    if isinstance(state, StateVector):
        t = state.tensor()
        perm = keep_axes + drop_axes
        t = np.transpose(t, perm)
        kd = sub.dim
        dd = layout.dim // kd
        m = t.reshape(kd, dd)
        rho = m @ m.conj().T
    else:
        t = state.tensor()
        nm = layout.nmodes
        for ax in sorted(drop_axes, reverse=True):
            t = np.trace(t, axis1=ax, axis2=ax + nm)
            nm -= 1
        rho = t.reshape(sub.dim, sub.dim)
    return DensityOperator(sub, rho, validate=False)


def partial_transpose(rho, transposed):
    """Partial transpose over the given labels; returns a plain matrix since
    the result is generally not a state."""
    layout = rho.layout
    axes = [layout.axis(l) for l in transposed]
    if not axes:
        raise ConfigError("must transpose at least one mode")
    t = rho.tensor()
    nm = layout.nmodes
    perm = list(range(2 * nm))
    for ax in axes:
        perm[ax], perm[nm + ax] = perm[nm + ax], perm[ax]
    return np.transpose(t, perm).reshape(layout.dim, layout.dim)


# ---------------------------------------------------------------------------
# snapshot container: little-endian binary amplitudes plus a JSON sidecar

def _snapshot_payload(state):
    head = struct.pack("<4sHH", SNAPSHOT_MAGIC, SNAPSHOT_VERSION, state.layout.nmodes)
    head += struct.pack("<%dI" % state.layout.nmodes, *state.layout.cutoffs)
    body = np.ascontiguousarray(state.amplitudes, dtype="<c16").tobytes()
    return head + body


def write_snapshot(state, path, params=None):
    """Write amplitudes to `path` and a manifest to `path + '.manifest.json'`.

    The manifest records labels, cutoffs, caller params, the norm and the
    payload sha256 so a reader can detect bit rot or a mismatched file.
    """
    payload = _snapshot_payload(state)
    with open(path, "wb") as fh:
        fh.write(payload)
    manifest = {
        "format": SNAPSHOT_MAGIC.decode("ascii"),
        "version": SNAPSHOT_VERSION,
        "labels": list(state.layout.labels),
        "cutoffs": list(state.layout.cutoffs),
        "norm": state.norm(),
        "sha256": hashlib.sha256(payload).hexdigest(),
        "params": dict(params or {}),
    }
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def read_snapshot(path):
    """Read a snapshot, returning (StateVector, manifest dict).

    The sidecar manifest is required for labels; its sha256 must match the
    payload. A missing sidecar falls back to generic labels and no checksum
    verification, which is only acceptable for scratch files.
    """
    with open(path, "rb") as fh:
        payload = fh.read()
    if len(payload) < 8 or payload[:4] != SNAPSHOT_MAGIC:
        raise InvalidStateError("%s is not a snapshot file" % path)
    version, nmodes = struct.unpack("<HH", payload[4:8])
    if version != SNAPSHOT_VERSION:
        raise InvalidStateError("unsupported snapshot version %d" % version)
    off = 8 + 4 * nmodes
    cutoffs = struct.unpack("<%dI" % nmodes, payload[8:off])
    dim = 1
    for c in cutoffs:
        dim *= c
    amps = np.frombuffer(payload[off:], dtype="<c16")
    if amps.size != dim:
        raise InvalidStateError("snapshot payload holds %d amplitudes, expected %d"
                                % (amps.size, dim))
    manifest = None
    side = path + ".manifest.json"
    if os.path.exists(side):
        with open(side, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        digest = hashlib.sha256(payload).hexdigest()
        if manifest.get("sha256") not in (None, digest):
            raise InvalidStateError("snapshot checksum mismatch for %s" % path)
        if tuple(manifest.get("cutoffs", cutoffs)) != cutoffs:
            raise InvalidStateError("manifest cutoffs disagree with payload")
        labels = tuple(manifest["labels"])
    else:
        labels = tuple("m%d" % i for i in range(nmodes))
    state = StateVector(ModeLayout(labels, cutoffs), amps.astype(np.complex128))
    return state, (manifest or {})
