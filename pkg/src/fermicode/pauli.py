"""Phase-free Pauli operators on edge qubits.

Signs and phases are dropped throughout, so the product of two operators is
just the XOR of their X and Z bit vectors and every operator squares to the
identity.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2

__all__ = [
    "PauliOperator",
    "SearchBudget",
    "multiply",
    "commutes",
    "stack",
    "syndrome",
    "min_weight_in_coset",
    "format_check_matrix",
    "parse_check_matrix",
]


def _bits(a, n: int | None = None) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(a, dtype=np.uint8) & 1)
    if out.ndim != 1 or (n is not None and out.shape[0] != n):
        raise ValueError("bit vector has the wrong shape")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """Pauli string with one (x, z) bit pair per qubit; Y is x = z = 1."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = _bits(self.x)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", _bits(self.z, x.shape[0]))

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        zero = np.zeros(n, dtype=np.uint8)
        return cls(zero, zero)

    @classmethod
    def from_sparse(cls, n: int, x: Iterable[int] = (), z: Iterable[int] = (), y: Iterable[int] = ()):
        """Build from qubit index lists; repeated indices cancel."""
        xb = np.zeros(n, dtype=np.uint8)
        zb = np.zeros(n, dtype=np.uint8)
        for q in x:
            xb[q] ^= 1
        for q in z:
            zb[q] ^= 1
        for q in y:
            xb[q] ^= 1
            zb[q] ^= 1
        return cls(xb, zb)

    @classmethod
    def from_symplectic(cls, v: np.ndarray) -> "PauliOperator":
        v = np.asarray(v, dtype=np.uint8)
        n = v.shape[0] // 2
        return cls(v[:n], v[n:])

    @property
    def n_qubits(self) -> int:
        return int(self.x.shape[0])

    @property
    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x | self.z)

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def letter(self, q: int) -> str:
        return "IXZY"[int(self.x[q]) + 2 * int(self.z[q])]

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        terms = " ".join(f"{self.letter(q)}{q}" for q in self.support)
        return f"PauliOperator(n={self.n_qubits}, {terms or 'I'})"

    def to_line(self) -> str:
        xs = ",".join(str(q) for q in np.flatnonzero(self.x))
        zs = ",".join(str(q) for q in np.flatnonzero(self.z))
        return f"X:{{{xs}}};Z:{{{zs}}}"


def _check_sizes(p: PauliOperator, q: PauliOperator) -> None:
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"dimension mismatch: {p.n_qubits} vs {q.n_qubits} qubits")


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    _check_sizes(p, q)
    return PauliOperator(p.x ^ q.x, p.z ^ q.z)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    _check_sizes(p, q)
    s = np.count_nonzero(p.x & q.z) + np.count_nonzero(p.z & q.x)
    return s % 2 == 0


def stack(ops: Sequence[PauliOperator], n: int | None = None) -> np.ndarray:
    """Symplectic matrix ``[X | Z]`` with one row per operator."""
    if not ops:
        if n is None:
            raise ValueError("need n for an empty operator list")
        return np.zeros((0, 2 * n), dtype=np.uint8)
    return np.stack([op.symplectic for op in ops])


def syndrome(ops: np.ndarray, checks: np.ndarray) -> np.ndarray:
    """Anticommutation bits of each row of ``ops`` against each row of ``checks``.

    Both arguments are symplectic matrices (or a single vector for ``ops``).
    """
    ops = np.asarray(ops, dtype=np.uint8)
    checks = np.asarray(checks, dtype=np.uint8)
    n = checks.shape[1] // 2
    swapped = np.concatenate([checks[:, n:], checks[:, :n]], axis=1)
    # float matmul goes through BLAS; counts stay far below 2**53
    counts = ops.astype(np.float64) @ swapped.T.astype(np.float64)
    return (counts.astype(np.int64) & 1).astype(np.uint8)


@dataclass(frozen=True)
class SearchBudget:
    """Effort limits for coset minimisation.

    ``exhaustive_cutoff`` bounds the generator count for the exact search;
    larger neighbourhoods fall back to greedy descent from ``restarts``
    seeded random starting points.
    """

    exhaustive_cutoff: int = 20
    restarts: int = 16
    seed: int = 0


def _lex_smallest(cand_x: np.ndarray, cand_z: np.ndarray) -> int:
    # lexicographic order on the (x bits, z bits) sequence, 0 < 1
    keys = np.concatenate([cand_x, cand_z], axis=1)
    order = np.lexsort(keys.T[::-1])
    return int(order[0])


def _subset_sums(gens_x: np.ndarray, gens_z: np.ndarray):
    """All XOR combinations of packed generator rows, index i <-> bitmask i."""
    w = gens_x.shape[1]
    sx = np.zeros((1, w), dtype=np.uint64)
    sz = np.zeros((1, w), dtype=np.uint64)
    for k in range(gens_x.shape[0]):
        sx = np.concatenate([sx, sx ^ gens_x[k]])
        sz = np.concatenate([sz, sz ^ gens_z[k]])
    return sx, sz


def _exhaustive(bx, bz, gx, gz):
    """Exact minimum over all 2^k products by meet-in-the-middle."""
    k = gx.shape[0]
    h = k // 2
    ax, az = _subset_sums(gx[:h], gz[:h])
    ax ^= bx
    az ^= bz
    cx, cz = _subset_sums(gx[h:], gz[h:])
    best = None
    cands: list[tuple[int, int]] = []
    chunk = max(1, (1 << 20) // max(1, cx.shape[0]))
    for s in range(0, ax.shape[0], chunk):
        px = ax[s : s + chunk, None, :] ^ cx[None, :, :]
        pz = az[s : s + chunk, None, :] ^ cz[None, :, :]
        wts = gf2.popcount(px | pz)
        m = int(wts.min())
        if best is None or m < best:
            best = m
            cands = []
        if m == best:
            ii, jj = np.nonzero(wts == m)
            cands.extend(zip((ii + s).tolist(), jj.tolist()))
    return best, cands, (ax, az, cx, cz)


def _greedy(bx, bz, gx, gz, budget: SearchBudget):
    """Best-improvement descent with seeded random restarts."""
    rng = np.random.default_rng(budget.seed)
    k = gx.shape[0]

    def descend(x, z):
        w = int(gf2.popcount(x | z))
        while True:
            tx = x[None, :] ^ gx
            tz = z[None, :] ^ gz
            wts = gf2.popcount(tx | tz)
            j = int(np.argmin(wts))
            if wts[j] >= w:
                return x, z, w
            x, z, w = tx[j], tz[j], int(wts[j])

    results = [descend(bx, bz)]
    for _ in range(budget.restarts):
        mask = rng.random(k) < 0.5
        x = bx ^ np.bitwise_xor.reduce(gx[mask], axis=0) if mask.any() else bx.copy()
        z = bz ^ np.bitwise_xor.reduce(gz[mask], axis=0) if mask.any() else bz.copy()
        results.append(descend(x, z))
    return results


def min_weight_in_coset(
    base: PauliOperator,
    generators: Sequence[PauliOperator],
    budget: SearchBudget = SearchBudget(),
) -> PauliOperator:
    """Lowest-weight element of ``base * <generators>`` found within ``budget``.

    Exact when there are at most ``budget.exhaustive_cutoff`` generators.
    Ties go to the lexicographically smallest (x, z) bit pattern, so the result
    is reproducible.
    """
    gens = [g for g in generators if not g.is_identity()]
    for g in gens:
        _check_sizes(base, g)
    if not gens:
        return base
    window = np.flatnonzero(
        base.x | base.z | np.bitwise_or.reduce([g.x | g.z for g in gens], axis=0)
    )
    bx = gf2.pack(base.x[window])
    bz = gf2.pack(base.z[window])
    gx = gf2.pack(np.stack([g.x[window] for g in gens]))
    gz = gf2.pack(np.stack([g.z[window] for g in gens]))

    if len(gens) <= budget.exhaustive_cutoff:
        _, cands, (ax, az, cx, cz) = _exhaustive(bx, bz, gx, gz)
        cand_x = gf2.unpack(np.stack([ax[i] ^ cx[j] for i, j in cands]), window.size)
        cand_z = gf2.unpack(np.stack([az[i] ^ cz[j] for i, j in cands]), window.size)
    else:
        results = _greedy(bx, bz, gx, gz, budget)
        best = min(w for _, _, w in results)
        keep = [(x, z) for x, z, w in results if w == best]
        cand_x = gf2.unpack(np.stack([x for x, _ in keep]), window.size)
        cand_z = gf2.unpack(np.stack([z for _, z in keep]), window.size)

    pick = _lex_smallest(cand_x, cand_z)
    x = base.x.copy()
    z = base.z.copy()
    x[window] = cand_x[pick]
    z[window] = cand_z[pick]
    return PauliOperator(x, z)


_LINE = re.compile(r"^X:\{([0-9,\s]*)\};Z:\{([0-9,\s]*)\}$")


def format_check_matrix(ops: Sequence[PauliOperator], n: int) -> str:
    """Text form: ``nqubits=<n>`` header, then one ``X:{..};Z:{..}`` per line."""
    lines = [f"nqubits={n}"]
    for op in ops:
        if op.n_qubits != n:
            raise ValueError("operator size does not match header")
        lines.append(op.to_line())
    return "\n".join(lines) + "\n"


def parse_check_matrix(text: str) -> tuple[int, list[PauliOperator]]:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("nqubits="):
        raise ValueError("missing nqubits header")
    n = int(lines[0].split("=", 1)[1])
    ops = []
    for ln in lines[1:]:
        m = _LINE.match(ln)
        if m is None:
            raise ValueError(f"malformed check-matrix line: {ln!r}")
        xs, zs = ([int(t) for t in g.split(",") if t.strip()] for g in m.groups())
        if any(q >= n for q in itertools.chain(xs, zs)):
            raise ValueError(f"qubit index out of range in: {ln!r}")
        ops.append(PauliOperator.from_sparse(n, x=xs, z=zs))
    return n, ops
