"""Concatenated decoder and Monte Carlo harness.

Stages per trial, all vectorised over a batch:

1. inner: clear the vertex-stabilizer (G) syndrome with a local Pauli
   correction; the residual then lies in the fermionic algebra, possibly
   times a non-contractible cycle.
2. translate the residual into Majorana bits with a fixed linear left
   inverse of the generator images.
3. padding: multiply by gamma_p on every padding vertex whose occupation
   check fires; what remains on padding is a W_p stabilizer and is dropped.
4. blocks: decode the gamma and gamma-tilde parts of every block with an
   exhaustive maximum-likelihood table of the fermionic colour code.
5. classify: a block fails for gamma (gamma-tilde) when the leftover has odd
   gamma (gamma-tilde) weight on it; a nonzero cycle part is a sector event.

Perfect syndrome measurements throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import gf2
from .assembler import ConcatenatedCode
from .colorblock import ColorCodeBlock
from .majorana import MajoranaMonomial
from .pauli import PauliOperator, stack, syndrome

__all__ = [
    "NoiseModel",
    "sample_error",
    "sample_errors",
    "LookupTable",
    "build_lookup",
    "Decoder",
    "inner_decode",
    "padding_fix",
    "BlockTable",
    "block_table",
    "block_decode",
    "Outcome",
    "classify_outcome",
    "DecoderStats",
    "run_montecarlo",
    "wilson_interval",
    "fit_alpha",
    "crossing_estimate",
    "CSV_COLUMNS",
]

NOISE_KINDS = ("iid-XZ", "depolarizing")
CSV_COLUMNS = ("d_fq", "d_Ff", "N_F", "p", "trials", "P_b_gamma", "P_b_gammatilde", "P_L", "sector_rate", "seed")


class DecoderBug(RuntimeError):
    """Internal consistency failure of the decoding pipeline."""


# -- noise ------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseModel:
    """``iid-XZ``: X and Z each with probability p, independently (Y = both).
    ``depolarizing``: with probability p one of X, Y, Z uniformly.
    """

    kind: str = "iid-XZ"
    p: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def hit_probability(self) -> float:
        """Probability that a given qubit is not left alone."""
        if self.kind == "iid-XZ":
            return 1.0 - (1.0 - self.p) ** 2
        return self.p


def sample_errors(model: NoiseModel, n_qubits: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Symplectic rows ``[x | z]`` of ``trials`` independent errors."""
    if model.kind == "iid-XZ":
        xz = rng.random((trials, 2 * n_qubits)) < model.p
        return xz.astype(np.uint8)
    hit = rng.random((trials, n_qubits)) < model.p
    letter = rng.integers(1, 4, size=(trials, n_qubits))
    x = hit & (letter & 1).astype(bool)
    z = hit & (letter >> 1).astype(bool)
    return np.concatenate([x, z], axis=1).astype(np.uint8)


def sample_error(model: NoiseModel, code: ConcatenatedCode, rng: np.random.Generator | None = None) -> PauliOperator:
    rng = np.random.default_rng(model.seed) if rng is None else rng
    return PauliOperator.from_symplectic(sample_errors(model, code.n_qubits, 1, rng)[0])


# -- inner stage ----------------------------------------------------------------


def _single_qubit_rows(n: int) -> np.ndarray:
    """All 3n single-qubit Paulis, ordered by qubit then X, Z, Y."""
    e = np.zeros((3 * n, 2 * n), dtype=np.uint8)
    q = np.arange(n)
    e[3 * q, q] = 1
    e[3 * q + 1, n + q] = 1
    e[3 * q + 2, q] = 1
    e[3 * q + 2, n + q] = 1
    return e


@dataclass
class LookupTable:
    """G syndrome (as a tuple of fired check indices) -> single-qubit correction.

    When several single-qubit errors share a syndrome the first one in
    (qubit, X < Z < Y) order is kept; ``injective`` records whether that ever
    happened.
    """

    entries: dict[tuple[int, ...], np.ndarray]
    injective: bool

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, fired: Sequence[int]) -> PauliOperator | None:
        row = self.entries.get(tuple(int(i) for i in fired))
        return None if row is None else PauliOperator.from_symplectic(row)


def build_lookup(code: ConcatenatedCode) -> LookupTable:
    g = stack(code.g_stabilizers, code.n_qubits)
    errs = _single_qubit_rows(code.n_qubits)
    syn = syndrome(errs, g)
    entries: dict[tuple[int, ...], np.ndarray] = {}
    injective = True
    for e, s in zip(errs, syn):
        key = tuple(int(i) for i in np.flatnonzero(s))
        if key in entries:
            injective = False
            continue
        entries[key] = e
    return LookupTable(entries, injective)


class _Converter:
    """Linear left inverse: Pauli in the normaliser of G -> (Majorana bits, cycle part).

    Rows of ``basis`` are independent generator images followed by cycle
    representatives completing the normaliser of G.  With ``piv`` the
    reduced-echelon pivot columns of ``basis`` and ``inv`` the recorded row
    operations, coefficients are ``r[:, piv] @ inv``.
    """

    def __init__(self, code: ConcatenatedCode):
        table = code.table
        gens = table.generator_matrix
        _, keep = gf2.rref(gens.T.copy())
        images = gens[keep]
        maj = table.generator_majorana[keep]
        g = stack(code.g_stabilizers, code.n_qubits)
        n = code.n_qubits
        normaliser = gf2.nullspace(np.concatenate([g[:, n:], g[:, :n]], axis=1))
        rows = list(images)
        space = gf2.RowSpace(images)
        cycles = []
        for v in normaliser:
            if not space.contains(v):
                cycles.append(v)
                rows.append(v)
                space = gf2.RowSpace(np.array(rows))
        basis = np.array(rows, dtype=np.uint8)
        r = basis.shape[0]
        aug = np.concatenate([basis, np.eye(r, dtype=np.uint8)], axis=1)
        red, piv = gf2.rref(aug)
        if len(piv) != r or max(piv) >= 2 * n:
            raise DecoderBug("normaliser basis is not independent")
        self.piv = np.array(piv)
        self.inv = red[:, 2 * n :].astype(np.float64)
        self.basis = basis.astype(np.float64)
        self.n_images = len(keep)
        self.majorana = maj.astype(np.float64)
        self.cycles = np.array(cycles, dtype=np.uint8).reshape(-1, 2 * n)
        self.n_vertices = code.lattice.n_vertices

    def __call__(self, residual: np.ndarray):
        """Majorana bits (canonical modulo total parity), cycle bits, consistency flags."""
        r = residual.astype(np.float64)
        coeff = (r[:, self.piv] @ self.inv) % 2
        ok = ~(((coeff @ self.basis) % 2).astype(np.uint8) ^ residual).any(axis=1)
        bits = ((coeff[:, : self.n_images] @ self.majorana) % 2).astype(np.uint8)
        flip = bits.sum(axis=1) > self.n_vertices
        bits[flip] ^= 1
        cyc = coeff[:, self.n_images :].astype(np.uint8)
        return bits, cyc, ok


class Decoder:
    """Precomputed data for decoding one code at one block-table noise rate."""

    def __init__(self, code: ConcatenatedCode, block_rate: float = 0.01):
        self.code = code
        self.n = code.n_qubits
        self.g = stack(code.g_stabilizers, self.n)
        self.convert = _Converter(code)
        self.block = code.block
        self.blocks = block_table(code.d_Ff, block_rate)
        self.block_vertices = np.array([e.vertices for e in code.embeddings], dtype=np.int64)
        self.padding = np.array(code.padding, dtype=np.int64)
        self._weights = (1 << np.arange(self.block.n_vertices, dtype=np.int64))
        if code.lattice.dim == 2:
            self._init_matching()
        else:
            self.lookup = build_lookup(code)

    # inner stage

    def _init_matching(self):
        import pymatching
        from scipy.sparse import csc_matrix

        errs = _single_qubit_rows(self.n)
        syn = syndrome(errs, self.g)
        if not (syn.sum(axis=1) == 2).all():
            raise DecoderBug("2D single-qubit errors should fire exactly two vertex checks")
        _, first = np.unique(syn, axis=0, return_index=True)
        first = np.sort(first)
        self.columns = errs[first].astype(np.float64)
        self.matching = pymatching.Matching(csc_matrix(syn[first].T))
        self.lookup = build_lookup(self.code)

    def inner_corrections(self, errors: np.ndarray) -> np.ndarray:
        syn = syndrome(errors, self.g)
        if self.code.lattice.dim == 2:
            pred = self.matching.decode_batch(syn)
            return ((pred.astype(np.float64) @ self.columns) % 2).astype(np.uint8)
        return np.array([self._peel(s) for s in syn], dtype=np.uint8).reshape(len(errors), 2 * self.n)

    def _peel(self, syn: np.ndarray) -> np.ndarray:
        """3D: greedily strip single-qubit syndrome patterns contained in the syndrome."""
        out = np.zeros(2 * self.n, dtype=np.uint8)
        fired = set(int(i) for i in np.flatnonzero(syn))
        if tuple(sorted(fired)) in self.lookup.entries:
            return self.lookup.entries[tuple(sorted(fired))].copy()
        while fired:
            best = None
            for key, row in self.lookup.entries.items():
                if key[0] in fired and fired.issuperset(key) and (best is None or len(key) > len(best[0])):
                    best = (key, row)
            if best is None:
                return out ^ self._solve(fired)
            out ^= best[1]
            fired.difference_update(best[0])
        return out

    def _solve(self, fired) -> np.ndarray:
        target = np.zeros(self.g.shape[0], dtype=np.uint8)
        target[list(fired)] = 1
        errs = _single_qubit_rows(self.n)
        coeff = gf2.rank_and_solve(syndrome(errs, self.g), target)[1]
        if coeff is None:
            raise DecoderBug("vertex-check syndrome cannot be cleared")
        return ((coeff.astype(np.int64) @ errs.astype(np.int64)) & 1).astype(np.uint8)

    # Majorana stages

    def to_majorana(self, residual: np.ndarray):
        return self.convert(residual)

    def padding_fix(self, bits: np.ndarray) -> np.ndarray:
        nv = self.convert.n_vertices
        out = bits.copy()
        if self.padding.size:
            out[:, self.padding] = 0
            out[:, nv + self.padding] = 0
        return out

    def padding_syndrome(self, bits: np.ndarray) -> np.ndarray:
        nv = self.convert.n_vertices
        return bits[:, self.padding] ^ bits[:, nv + self.padding]

    def block_parts(self, bits: np.ndarray):
        """Integer keys (trials, blocks) of the gamma and gamma-tilde parts."""
        nv = self.convert.n_vertices
        g = bits[:, self.block_vertices].astype(np.int64)
        t = bits[:, nv + self.block_vertices].astype(np.int64)
        return g @ self._weights, t @ self._weights

    def decode_batch(self, errors: np.ndarray) -> dict:
        corr = self.inner_corrections(errors)
        residual = errors ^ corr
        if syndrome(residual, self.g).any():
            raise DecoderBug("inner correction left a vertex-check syndrome")
        raw, cycles, ok = self.to_majorana(residual)
        bits = self.padding_fix(raw)
        kg, kt = self.block_parts(bits)
        fail_g = self.blocks.failure(kg)
        fail_t = self.blocks.failure(kt)
        # block logicals multiply to the total parity, which is trivial: keep the
        # lighter of the two equivalent failure patterns
        both = np.concatenate([fail_g, fail_t], axis=1)
        nf = both.shape[1]
        heavy = (both.sum(axis=1) > nf // 2) | ((both.sum(axis=1) * 2 == nf) & both[:, 0].astype(bool))
        both[heavy] ^= 1
        k = fail_g.shape[1]
        return {
            "fail_gamma": both[:, :k],
            "fail_gammatilde": both[:, k:],
            "sector": cycles.any(axis=1),
            "consistent": ok,
            "inner_residual": raw,
            "residual_bits": bits,
        }


# -- per-block maximum likelihood ------------------------------------------------


@dataclass
class BlockTable:
    """Exhaustive ML decoder of one Majorana type on one block.

    ``syndromes[e]`` is the plaquette syndrome of error pattern e (bit i =
    block vertex i) and ``corrections[s]`` the chosen correction.
    """

    d: int
    rate: float
    syndromes: np.ndarray
    corrections: np.ndarray

    def correct(self, keys: np.ndarray) -> np.ndarray:
        return self.corrections[self.syndromes[keys]]

    def failure(self, keys: np.ndarray) -> np.ndarray:
        left = keys ^ self.correct(keys)
        return (np.bitwise_count(left.astype(np.uint64)) & 1).astype(np.uint8)


@lru_cache(maxsize=16)
def block_table(d: int, rate: float = 0.01) -> BlockTable:
    """ML table at independent Majorana flip rate ``rate``.

    Errors with equal syndrome differ by plaquettes (even weight) or by a
    logical (odd weight), so the logical class is the weight parity.  For
    each syndrome the class with larger total probability wins and its
    lightest member (smallest pattern on ties) is the correction.
    """
    from .colorblock import build_block

    if d > 5:
        # TODO: add a restriction-decoder hook for d_Ff >= 7 blocks
        raise NotImplementedError("exhaustive block decoding is limited to d_Ff <= 5")
    b = build_block(d)
    h = b.check_matrix
    nb = b.n_vertices
    col = (h.astype(np.int64) * (1 << np.arange(h.shape[0]))[:, None]).sum(axis=0)
    syn = np.zeros(1, dtype=np.int64)
    for i in range(nb):
        syn = np.concatenate([syn, syn ^ col[i]])
    pats = np.arange(1 << nb, dtype=np.int64)
    w = np.bitwise_count(pats.astype(np.uint64)).astype(np.int64)
    q = min(max(rate, 1e-12), 0.5)
    logp = w * math.log(q) + (nb - w) * math.log1p(-q)
    ns = 1 << h.shape[0]
    prob = np.zeros((ns, 2))
    np.add.at(prob, (syn, w & 1), np.exp(logp - logp.max()))
    cls = (prob[:, 1] > prob[:, 0]).astype(np.int64)
    order = np.lexsort((pats, w))
    corr = np.full(ns, -1, dtype=np.int64)
    for e in order:
        s = syn[e]
        if corr[s] < 0 and (w[e] & 1) == cls[s]:
            corr[s] = e
    if (corr < 0).any():
        raise DecoderBug("block syndrome with no preimage")
    return BlockTable(d, rate, syn, corr)


def block_decode(residual: MajoranaMonomial, b: ColorCodeBlock, rate: float = 0.01) -> MajoranaMonomial:
    """Correction for a monomial on one block (``residual`` has b.n_vertices modes)."""
    t = block_table(b.d, rate)
    w = 1 << np.arange(b.n_vertices, dtype=np.int64)
    cg = int(t.correct(np.array([int(residual.g.astype(np.int64) @ w)]))[0])
    ct = int(t.correct(np.array([int(residual.gt.astype(np.int64) @ w)]))[0])
    bits = lambda k: [(k >> i) & 1 for i in range(b.n_vertices)]
    return MajoranaMonomial(np.array(bits(cg), dtype=np.uint8), np.array(bits(ct), dtype=np.uint8))


# -- single-operator API -----------------------------------------------------------


def inner_decode(syn: np.ndarray, code: ConcatenatedCode, decoder: Decoder | None = None) -> PauliOperator:
    """Correction clearing a G syndrome (2D: matching; 3D: lookup then peeling)."""
    dec = decoder or Decoder(code)
    syn = np.asarray(syn, dtype=np.uint8)
    if dec.code.lattice.dim == 2:
        pred = dec.matching.decode(syn)
        row = ((pred.astype(np.float64) @ dec.columns) % 2).astype(np.uint8)
    else:
        row = dec._peel(syn)
    return PauliOperator.from_symplectic(row)


def padding_fix(residual: MajoranaMonomial, code: ConcatenatedCode) -> MajoranaMonomial:
    """Multiply by gamma_p wherever W_p fires; drop what is left on padding (a W_p)."""
    g, t = residual.g.copy(), residual.gt.copy()
    for p in code.padding:
        if g[p] ^ t[p]:
            g[p] ^= 1
        # both set means gamma_p gamma~_p, the padding stabilizer itself
        g[p] = t[p] = 0
    return MajoranaMonomial(g, t)


@dataclass(frozen=True)
class Outcome:
    success: bool
    gamma_failures: tuple[int, ...]
    gammatilde_failures: tuple[int, ...]
    sector_flip: bool


def classify_outcome(total: PauliOperator, code: ConcatenatedCode, decoder: Decoder | None = None) -> Outcome:
    """Logical effect of a fully corrected error (must commute with every stabilizer)."""
    if syndrome(total.symplectic[None], code.stabilizer_matrix).any():
        raise DecoderBug("residual still has a syndrome")
    dec = decoder or Decoder(code)
    if code.stabilizer_space.contains(total.symplectic):
        return Outcome(True, (), (), False)
    bits, cyc, ok = dec.to_majorana(total.symplectic[None])
    if not ok[0]:
        raise DecoderBug("operator outside the normaliser of the vertex checks")
    bits = dec.padding_fix(bits)
    kg, kt = dec.block_parts(bits)
    fg = (np.bitwise_count(kg.astype(np.uint64)) & 1)[0]
    ft = (np.bitwise_count(kt.astype(np.uint64)) & 1)[0]
    both = np.concatenate([fg, ft])
    if both.sum() * 2 > both.size or (both.sum() * 2 == both.size and both[0]):
        both ^= 1
    k = fg.size
    gam = tuple(int(i) for i in np.flatnonzero(both[:k]))
    til = tuple(int(i) for i in np.flatnonzero(both[k:]))
    sector = bool(cyc.any())
    return Outcome(not (gam or til), gam, til, sector)


# -- statistics -------------------------------------------------------------------


def wilson_interval(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


@dataclass
class DecoderStats:
    d_fq: int
    d_Ff: int
    N_F: int
    p: float
    seed: int
    trials: int = 0
    gamma_failures: int = 0  # summed over blocks
    gammatilde_failures: int = 0
    global_failures: int = 0
    global_failures_with_sector: int = 0
    sector_events: int = 0
    aborts: int = 0
    pair_separation: dict = field(default_factory=dict)

    def merge(self, other: "DecoderStats") -> "DecoderStats":
        out = DecoderStats(self.d_fq, self.d_Ff, self.N_F, self.p, self.seed)
        for f in ("trials", "gamma_failures", "gammatilde_failures", "global_failures",
                  "global_failures_with_sector", "sector_events", "aborts"):
            setattr(out, f, getattr(self, f) + getattr(other, f))
        sep = dict(self.pair_separation)
        for k, v in other.pair_separation.items():
            sep[k] = sep.get(k, 0) + v
        out.pair_separation = dict(sorted(sep.items()))
        return out

    @property
    def block_trials(self) -> int:
        return self.trials * self.N_F

    @property
    def P_b_gamma(self) -> float:
        return self.gamma_failures / max(1, self.block_trials)

    @property
    def P_b_gammatilde(self) -> float:
        return self.gammatilde_failures / max(1, self.block_trials)

    @property
    def P_b(self) -> float:
        return (self.gamma_failures + self.gammatilde_failures) / max(1, 2 * self.block_trials)

    @property
    def P_L(self) -> float:
        return self.global_failures / max(1, self.trials)

    @property
    def sector_rate(self) -> float:
        return self.sector_events / max(1, self.trials)

    def P_b_interval(self, z: float = 1.96) -> tuple[float, float]:
        return wilson_interval(self.gamma_failures + self.gammatilde_failures, 2 * self.block_trials, z)

    def predicted_P_L(self) -> float:
        return 1.0 - (1.0 - self.P_b) ** (2 * self.N_F)

    def independence_z(self) -> float:
        """(observed - predicted) success rate in units of its binomial sigma."""
        pred = 1.0 - self.predicted_P_L()
        obs = 1.0 - self.P_L
        sigma = math.sqrt(max(pred * (1 - pred), 1e-300) / max(1, self.trials))
        return (obs - pred) / sigma

    def csv_row(self) -> dict:
        return {"d_fq": self.d_fq, "d_Ff": self.d_Ff, "N_F": self.N_F, "p": self.p, "trials": self.trials,
                "P_b_gamma": self.P_b_gamma, "P_b_gammatilde": self.P_b_gammatilde, "P_L": self.P_L,
                "sector_rate": self.sector_rate, "seed": self.seed}

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(P_b=self.P_b, P_L=self.P_L, sector_rate=self.sector_rate)
        return d


def _pair_separations(bits: np.ndarray, code: ConcatenatedCode) -> dict:
    """Histogram of torus distances between the two modes of degree-2 residuals."""
    lat = code.lattice
    nv = lat.n_vertices
    deg2 = np.flatnonzero(bits.sum(axis=1) == 2)
    out: dict[int, int] = {}
    for i in deg2:
        idx = np.flatnonzero(bits[i]) % nv
        a, b = lat.vertex_coords(int(idx[0])), lat.vertex_coords(int(idx[1]))
        s = sum(min(abs(x - y), n - abs(x - y)) for x, y, n in zip(a, b, lat.sizes))
        out[s] = out.get(s, 0) + 1
    return out


def _run_chunk(dec: Decoder, model: NoiseModel, trials: int, seq: np.random.SeedSequence,
               include_sector: bool, batch: int) -> DecoderStats:
    code = dec.code
    st = DecoderStats(code.d_fq, code.d_Ff, code.N_F, model.p, model.seed)
    rng = np.random.default_rng(seq)
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        errs = sample_errors(model, code.n_qubits, b, rng)
        out = dec.decode_batch(errs)
        sep = _pair_separations(out["inner_residual"], code)
        good = out["consistent"]
        fg, ft, sec = out["fail_gamma"][good], out["fail_gammatilde"][good], out["sector"][good]
        anyf = fg.any(axis=1) | ft.any(axis=1)
        part = DecoderStats(st.d_fq, st.d_Ff, st.N_F, st.p, st.seed,
                            trials=int(good.sum()),
                            gamma_failures=int(fg.sum()),
                            gammatilde_failures=int(ft.sum()),
                            global_failures=int((anyf | (sec if include_sector else False)).sum()),
                            global_failures_with_sector=int((anyf | sec).sum()),
                            sector_events=int(sec.sum()),
                            aborts=int((~good).sum()),
                            pair_separation=sep)
        st = st.merge(part)
        done += b
    return st


def run_montecarlo(code: ConcatenatedCode, model: NoiseModel, trials: int, *, threads: int = 1,
                   chunk: int = 10_000, batch: int = 2_000, include_sector: bool = False,
                   block_rate: float | None = None,
                   progress: Callable[[int, int], None] | None = None,
                   decoder: Decoder | None = None) -> DecoderStats:
    """Tallies over ``trials`` independent trials.

    Trials are split into fixed-size chunks, each with its own substream
    spawned from the model seed, so results do not depend on ``threads``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dec = decoder or Decoder(code, block_rate if block_rate is not None else max(model.p, 1e-4))
    sizes = [min(chunk, trials - i) for i in range(0, trials, chunk)]
    seqs = np.random.SeedSequence(model.seed).spawn(len(sizes))
    total = DecoderStats(code.d_fq, code.d_Ff, code.N_F, model.p, model.seed)
    done = 0

    def job(args):
        size, seq = args
        return _run_chunk(dec, model, size, seq, include_sector, batch)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = pool.map(job, zip(sizes, seqs))
            for r in results:
                total = total.merge(r)
                done += r.trials + r.aborts
                if progress:
                    progress(done, trials)
    else:
        for args in zip(sizes, seqs):
            r = job(args)
            total = total.merge(r)
            done += r.trials + r.aborts
            if progress:
                progress(done, trials)
    return total


def fit_alpha(points: Sequence[tuple[int, float, int]]) -> dict:
    """Fit ln P_b = c - alpha d over (d_Ff, P_b, block samples) points.

    Weighted least squares with binomial variances of ln P_b; returns alpha,
    its standard error and a 95% interval.  Needs two or more points with
    P_b > 0.
    """
    pts = [(d, p, n) for d, p, n in points if p > 0]
    if len(pts) < 2:
        raise ValueError("need at least two points with P_b > 0")
    d = np.array([x[0] for x in pts], dtype=float)
    p = np.array([x[1] for x in pts])
    n = np.array([x[2] for x in pts], dtype=float)
    y = np.log(p)
    var = (1 - p) / (n * p)
    w = 1 / var
    a = np.stack([np.ones_like(d), -d], axis=1)
    cov = np.linalg.inv(a.T @ (w[:, None] * a))
    c, alpha = cov @ a.T @ (w * y)
    se = math.sqrt(cov[1, 1])
    return {"alpha": float(alpha), "se": se, "ci95": (float(alpha - 1.96 * se), float(alpha + 1.96 * se)),
            "intercept": float(c)}


def crossing_estimate(curves: dict[int, list[tuple[float, float]]]) -> float | None:
    """First p where the largest-d P_b curve stops being below the smallest-d one.

    ``curves`` maps d_Ff to (p, P_b) lists on a shared p grid; returns a
    log-linear interpolation of the crossing or ``None`` if none is seen.
    """
    if len(curves) < 2:
        return None
    lo, hi = min(curves), max(curves)
    a = dict(curves[lo])
    b = dict(curves[hi])
    ps = sorted(set(a) & set(b))
    diff = [(p, b[p] - a[p]) for p in ps if a[p] > 0 and b[p] > 0]
    for (p0, d0), (p1, d1) in zip(diff, diff[1:]):
        if d0 < 0 <= d1:
            t = -d0 / (d1 - d0)
            return float(math.exp(math.log(p0) + t * (math.log(p1) - math.log(p0))))
    return None
