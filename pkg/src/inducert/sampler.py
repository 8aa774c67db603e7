"""Monte Carlo cross-checks: W-random graphs and sampled densities.

Vertex positions are never drawn as floats. Under the mixed-radix pairing used
for tensor kernels, the block index of a uniform point in each factor is an
independent categorical draw with the factor's block widths, so we sample
those indices directly.

Randomness comes from numpy's Philox counter-based generator. Chunk ``c`` of a
run with seed ``s`` uses ``SeedSequence(s, spawn_key=(c,))``, so results do not
depend on how chunks are spread over threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import PreconditionError, RangeViolation
from .exactnum import format_rational
from .graphs import CanonGraph, Graph, labeled_copies, to_graph6
from .stepkernel import LazyTensorKernel, StepKernel, range_check

CHUNK = 4096
GraphLike = Union[Graph, CanonGraph]


def _g(h: GraphLike) -> Graph:
    return h.graph if isinstance(h, CanonGraph) else h


def rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass(frozen=True)
class ShiftedKernel:
    """``p + delta`` for a lazy tensor kernel ``delta`` (a graphon when values stay in [0, 1])."""

    p: Fraction
    delta: LazyTensorKernel

    @property
    def factors(self):
        return self.delta.factors


def _factors(W):
    """(shift, scalar, factors) view of any supported kernel."""
    if isinstance(W, ShiftedKernel):
        return float(W.p), float(W.delta.scalar), W.delta.factors
    if isinstance(W, LazyTensorKernel):
        return 0.0, float(W.scalar), W.factors
    return 0.0, 1.0, (W,)


def _check_graphon(W):
    if isinstance(W, ShiftedKernel):
        # every factor takes values in [-1, 1], so |delta| <= scalar
        for f in W.delta.factors:
            sk = f if isinstance(f, StepKernel) else None
            if sk is not None and sk.max_abs() > 1:
                raise RangeViolation("tensor factors must take values in [-1, 1]")
        s = abs(W.delta.scalar)
        if W.p - s < 0 or W.p + s > 1:
            raise RangeViolation("p + delta may leave [0, 1]")
        return
    if isinstance(W, StepKernel):
        if not range_check(W, 0, 1):
            raise RangeViolation("kernel values must lie in [0, 1] to define a random graph")
        return
    raise RangeViolation(f"{type(W).__name__} is not a graphon")


def sample_blocks(W, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Per-factor block indices for ``count`` independent uniform positions."""
    out = []
    for f in _factors(W)[2]:
        n = f.block_count
        # finite-field and constant handles always have equal blocks
        widths = f.block_widths() if isinstance(f, StepKernel) else None
        if widths is None or len(set(widths)) == 1:
            out.append(rng.integers(0, n, size=count, dtype=np.int64))
        else:
            probs = np.array([float(w) for w in widths])
            out.append(rng.choice(n, size=count, p=probs / probs.sum()))
    return out


def kernel_values(W, bx: list[np.ndarray], by: list[np.ndarray]) -> np.ndarray:
    shift, scalar, factors = _factors(W)
    val = np.full(bx[0].shape, scalar)
    for f, i, j in zip(factors, bx, by):
        val = val * f.float_values(i, j)
    return shift + val


def sample_graph(W, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Adjacency matrix of one sample of ``G(n, W)``."""
    if n < 2:
        raise PreconditionError("n must be at least 2")
    _check_graphon(W)
    rng = rng_for(seed, stream)
    blocks = sample_blocks(W, n, rng)
    iu, ju = np.triu_indices(n, 1)
    probs = kernel_values(W, [b[iu] for b in blocks], [b[ju] for b in blocks])
    edges = rng.random(len(iu)) < probs
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[edges], ju[edges]] = True
    return adj | adj.T


def adjacency_graph6(adj: np.ndarray) -> str:
    n = adj.shape[0]
    if n > 62:
        raise PreconditionError("graph6 output is limited to 62 vertices")
    return to_graph6(Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if adj[i, j]]))


@dataclass
class SampleReport:
    n: int
    reps: int
    seed: int
    estimate: float
    stderr: float
    exact_target: Optional[str]
    z_score: Optional[float]
    below_resolution: bool = False
    note: str = ""

    def to_json(self) -> dict:
        return asdict(self)

    @property
    def consistent(self) -> bool:
        return self.z_score is not None and abs(self.z_score) < 5


def jackknife(values: np.ndarray) -> tuple[float, float]:
    """Mean and jackknife standard error."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 2:
        raise PreconditionError("need at least two replicates")
    loo = (x.sum() - x) / (n - 1)
    var = (n - 1) / n * np.sum((loo - loo.mean()) ** 2)
    return float(x.mean()), float(math.sqrt(var))


def _report(vals, n, reps, seed, target) -> SampleReport:
    est, se = jackknife(vals)
    if target is None:
        return SampleReport(n, reps, seed, est, se, None, None)
    tgt = float(target)
    if se > 0:
        z = (est - tgt) / se
    else:
        z = 0.0 if est == tgt else math.inf
    text = format_rational(target) if isinstance(target, (int, Fraction)) else str(target)
    return SampleReport(n, reps, seed, est, se, text, z)


def _chunked(reps: int, seed: int, fn, threads: int) -> np.ndarray:
    chunks = [(c, min(CHUNK, reps - c * CHUNK)) for c in range(math.ceil(reps / CHUNK))]

    def run(job):
        c, size = job
        return fn(rng_for(seed, c), size)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(run, chunks))
    else:
        parts = [run(j) for j in chunks]
    return np.concatenate(parts)


def estimate_t(H: GraphLike, W, reps: int, seed: int, target=None, threads: int = 1) -> SampleReport:
    """Average of ``prod_{uv in E(H)} W(x_u, x_v)`` over independent position tuples."""
    g = _g(H)
    if reps < 2:
        raise PreconditionError("reps must be at least 2")
    edges = g.sorted_edges()
    v = g.order

    def fn(rng, size):
        blocks = sample_blocks(W, size * v, rng)
        blocks = [b.reshape(size, v) for b in blocks]
        out = np.ones(size)
        for a, b in edges:
            out *= kernel_values(W, [x[:, a] for x in blocks], [x[:, b] for x in blocks])
        return out

    return _report(_chunked(reps, seed, fn, threads), v, reps, seed, target)


def estimate_induced(F: Graph, W, n: Optional[int], reps: int, seed: int, target=None, threads: int = 1) -> SampleReport:
    """Induced density of ``F`` in ``G(n, W)``, using disjoint ``v(F)``-vertex groups.

    Each replicate draws ``n`` vertices and splits them into ``n // v(F)``
    disjoint groups; each group is an independent sample of ``G(v(F), W)``.
    """
    m = F.order
    n = m if n is None else n
    if n < m:
        raise PreconditionError("n must be at least v(F)")
    if reps < 2:
        raise PreconditionError("reps must be at least 2")
    _check_graphon(W)
    groups = n // m
    pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    # G(m, W) is exchangeable: P(G = F labeled) = P(G isomorphic to F) / #labeled copies
    orbit = labeled_copies(F, m)
    weights = np.left_shift(np.int64(1), np.arange(len(pairs), dtype=np.int64))

    def fn(rng, size):
        count = size * groups
        blocks = sample_blocks(W, count * m, rng)
        blocks = [b.reshape(count, m) for b in blocks]
        mask = np.zeros(count, dtype=np.int64)
        for c, (a, b) in enumerate(pairs):
            p = kernel_values(W, [x[:, a] for x in blocks], [x[:, b] for x in blocks])
            mask += np.where(rng.random(count) < p, weights[c], 0)
        hits = np.isin(mask, orbit) / len(orbit)
        return hits.reshape(size, groups).mean(axis=1)

    return _report(_chunked(reps, seed, fn, threads), n, reps, seed, target)


def certificate_crosscheck(cert, n: Optional[int], reps: int, seed: int, threads: int = 1) -> dict:
    """Sampled edge density and induced density of ``W_p + Delta`` against exact values.

    The exact gap is usually far below sampling noise; such cases are flagged,
    not reported as confirmations.
    """
    from .stepkernel import rand_density

    W = ShiftedKernel(cert.p, cert.kernel())
    edge = estimate_t(Graph(2, [(0, 1)]), W, reps, seed, target=cert.p, threads=threads)
    rand = rand_density(cert.F, cert.p)
    exact = cert.gap + rand
    rho = estimate_induced(cert.F, W, n, reps, seed + 1, target=float(exact), threads=threads)
    rho.exact_target = str(exact)
    gap = float(cert.gap)
    if not abs(gap) > 5 * rho.stderr:
        rho.below_resolution = True
        rho.note = "gap below statistical resolution"
    return {"edge_density": edge, "induced_density": rho, "gap": str(cert.gap)}
