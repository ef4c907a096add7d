"""Brute-force cross-checks at tiny sizes.

Nothing here calls the elimination routines except where a result is
explicitly reported "via rank" next to its enumerated twin.  Every routine is
guarded to at most 2**20 enumerated states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .field import FqMatrix, ResourceError, SparseTriplets, rank
from .entropy import PartialModulePatch
from .group import Element, FinitePermGroup, GroupRingMatrix
from .sofic import SoficApprox

GUARD = 1 << 20


class GuardError(ResourceError):
    """An enumeration would exceed its state guard."""


def _guard(count: int, guard: int, what: str) -> None:
    if count > guard:
        raise GuardError(f"{what}: {count} states exceed the guard {guard}")


def _all_vectors(q: int, n: int, start: int, stop: int) -> np.ndarray:
    """Vectors with mixed-radix codes in [start, stop), digit 0 least significant."""
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((codes.size, n), dtype=np.int64)
    for k in range(n):
        out[:, k] = codes % q
        codes = codes // q
    return out


def brute_kernel_count(m: FqMatrix | SparseTriplets, *, guard: int = GUARD) -> int:
    """|{x : m x = 0}| by enumerating every x in F_q^cols."""
    dense = m.to_dense() if isinstance(m, SparseTriplets) else m
    q, cols = dense.field.p, dense.cols
    total = q**cols
    _guard(total, guard, "kernel enumeration")
    a = dense.data
    count = 0
    chunk = 1 << 14
    for lo in range(0, total, chunk):
        x = _all_vectors(q, cols, lo, min(total, lo + chunk))
        y = (x @ a.T) % q
        count += int(np.count_nonzero(~np.any(y, axis=1)))
    return count


def subgroup_closure_size(
    modulus: int | Sequence[int],
    generators: Iterable[Sequence[int]],
    *,
    dim: int | None = None,
    guard: int = GUARD,
) -> int:
    """Order of the subgroup of prod Z/m_k generated by ``generators``.

    Breadth-first closure from 0 under adding a generator or its negative.
    """
    gens = np.atleast_2d(np.asarray(list(generators), dtype=np.int64))
    if gens.size == 0:
        return 1
    D = gens.shape[1] if dim is None else dim
    mods = np.full(D, modulus, dtype=np.int64) if np.isscalar(modulus) else np.asarray(modulus, dtype=np.int64)
    if mods.shape != (D,):
        raise ValueError("one modulus per coordinate required")
    gens = gens % mods
    steps = np.vstack([gens, (-gens) % mods])
    radix = np.concatenate([[1], np.cumprod(mods[:-1])]).astype(object)
    if math.prod(int(m) for m in mods) < (1 << 62):
        radix = radix.astype(np.int64)
    else:
        raise GuardError("ambient group too large to encode")

    total = math.prod(int(m) for m in mods)
    dense = total <= (1 << 26)
    seen = np.zeros(total if dense else 0, dtype=bool)
    visited = np.zeros(1, dtype=np.int64)
    if dense:
        seen[0] = True
    count = 1
    frontier = np.zeros((1, D), dtype=np.int64)
    # expand in chunks so the guard trips before a huge layer is materialized
    chunk = max(1, (1 << 22) // (steps.shape[0] * D))
    while frontier.shape[0]:
        layer = []
        for lo in range(0, frontier.shape[0], chunk):
            nxt = ((frontier[lo : lo + chunk, None, :] + steps[None, :, :]) % mods).reshape(-1, D)
            codes, first = np.unique(nxt @ radix, return_index=True)
            if dense:
                fresh = ~seen[codes]
                seen[codes] = True
            else:
                fresh = ~np.isin(codes, visited, assume_unique=True)
                visited = np.union1d(visited, codes[fresh])
            layer.append(nxt[first[fresh]])
            count += int(np.count_nonzero(fresh))
            _guard(count, guard, "subgroup closure")
        frontier = np.vstack(layer)
    return count


def relation_generators(patch: PartialModulePatch, sigma: SoficApprox, window: Iterable[Element]) -> np.ndarray:
    """Explicit generators delta_v (x) b - delta_{sigma(s)v} (x) s b, one row each, in F_q^{dD}.

    Built point by point, independently of the vectorized construction used
    for relative entropy, so closure counts can cross-check it.
    """
    d, D, p = sigma.d, patch.dim, patch.field.p
    rows = []
    for s in window:
        perm = sigma.evaluate(s)
        sb = patch.act(s, patch.b_gens) if patch.b_gens.shape[0] else patch.b_gens
        for b, bb in zip(patch.b_gens, sb):
            for v in range(d):
                x = np.zeros(d * D, dtype=np.int64)
                x[v * D : (v + 1) * D] += b
                x[perm[v] * D : (perm[v] + 1) * D] -= bb
                rows.append(x % p)
    return np.array(rows, dtype=np.int64).reshape(-1, d * D)


@dataclass(frozen=True, eq=False)
class FiniteActionModel:
    """A finite group acting by automorphisms on X = prod Z/m_k.

    Points of X are mixed-radix codes.  ``action[s, x]`` is the code of s x.
    The pseudometric is 1 when two points differ on the ``observable``
    coordinates and 0 otherwise.
    """

    moduli: tuple[int, ...]
    group: FinitePermGroup
    action: np.ndarray = dc_field(repr=False)
    observable: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        a = np.asarray(self.action, dtype=np.int64)
        if a.shape != (self.group.order, self.size):
            raise ValueError(f"action table must be {self.group.order} x {self.size}")
        a.setflags(write=False)
        object.__setattr__(self, "action", a)
        self._check()

    @property
    def size(self) -> int:
        return math.prod(self.moduli)

    @property
    def dim(self) -> int:
        return len(self.moduli)

    def decode(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty(codes.shape + (self.dim,), dtype=np.int64)
        for k, m in enumerate(self.moduli):
            out[..., k] = codes % m
            codes = codes // m
        return out

    def encode(self, vecs: np.ndarray) -> np.ndarray:
        radix = np.concatenate([[1], np.cumprod(self.moduli[:-1])]).astype(np.int64)
        return (np.asarray(vecs, dtype=np.int64) % np.array(self.moduli)) @ radix

    @property
    def add_table(self) -> np.ndarray:
        pts = self.decode(np.arange(self.size))
        return self.encode(pts[:, None, :] + pts[None, :, :])

    @property
    def observed(self) -> np.ndarray:
        """Code of the observable projection of each point."""
        pts = self.decode(np.arange(self.size))[:, list(self.observable)]
        radix = np.cumprod([1] + [self.moduli[k] for k in self.observable[:-1]]).astype(np.int64)
        return pts @ radix

    def _check(self) -> None:
        n, a, t = self.size, self.action, self.group.table
        if not np.all(a[0] == np.arange(n)):
            raise ValueError("the identity must act trivially")
        if self.size <= 4096:
            add = self.add_table
            for s in range(self.group.order):
                if not np.array_equal(a[s][add], add[a[s][:, None], a[s][None, :]]):
                    raise ValueError(f"element g{s} does not act by a homomorphism")
        for s in range(self.group.order):
            if not np.array_equal(np.sort(a[s]), np.arange(n)):
                raise ValueError(f"element g{s} does not act bijectively")
            for u in range(self.group.order):
                if not np.array_equal(a[t[s, u]], a[s][a[u]]):
                    raise ValueError("the table is not a group action")

    def dynamically_generating(self) -> bool:
        """Every nonzero point is seen by the observable after some translate."""
        obs = self.observed
        seen = np.zeros(self.size, dtype=bool)
        for s in range(self.group.order):
            seen |= obs[self.action[s]] != obs[0]
        return bool(np.all(seen[1:]))

    @classmethod
    def from_generators(
        cls,
        moduli: Sequence[int],
        group: FinitePermGroup,
        generator_actions: Sequence[np.ndarray],
        observable: Sequence[int] = (0,),
    ) -> "FiniteActionModel":
        """Extend generator actions (arrays over point codes) to the whole group."""
        size = math.prod(moduli)
        act = np.full((group.order, size), -1, dtype=np.int64)
        act[0] = np.arange(size)
        gens = [group.gen(i) for i in range(group.ngens)]
        queue = [0]
        while queue:
            x = queue.pop(0)
            for gi, g in zip(gens, generator_actions):
                y = group.mul(gi, x)
                if act[y, 0] < 0:
                    act[y] = np.asarray(g, dtype=np.int64)[act[x]]
                    queue.append(y)
        return cls(tuple(moduli), group, act, tuple(observable))


def full_shift_model(group: FinitePermGroup, q: int, n: int = 1) -> FiniteActionModel:
    """X = (F_q^G)^n with the left shift (s x)_i(t) = x_i(s^{-1} t).

    Coordinate ``i * |G| + t`` holds x_i(t); the observable block is the
    identity coordinate of each of the n components.
    """
    G = group.order
    moduli = (q,) * (n * G)
    size = q ** (n * G)
    pts = _all_vectors(q, n * G, 0, size).reshape(size, n, G)
    radix = q ** np.arange(n * G, dtype=np.int64)
    act = np.empty((G, size), dtype=np.int64)
    for s in range(G):
        # (s x)(t) = x(s^{-1} t), i.e. new[:, :, t] = old[:, :, table[inv s, t]]
        src = group.table[group.inverse_table[s]]
        act[s] = pts[:, :, src].reshape(size, n * G) @ radix
    return FiniteActionModel(moduli, group, act, tuple(i * G for i in range(n)))


@dataclass(frozen=True)
class MapSpaceConfig:
    window: tuple[Element, ...]
    delta: Fraction
    eps: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.delta < 0 or self.eps <= 0:
            raise ValueError("need delta >= 0 and eps > 0")


@dataclass(frozen=True)
class MapSpaceResult:
    d: int
    map_count: int
    n_eps: int

    @property
    def estimate(self) -> float:
        return math.log(self.n_eps) / self.d if self.n_eps else -math.inf


def max_separated(dist: np.ndarray, eps: Fraction) -> int:
    """Largest subset with pairwise distance > eps (branch and bound on cliques)."""
    n = dist.shape[0]
    if n == 0:
        return 0
    adj = [0] * n
    for i in range(n):
        row = np.flatnonzero(dist[i] > eps)
        mask = 0
        for j in row:
            if j != i:
                mask |= 1 << int(j)
        adj[i] = mask
    best = 1
    stack = [(0, (1 << n) - 1)]
    while stack:
        size, cand = stack.pop()
        if size + cand.bit_count() <= best:
            continue
        if cand == 0:
            best = max(best, size)
            continue
        v = cand.bit_length() - 1
        # exclude v, then include v (popped first)
        stack.append((size, cand & ~(1 << v)))
        stack.append((size + 1, cand & adj[v]))
        if size + 1 > best:
            best = size + 1
        if best == n:
            break
    return best


def map_space_entropy(
    model: FiniteActionModel, sigma: SoficApprox, cfg: MapSpaceConfig, *, guard: int = GUARD
) -> MapSpaceResult:
    """Enumerate Map(rho, F, delta, sigma) and its maximal eps-separated subset under rho_inf."""
    if sigma.group != model.group:
        raise ValueError("approximation and model must use the same group")
    d = sigma.d
    total = model.size**d
    _guard(total, guard, "map enumeration")
    phis = _all_vectors(model.size, d, 0, total)  # phis[k, v] = code of phi_v
    obs = model.observed
    keep = np.ones(total, dtype=bool)
    d2 = cfg.delta * cfg.delta
    for s in cfg.window:
        s = model.group.check(s)
        perm = sigma.evaluate(s)
        left = obs[model.action[s][phis]]  # observable of s phi_v
        right = obs[phis[:, perm]]  # observable of phi_{sigma(s) v}
        mism = np.count_nonzero(left != right, axis=1)
        # rho_2^2 = mism / d compared exactly with delta^2
        keep &= mism * d2.denominator <= d2.numerator * d
    maps = phis[keep]
    if maps.shape[0] == 0:
        return MapSpaceResult(d, 0, 0)
    # rho_inf is 0 between maps with equal observable patterns, so each pattern
    # class contributes at most one point to a separated set
    patterns = np.unique(obs[maps], axis=0)
    k = patterns.shape[0]
    _guard(k * k, guard, "separation graph")
    dist = np.array(
        [[Fraction(int(np.any(patterns[i] != patterns[j]))) for j in range(k)] for i in range(k)],
        dtype=object,
    ) if k <= 256 else None
    if dist is None:
        # rho takes values in {0, 1}: distinct classes are at distance exactly 1
        n_eps = k if cfg.eps < 1 else 1
    else:
        n_eps = max_separated(dist, cfg.eps)
    return MapSpaceResult(d, int(maps.shape[0]), n_eps)


@dataclass(frozen=True)
class PairingVerdict:
    q: int
    order: int
    n: int
    m: int
    kernel_count: int
    annihilator_count: int
    image_count: int
    module_size: int
    module_size_via_rank: int
    same_set: bool

    @property
    def ok(self) -> bool:
        total = self.q ** (self.n * self.order)
        return (
            self.kernel_count * self.image_count == total
            and self.same_set
            and self.kernel_count == self.module_size
            and self.module_size == self.module_size_via_rank
        )


def _right_mult(x: np.ndarray, g: GroupRingMatrix, table: np.ndarray, q: int) -> np.ndarray:
    """Rows x in (F_q^G)^{1 x g.m} (shape (N, g.m, |G|)) times g, shape (N, g.n, |G|)."""
    out = np.zeros((x.shape[0], g.n, table.shape[0]), dtype=np.int64)
    for i in range(g.m):
        for j in range(g.n):
            for b, c in g.entries[i][j].terms:
                # x_i(a) b contributes at t = a b
                out[:, j, table[:, b]] += c * x[:, i, :]
    return out % q


def pairing_check(f: GroupRingMatrix, *, guard: int = GUARD) -> PairingVerdict:
    """Check that ker R(f*) is the annihilator of (F_q G)^m f under (u, x) -> (x u*)_e.

    Also compares |ker R(f*)| with |M| for M = (F_q G)^n / (F_q G)^m f.
    """
    group = f.group
    if not isinstance(group, FinitePermGroup):
        raise ValueError("pairing checks need a finite group")
    G, q, n, m = group.order, f.field.p, f.n, f.m
    if G > 12:
        raise GuardError(f"|G| = {G} exceeds 12")
    total = q ** (n * G)
    _guard(total, guard, "dual enumeration")
    table = group.table
    x = _all_vectors(q, n * G, 0, total).reshape(total, n, G)

    fstar = f.star()
    xf = _right_mult(x, fstar, table, q)
    in_kernel = ~np.any(xf.reshape(total, -1), axis=1)

    # relation rows s f_j for s in G, j in [m]; pairing(u, x) = sum_{i,t} u_i(t) x_i(t)
    rel = np.zeros((m * G, n, G), dtype=np.int64)
    for j in range(m):
        for s in range(G):
            for i in range(n):
                for b, c in f.entries[j][i].terms:
                    rel[j * G + s, i, table[s, b]] += c
    rel %= q
    pair = (x.reshape(total, -1) @ rel.reshape(m * G, -1).T) % q if m else np.zeros((total, 0), np.int64)
    in_ann = ~np.any(pair, axis=1)

    # image of y -> y f on (F_q G)^{1 x m}, enumerated when feasible
    mat = np.zeros((n * G, max(m * G, 0)), dtype=np.int64)
    for i in range(m):
        for a in range(G):
            basis = np.zeros((1, m, G), dtype=np.int64)
            basis[0, i, a] = 1
            mat[:, i * G + a] = _right_mult(basis, f, table, q).reshape(-1)
    r = rank(FqMatrix(f.field, mat)) if m else 0
    via_rank = q ** (n * G - r)
    if m == 0:
        image = 1
    elif q ** (m * G) <= guard:
        y = _all_vectors(q, m * G, 0, q ** (m * G)).reshape(-1, m, G)
        yf = _right_mult(y, f, table, q).reshape(y.shape[0], -1)
        image = int(np.unique(yf @ (q ** np.arange(n * G, dtype=np.int64))).size)
    else:
        image = q**r
    return PairingVerdict(
        q=q,
        order=G,
        n=n,
        m=m,
        kernel_count=int(np.count_nonzero(in_kernel)),
        annihilator_count=int(np.count_nonzero(in_ann)),
        image_count=image,
        module_size=total // image,
        module_size_via_rank=via_rank,
        same_set=bool(np.array_equal(in_ann, in_kernel)),
    )
