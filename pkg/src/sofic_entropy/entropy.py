"""Finite-level entropy estimators for modules over F_q[G].

Principal presentations M = (F_q G)^n / (F_q G)^m f go through the permutation
block maps sigma(f), sigma_bar(f) and sigma_bar(f*); every estimate is
``k * log(q) / d`` for an exact integer k obtained by elimination over F_q.
Finite-dimensional module patches feed the relative and Folner estimators.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence, TypeVar

import numpy as np

from .field import (
    DEFAULT_ENTRY_LIMIT,
    FieldSpec,
    FqMatrix,
    ResourceError,
    SparseTriplets,
    inverse,
    rank,
    subspace_dims,
)
from .group import (
    Element,
    FreeGroup,
    GroupMismatchError,
    GroupRingElem,
    GroupRingMatrix,
    IntegerLattice,
    block_diag,
)
from .sofic import Ladder, SoficApprox, good_set

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "SOFIC_ENTROPY_THREADS"


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(threads))


def map_rungs(fn: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """Ordered map; results are gathered in input order whatever the pool size."""
    n = thread_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class PrincipalPresentation:
    """M = (F_q G)^n / (F_q G)^m f; m = 0 is the free module of rank n."""

    f: GroupRingMatrix

    def __post_init__(self) -> None:
        if self.f.n < 1:
            raise ValueError("a presentation needs n >= 1 generators")

    @classmethod
    def free(cls, field: FieldSpec, group, n: int) -> "PrincipalPresentation":
        return cls(GroupRingMatrix(field, group, 0, n, ()))

    @classmethod
    def principal(cls, f: GroupRingElem) -> "PrincipalPresentation":
        return cls(GroupRingMatrix.scalar(f))

    @property
    def field(self) -> FieldSpec:
        return self.f.field

    @property
    def group(self):
        return self.f.group

    @property
    def m(self) -> int:
        return self.f.m

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def fstar(self) -> GroupRingMatrix:
        return self.f.star()


def _block_map(g: GroupRingMatrix, sigma: SoficApprox, transpose: bool) -> SparseTriplets:
    """Sum over s of g_{ij,s} times the permutation matrix of sigma(s) (or its transpose).

    Untransposed: an (d m') x (d n') matrix with entry 1 at (i d + sigma_s(v), j d + v).
    Transposed:   an (d n') x (d m') matrix with entry 1 at (j d + v, i d + sigma_s(v)).
    """
    d = sigma.d
    rows, cols, vals = [], [], []
    base = np.arange(d, dtype=np.int64)
    for i in range(g.m):
        for j in range(g.n):
            for s, c in g.entries[i][j].terms:
                perm = sigma.evaluate(s)
                r = i * d + perm
                k = j * d + base
                if transpose:
                    r, k = k, r
                rows.append(r)
                cols.append(k)
                vals.append(np.full(d, c, dtype=np.int64))
    shape = (d * g.m, d * g.n)
    if transpose:
        shape = shape[::-1]
    if rows:
        return SparseTriplets(g.field, *shape, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))
    empty = np.zeros(0, dtype=np.int64)
    return SparseTriplets(g.field, *shape, empty, empty, empty)


def assemble_maps(
    pres: PrincipalPresentation, sigma: SoficApprox, *, limit: int = DEFAULT_ENTRY_LIMIT
) -> tuple[SparseTriplets, SparseTriplets, SparseTriplets]:
    """Return ``(sigma(f), sigma_bar(f), sigma_bar(f*))``.

    Shapes are dm x dn, dn x dm and dm x dn.  Coordinates of (F_q^d)^k are
    block-major: index ``j * d + v``.
    """
    if sigma.group != pres.group:
        raise GroupMismatchError(f"approximation group {sigma.group} differs from presentation group {pres.group}")
    d = sigma.d
    if (d * pres.m) * (d * pres.n) > limit:
        raise ResourceError(f"{d * pres.m}x{d * pres.n} maps exceed the entry limit {limit}")
    sig_f = _block_map(pres.f, sigma, transpose=False)
    sigbar_f = _block_map(pres.f, sigma, transpose=True)
    sigbar_fstar = _block_map(pres.fstar, sigma, transpose=True)
    return sig_f, sigbar_f, sigbar_fstar


@dataclass(frozen=True)
class EntropyRecord:
    """Exact dimension counts at one rung and the estimates derived from them."""

    d: int
    q: int
    n: int
    m: int
    dim_ker_sigma_f: int
    dim_ker_sigma_bar_fstar: int
    rank_sigma_bar_f: int
    good_set_complement: int

    @property
    def coker_dim(self) -> int:
        """d n - rank sigma_bar(f): the integer behind h_alg_est."""
        return self.d * self.n - self.rank_sigma_bar_f

    @property
    def h_top_est(self) -> float:
        return math.log(self.q) * self.dim_ker_sigma_bar_fstar / self.d

    @property
    def h_alg_est(self) -> float:
        return math.log(self.q) * self.coker_dim / self.d

    @property
    def gap_bound(self) -> float:
        return math.log(self.q) * self.n * self.good_set_complement / self.d

    @property
    def gap_ok(self) -> bool:
        gap = abs(self.dim_ker_sigma_f - self.dim_ker_sigma_bar_fstar)
        if gap > self.n * self.good_set_complement:
            return False
        return self.good_set_complement > 0 or gap == 0

    @property
    def duality_ok(self) -> bool:
        return self.dim_ker_sigma_f == self.coker_dim

    @property
    def range_ok(self) -> bool:
        top = self.d * self.n
        return 0 <= self.dim_ker_sigma_bar_fstar <= top and 0 <= self.coker_dim <= top

    @property
    def peters_equal(self) -> bool:
        return self.dim_ker_sigma_bar_fstar == self.coker_dim

    @property
    def ok(self) -> bool:
        return self.gap_ok and self.duality_ok and self.range_ok


@dataclass(frozen=True)
class EntropyEstimate:
    ladder: str
    records: tuple[EntropyRecord, ...]

    def tail(self) -> tuple[EntropyRecord, ...]:
        """Last half of the ladder (at least one rung)."""
        k = len(self.records)
        return self.records[k // 2 :] if k > 1 else self.records

    def tail_stats(self) -> dict[str, float]:
        t = self.tail()
        top = [r.h_top_est for r in t]
        alg = [r.h_alg_est for r in t]
        return {
            "h_top_tail_max": max(top),
            "h_top_tail_min": min(top),
            "h_alg_tail_max": max(alg),
            "h_alg_tail_min": min(alg),
        }

    @property
    def last(self) -> EntropyRecord:
        return self.records[-1]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)


def rung_record(pres: PrincipalPresentation, sigma: SoficApprox, *, limit: int = DEFAULT_ENTRY_LIMIT) -> EntropyRecord:
    d, n = sigma.d, pres.n
    sig_f, sigbar_f, sigbar_fstar = assemble_maps(pres, sigma, limit=limit)
    if pres.m == 0:
        r_f = r_bar = r_star = 0
    else:
        r_f = rank(sig_f, limit=limit)
        r_bar = rank(sigbar_f, limit=limit)
        r_star = rank(sigbar_fstar, limit=limit)
    supp = pres.f.support() | pres.fstar.support()
    w = good_set(sigma, supp)
    return EntropyRecord(
        d=d,
        q=pres.field.p,
        n=n,
        m=pres.m,
        dim_ker_sigma_f=d * n - r_f,
        dim_ker_sigma_bar_fstar=d * n - r_star,
        rank_sigma_bar_f=r_bar,
        good_set_complement=w.complement_size,
    )


def principal_estimates(
    pres: PrincipalPresentation,
    ladder: Ladder,
    *,
    threads: int | None = None,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> EntropyEstimate:
    if ladder.group != pres.group:
        raise GroupMismatchError(f"ladder group {ladder.group} differs from presentation group {pres.group}")
    records = map_rungs(lambda s: rung_record(pres, s, limit=limit), list(ladder.rungs), threads)
    return EntropyEstimate(ladder.describe(), tuple(records))


class PatchCoverageError(ValueError):
    """A translate needed by a computation leaves the module patch."""


@dataclass(frozen=True, eq=False)
class PartialModulePatch:
    """A finite-dimensional window of an F_q[G]-module.

    ``actions[s]`` is a D x D matrix whose column c is s applied to basis
    vector c.  ``domains[s]`` marks the columns where that image is genuine;
    columns outside the domain belong to basis vectors whose translate lies
    outside the patch, and applying s to a vector supported there raises
    ``PatchCoverageError``.  Elements without their own matrix are applied
    letter by letter along their canonical form.
    """

    field: FieldSpec
    group: object
    basis: tuple[str, ...]
    actions: Mapping[Element, np.ndarray]
    a_gens: np.ndarray
    b_gens: np.ndarray
    domains: Mapping[Element, np.ndarray] = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        D = len(self.basis)
        p = self.field.p
        acts = {}
        doms = {}
        for s, a in self.actions.items():
            s = self.group.check(s)
            a = np.asarray(a, dtype=np.int64) % p
            if a.shape != (D, D):
                raise ValueError(f"action of {self.group.format(s)} must be {D}x{D}")
            a.setflags(write=False)
            acts[s] = a
            dom = np.asarray(self.domains.get(s, np.ones(D, dtype=bool)), dtype=bool)
            if dom.shape != (D,):
                raise ValueError("domain masks must have length D")
            dom.setflags(write=False)
            doms[s] = dom
        object.__setattr__(self, "actions", acts)
        object.__setattr__(self, "domains", doms)
        for name in ("a_gens", "b_gens"):
            g = np.asarray(getattr(self, name), dtype=np.int64).reshape(-1, D) % p if D else np.zeros((0, 0), np.int64)
            g.setflags(write=False)
            object.__setattr__(self, name, g)
        self._validate()

    def _validate(self) -> None:
        D = self.dim
        e = self.group.identity()
        if e in self.actions and not np.array_equal(self.actions[e], np.eye(D, dtype=np.int64)):
            raise ValueError("the identity must act as the identity matrix")
        for s, a in self.actions.items():
            si = self.group.inv(s)
            if si not in self.actions:
                continue
            b, dom_b, dom_a = self.actions[si], self.domains[si], self.domains[s]
            for c in np.flatnonzero(dom_b):
                col = b[:, c]
                if np.any(col[~dom_a] != 0):
                    continue
                if not np.array_equal((a @ col) % self.field.p, np.eye(D, dtype=np.int64)[c]):
                    raise ValueError(f"action of {self.group.format(s)} does not invert {self.group.format(si)}")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def window(self) -> tuple[Element, ...]:
        return tuple(self.actions)

    def _act_direct(self, s: Element, vecs: np.ndarray, label: str) -> np.ndarray:
        dom = self.domains[s]
        bad = np.any(vecs[:, ~dom] != 0, axis=1)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            cols = np.flatnonzero((vecs[i] != 0) & ~dom)
            raise PatchCoverageError(
                f"translate {label} of basis vector {self.basis[cols[0]]} lies outside the patch"
            )
        return (vecs @ self.actions[s].T) % self.field.p

    def _letters(self, s: Element) -> list[Element]:
        g = self.group
        if isinstance(g, IntegerLattice):
            out = []
            for j, k in enumerate(s):
                out += [g.gen(j, 1 if k > 0 else -1)] * abs(k)
            return out
        if isinstance(g, FreeGroup):
            return [(x,) for x in s]
        raise PatchCoverageError(f"no action matrix for {g.format(s)}")

    def act(self, s: Element, vecs: np.ndarray) -> np.ndarray:
        """Apply s to each row of ``vecs``."""
        s = self.group.check(s)
        vecs = np.atleast_2d(np.asarray(vecs, dtype=np.int64)) % self.field.p
        label = self.group.format(s)
        if s in self.actions:
            return self._act_direct(s, vecs, label)
        letters = self._letters(s)
        for x in letters:
            if x not in self.actions:
                raise PatchCoverageError(f"no action matrix for {label} (missing {self.group.format(x)})")
        # rightmost letter acts first
        for x in reversed(letters):
            vecs = self._act_direct(x, vecs, label)
        return vecs

    def with_subspaces(self, a_gens=None, b_gens=None) -> "PartialModulePatch":
        return PartialModulePatch(
            self.field,
            self.group,
            self.basis,
            self.actions,
            self.a_gens if a_gens is None else a_gens,
            self.b_gens if b_gens is None else b_gens,
            self.domains,
        )


def free_module_patch(
    field: FieldSpec, group: IntegerLattice, radius: int, a_gens=None, b_gens=None
) -> PartialModulePatch:
    """Box [-radius, radius]^r of the free module F_q[Z^r].

    Basis vectors are the group elements of the box; the generators and their
    inverses act by translation, undefined where the translate leaves the box.
    ``a_gens`` and ``b_gens`` default to span{e}.
    """
    r = group.rank
    pts = list(product(range(-radius, radius + 1), repeat=r))
    index = {p: i for i, p in enumerate(pts)}
    D = len(pts)
    actions, domains = {}, {}
    actions[group.identity()] = np.eye(D, dtype=np.int64)
    for j in range(r):
        for sign in (1, -1):
            s = group.gen(j, sign)
            a = np.zeros((D, D), dtype=np.int64)
            dom = np.zeros(D, dtype=bool)
            for p, i in index.items():
                t = group.mul(s, p)
                if t in index:
                    a[index[t], i] = 1
                    dom[i] = True
            actions[s], domains[s] = a, dom
    e = np.zeros(D, dtype=np.int64)
    e[index[group.identity()]] = 1
    a_gens = e[None, :] if a_gens is None else a_gens
    b_gens = e[None, :] if b_gens is None else b_gens
    basis = tuple(group.format(p) for p in pts)
    return PartialModulePatch(field, group, basis, actions, a_gens, b_gens, domains)


def unit_vector(patch: PartialModulePatch, name: str) -> np.ndarray:
    v = np.zeros(patch.dim, dtype=np.int64)
    v[patch.basis.index(name)] = 1
    return v


def quotient_patch(f: GroupRingElem, a_gens=None, b_gens=None) -> PartialModulePatch:
    """The finite module F_q[Z] / F_q[Z] f as a complete patch.

    With f = sum_{k=lo}^{hi} c_k t^k the module is F_q[t]/(t^{-lo} f), of
    dimension hi - lo, basis 1, t, ..., t^{D-1}; t acts by the companion
    matrix.  Subspaces default to the whole module.
    """
    group = f.group
    if not (isinstance(group, IntegerLattice) and group.rank == 1):
        raise ValueError("quotient patches are defined over Z only")
    if f.is_zero():
        raise ValueError("f must be nonzero")
    field = f.field
    p = field.p
    exps = [s[0] for s, _ in f.terms]
    lo, hi = min(exps), max(exps)
    D = hi - lo
    if D == 0:
        raise ValueError("f is a unit; the quotient module is zero")
    lead = field.inv(f.coeff((hi,)))
    # t^D = -sum_{k<D} c_k t^k after normalizing to a monic polynomial
    comp = np.zeros((D, D), dtype=np.int64)
    for k in range(D - 1):
        comp[k + 1, k] = 1
    for k in range(D):
        comp[k, D - 1] = (-f.coeff((k + lo,)) * lead) % p
    t = group.gen(0)
    actions = {
        group.identity(): np.eye(D, dtype=np.int64),
        t: comp,
        group.inv(t): inverse(FqMatrix(field, comp)).data,
    }
    basis = tuple(group.format((k,)) for k in range(D))
    full = np.eye(D, dtype=np.int64)
    return PartialModulePatch(
        field,
        group,
        basis,
        actions,
        full if a_gens is None else a_gens,
        full if b_gens is None else b_gens,
    )


@dataclass(frozen=True)
class RelativeEstimateRecord:
    d: int
    q: int
    window: tuple[str, ...]
    dim_a: int
    dim_s: int
    dim_intersection: int

    @property
    def dim_image(self) -> int:
        return self.d * self.dim_a - self.dim_intersection

    @property
    def value(self) -> float:
        return math.log(self.q) * self.dim_image / self.d

    @property
    def range_ok(self) -> bool:
        return 0 <= self.dim_image <= self.d * self.dim_a


def relative_estimate(
    patch: PartialModulePatch,
    sigma: SoficApprox,
    window: Iterable[Element] | None = None,
    *,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> RelativeEstimateRecord:
    """Image of A^d in M^d / span{delta_v (x) b - delta_{sigma(s)v} (x) s b}.

    ``window`` defaults to the patch's non-identity action elements.
    """
    g = patch.group
    if sigma.group != g:
        raise GroupMismatchError(f"approximation group {sigma.group} differs from patch group {g}")
    if window is None:
        window = [s for s in patch.window if s != g.identity()]
    window = list(dict.fromkeys(g.check(s) for s in window))
    d, D, p = sigma.d, patch.dim, patch.field.p
    b = patch.b_gens
    a = patch.a_gens
    n_rel = d * b.shape[0] * len(window)
    if (d * D) * max(n_rel + d * a.shape[0], 1) > limit:
        raise ResourceError(f"relative subspace of dimension {d * D} exceeds the entry limit {limit}")
    v = np.arange(d)
    blocks = []
    for s in window:
        perm = sigma.evaluate(s)
        sb = patch.act(s, b) if b.shape[0] else b
        for bj, sbj in zip(b, sb):
            gen = np.zeros((d, d, D), dtype=np.int64)
            gen[v, v] += bj
            gen[v, perm] -= sbj
            blocks.append(gen.reshape(d, d * D) % p)
    s_gens = np.vstack(blocks) if blocks else np.zeros((0, d * D), dtype=np.int64)
    a_blocks = []
    for aj in a:
        gen = np.zeros((d, d, D), dtype=np.int64)
        gen[v, v] = aj
        a_blocks.append(gen.reshape(d, d * D))
    a_gens = np.vstack(a_blocks) if a_blocks else np.zeros((0, d * D), dtype=np.int64)
    dim_ad, dim_s, _, dim_int = subspace_dims(patch.field, a_gens, s_gens, d * D, limit=limit)
    dim_a = rank(FqMatrix(patch.field, a)) if a.shape[0] else 0
    assert dim_ad == d * dim_a
    return RelativeEstimateRecord(d, p, tuple(g.format(s) for s in window), dim_a, dim_s, dim_int)


@dataclass(frozen=True)
class FolnerRecord:
    side: int
    box_size: int
    dim_sum: int
    q: int
    running_inf: float

    @property
    def value(self) -> float:
        return math.log(self.q) * self.dim_sum / self.box_size


def folner_entropy(
    patch: PartialModulePatch, box_sides: Iterable[int], a_gens=None
) -> list[FolnerRecord]:
    """log q * dim(sum_{s in [0,L)^r} s^{-1} A) / L^r for each side L, with running infimum."""
    g = patch.group
    if not isinstance(g, IntegerLattice):
        raise ValueError("Folner boxes are defined for lattice groups only")
    a = patch.a_gens if a_gens is None else np.atleast_2d(np.asarray(a_gens, dtype=np.int64)) % patch.field.p
    if a.size == 0:
        a = np.zeros((0, patch.dim), dtype=np.int64)
    sides = sorted(set(int(L) for L in box_sides))
    if not sides or sides[0] < 1:
        raise ValueError("box sides must be positive")
    r = g.rank
    steps = [g.gen(j, -1) for j in range(r)]
    for s in steps:
        if s not in patch.actions:
            raise PatchCoverageError(f"patch lacks the action of {g.format(s)}")
    translates: dict[tuple[int, ...], np.ndarray] = {g.identity(): a}
    out: list[FolnerRecord] = []
    best = math.inf
    for L in sides:
        pts = list(product(range(L), repeat=r))
        for x in pts:
            if x in translates:
                continue
            j = next(k for k in range(r) if x[k] > 0)
            prev = tuple(x[k] - (k == j) for k in range(r))
            label = g.format(g.inv(x))
            try:
                translates[x] = patch._act_direct(steps[j], translates[prev], label)
            except PatchCoverageError as exc:
                raise PatchCoverageError(f"box side {L}: {exc}") from None
        stack = np.vstack([translates[x] for x in pts]) if a.shape[0] else np.zeros((0, patch.dim), np.int64)
        dim = rank(FqMatrix(patch.field, stack)) if stack.shape[0] else 0
        value = math.log(patch.field.p) * dim / len(pts)
        best = min(best, value)
        out.append(FolnerRecord(L, len(pts), dim, patch.field.p, best))
    return out


@dataclass(frozen=True)
class ProbeRecord:
    d: int
    q: int
    rank_sigma_f: int
    bound: float

    @property
    def submodule_est(self) -> float:
        """Estimate of h(RGf | RG) = log q - h_alg(RG / RGf) = log q * rank / d."""
        return math.log(self.q) * self.rank_sigma_f / self.d

    @property
    def quotient_est(self) -> float:
        return math.log(self.q) * (self.d - self.rank_sigma_f) / self.d

    @property
    def bound_ok(self) -> bool:
        return self.submodule_est >= self.bound


@dataclass(frozen=True)
class ZeroDivisorReport:
    f: str
    support_size: int
    bound: float
    records: tuple[ProbeRecord, ...]
    tolerance: float

    @property
    def all_rungs_ok(self) -> bool:
        return all(r.bound_ok for r in self.records)

    @property
    def largest_rung_ok(self) -> bool:
        return self.records[-1].bound_ok

    @property
    def quotient_tail_max(self) -> float:
        k = len(self.records)
        tail = self.records[k // 2 :] if k > 1 else self.records
        return max(r.quotient_est for r in tail)

    @property
    def quotient_vanishing(self) -> bool:
        return self.quotient_tail_max <= self.tolerance

    def reading(self) -> str:
        if self.quotient_vanishing:
            return (
                "quotient entropy vanishes along the ladder tail: evidence consistent with "
                "injective right multiplication by f (numerical evidence, not a proof)"
            )
        return (
            "quotient entropy does not vanish along the ladder tail: no evidence for "
            "injectivity of right multiplication by f at this scale"
        )


def probe_bound(q: int, support_size: int) -> float:
    """log|{r f : r in F_q}| / (2|supp f| + 1)^2 with |{r f}| = q."""
    return math.log(q) / (2 * support_size + 1) ** 2


def zero_divisor_probe(
    f: GroupRingElem,
    ladder: Ladder,
    *,
    tolerance: float = 0.05,
    threads: int | None = None,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> ZeroDivisorReport:
    if f.is_zero():
        raise ValueError("the zero-divisor probe needs a nonzero f")
    pres = PrincipalPresentation.principal(f)
    bound = probe_bound(f.field.p, len(f.support()))

    def one(sigma: SoficApprox) -> ProbeRecord:
        sig_f, _, _ = assemble_maps(pres, sigma, limit=limit)
        return ProbeRecord(sigma.d, f.field.p, rank(sig_f, limit=limit), bound)

    records = map_rungs(one, list(ladder.rungs), threads)
    return ZeroDivisorReport(str(f), len(f.support()), bound, tuple(records), tolerance)


@dataclass(frozen=True)
class AdditionRecord:
    """Cokernel dimensions for f1, f2 and diag(f1, f2) at one rung."""

    d: int
    q: int
    coker_f1: int
    coker_f2: int
    coker_total: int

    @property
    def residual(self) -> int:
        return self.coker_total - self.coker_f1 - self.coker_f2

    @property
    def relative_dim(self) -> int:
        """Total minus quotient: the integer behind h(M1 | M1 + M2) for M1 = coker f1."""
        return self.coker_total - self.coker_f2

    @property
    def ok(self) -> bool:
        return self.residual == 0

    def h(self, k: int) -> float:
        return math.log(self.q) * k / self.d


def _coker_dim(pres: PrincipalPresentation, sigma: SoficApprox, limit: int) -> int:
    if pres.m == 0:
        return sigma.d * pres.n
    _, sigbar, _ = assemble_maps(pres, sigma, limit=limit)
    return sigma.d * pres.n - rank(sigbar, limit=limit)


def addition_check(
    f1: GroupRingMatrix,
    f2: GroupRingMatrix,
    ladder: Ladder,
    *,
    threads: int | None = None,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> list[AdditionRecord]:
    """Compare h_alg of diag(f1, f2) with h_alg(f1) + h_alg(f2) at every rung."""
    if f1.field != f2.field or f1.group != f2.group:
        raise GroupMismatchError("f1 and f2 must share field and group")
    p1, p2 = PrincipalPresentation(f1), PrincipalPresentation(f2)
    pd = PrincipalPresentation(block_diag(f1, f2))

    def one(sigma: SoficApprox) -> AdditionRecord:
        return AdditionRecord(
            sigma.d,
            f1.field.p,
            _coker_dim(p1, sigma, limit),
            _coker_dim(p2, sigma, limit),
            _coker_dim(pd, sigma, limit),
        )

    return map_rungs(one, list(ladder.rungs), threads)


def degspan(f: GroupRingElem) -> int:
    """max exponent - min exponent of a nonzero Laurent polynomial over Z."""
    exps = [s[0] for s, _ in f.terms]
    return max(exps) - min(exps) if exps else 0
