"""Finite approximations sigma: G -> Sym(d) and their quality statistics.

A permutation of [d] is an int64 array ``perm`` with ``perm[v] = sigma(v)``;
composition ``(s o t)[v] = s[t[v]]`` is ``s[t]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .field import DEFAULT_ENTRY_LIMIT, ResourceError
from .group import Element, FinitePermGroup, FreeGroup, Group, IntegerLattice

EXACT = "exact_homomorphism"
WORD = "word_extension"

# Versioned so that reports can record which stream produced a random model.
RNG_NAME = "numpy.PCG64/SeedSequence(master_seed, d)/v1"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def invert(perm: np.ndarray) -> np.ndarray:
    out = np.empty_like(perm)
    out[perm] = np.arange(perm.size, dtype=perm.dtype)
    return out


def compose(*perms: np.ndarray) -> np.ndarray:
    """Right-to-left composition: ``compose(a, b)[v] == a[b[v]]``."""
    out = perms[-1]
    for p in reversed(perms[:-1]):
        out = p[out]
    return out


def is_permutation(perm: np.ndarray, d: int) -> bool:
    return perm.shape == (d,) and np.array_equal(np.sort(perm), np.arange(d))


@dataclass(frozen=True, eq=False)
class SoficApprox:
    """One map sigma: G -> Sym(d), determined by the generator images.

    ``kind`` is ``exact_homomorphism`` when sigma is a genuine homomorphism
    (lattice quotients, regular representations of finite groups) and
    ``word_extension`` when sigma is extended from the generators along
    canonical forms.
    """

    group: Group
    d: int
    generator_images: tuple[np.ndarray, ...]
    kind: str
    side: int | None = None  # torus side length N for lattice quotients
    seed: int | None = None
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in (EXACT, WORD):
            raise ValueError(f"unknown approximation kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("degree d must be >= 1")
        imgs = tuple(_frozen(g) for g in self.generator_images)
        if len(imgs) != self.group.ngens:
            raise ValueError(f"expected {self.group.ngens} generator images, got {len(imgs)}")
        for g in imgs:
            if not is_permutation(g, self.d):
                raise ValueError("generator image is not a permutation of [d]")
        object.__setattr__(self, "generator_images", imgs)

    def identity(self) -> np.ndarray:
        return np.arange(self.d, dtype=np.int64)

    def _letter(self, x: int) -> np.ndarray:
        key = ("letter", x)
        if key not in self._cache:
            g = self.generator_images[abs(x) - 1]
            self._cache[key] = g if x > 0 else _frozen(invert(g))
        return self._cache[key]

    def evaluate(self, s: Element) -> np.ndarray:
        s = self.group.check(s)
        key = ("elem", s)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        g = self.group
        if isinstance(g, FinitePermGroup):
            out = _regular_image(g, s)
        elif isinstance(g, IntegerLattice):
            if self.side is not None:
                out = _torus_translation(self.side, s)
            else:
                # sigma(e_1)^{k_1} o ... o sigma(e_r)^{k_r}: rightmost factor acts first
                out = self.identity()
                for j, k in reversed(list(enumerate(s))):
                    step = self._letter(j + 1) if k >= 0 else self._letter(-(j + 1))
                    for _ in range(abs(k)):
                        out = step[out]
        elif isinstance(g, FreeGroup):
            out = self.identity()
            for x in reversed(s):
                out = self._letter(x)[out]
        else:
            raise TypeError(f"unsupported group {g}")
        out = _frozen(out)
        self._cache[key] = out
        return out

    def __repr__(self) -> str:
        return f"SoficApprox({self.group}, d={self.d}, kind={self.kind})"


def evaluate(sigma: SoficApprox, s: Element) -> np.ndarray:
    return sigma.evaluate(s)


def _torus_translation(n: int, s: tuple[int, ...]) -> np.ndarray:
    r = len(s)
    coords = np.indices((n,) * r).reshape(r, -1)
    shifted = (coords + np.array(s, dtype=np.int64)[:, None]) % n
    return np.ravel_multi_index(tuple(shifted), (n,) * r).astype(np.int64)


def _regular_image(g: FinitePermGroup, s: int) -> np.ndarray:
    # sigma(s) sends the index of x to the index of s x
    return np.asarray(g.table[s], dtype=np.int64)


def build_lattice_quotient(r: int, n: int, *, limit: int = DEFAULT_ENTRY_LIMIT) -> SoficApprox:
    """Z^r acting on (Z/n)^r by translation; points indexed in row-major order."""
    if r < 1 or n < 2:
        raise ValueError("need r >= 1 and n >= 2")
    d = n**r
    if d > limit:
        raise ResourceError(f"torus size {n}^{r} exceeds the limit {limit}")
    group = IntegerLattice(r)
    gens = tuple(_torus_translation(n, group.gen(j)) for j in range(r))
    return SoficApprox(group, d, gens, EXACT, side=n)


def build_finite_regular(group: FinitePermGroup) -> SoficApprox:
    """Left regular representation, d = |G|."""
    gens = tuple(_regular_image(group, group.gen(i)) for i in range(group.ngens))
    return SoficApprox(group, group.order, gens, EXACT)


def rung_rng(seed: int, d: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(d)])))


def build_free_random(k: int, d: int, seed: int) -> SoficApprox:
    """Independent uniform permutations for the k free generators."""
    if k < 1 or d < 1:
        raise ValueError("need k >= 1 and d >= 1")
    rng = rung_rng(seed, d)
    gens = tuple(rng.permutation(d).astype(np.int64) for _ in range(k))
    return SoficApprox(FreeGroup(k), d, gens, WORD, seed=seed)


@dataclass(frozen=True)
class Ladder:
    """Approximations of increasing degree standing in for a sofic sequence."""

    rungs: tuple[SoficApprox, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        rungs = tuple(self.rungs)
        if not rungs:
            raise ValueError("a ladder needs at least one rung")
        g = rungs[0].group
        for a, b in zip(rungs, rungs[1:]):
            if b.d <= a.d:
                raise ValueError("ladder degrees must strictly increase")
        for x in rungs:
            if x.group != g:
                raise ValueError("all rungs must share one group")
        object.__setattr__(self, "rungs", rungs)

    @property
    def group(self) -> Group:
        return self.rungs[0].group

    @property
    def degrees(self) -> list[int]:
        return [x.d for x in self.rungs]

    def __iter__(self):
        return iter(self.rungs)

    def __len__(self) -> int:
        return len(self.rungs)

    def describe(self) -> str:
        kind = self.rungs[0].kind
        return f"{self.group} {kind} d={','.join(map(str, self.degrees))}" + (
            f" seed={self.seed}" if self.seed is not None else ""
        )


def lattice_ladder(r: int, sides: Iterable[int], **kw) -> Ladder:
    return Ladder(tuple(build_lattice_quotient(r, n, **kw) for n in sides))


def free_ladder(k: int, degrees: Iterable[int], seed: int) -> Ladder:
    return Ladder(tuple(build_free_random(k, d, seed) for d in degrees), seed=seed)


def finite_ladder(group: FinitePermGroup) -> Ladder:
    return Ladder((build_finite_regular(group),))


@dataclass(frozen=True)
class DefectReport:
    """Fractions of [d] violating multiplicativity and separation.

    ``mult_defect[(s, t)]`` counts v with sigma(s)sigma(t)v != sigma(st)v;
    ``sep_defect[(s, t)]`` (s != t) counts v with sigma(s)v == sigma(t)v.
    Values are exact ``Fraction`` objects with denominator dividing d.
    """

    d: int
    window: tuple[Element, ...]
    mult_defect: dict
    sep_defect: dict

    def max_mult(self) -> Fraction:
        return max(self.mult_defect.values(), default=Fraction(0))

    def max_sep(self) -> Fraction:
        return max(self.sep_defect.values(), default=Fraction(0))


def defect_report(sigma: SoficApprox, window: Sequence[Element]) -> DefectReport:
    g = sigma.group
    win = tuple(dict.fromkeys(g.check(s) for s in window))
    d = sigma.d
    mult: dict = {}
    sep: dict = {}
    for s in win:
        ps = sigma.evaluate(s)
        for t in win:
            pt = sigma.evaluate(t)
            pst = sigma.evaluate(g.mul(s, t))
            mult[(s, t)] = Fraction(int(np.count_nonzero(ps[pt] != pst)), d)
            if s != t:
                sep[(s, t)] = Fraction(int(np.count_nonzero(ps == pt)), d)
    return DefectReport(d, win, mult, sep)


@dataclass(frozen=True)
class GoodSet:
    """Points v where sigma(s^{-1})(v) == sigma(s)^{-1}(v) for every s in ``support``."""

    support: frozenset
    members: np.ndarray = dc_field(repr=False)
    d: int = 0

    @property
    def complement_size(self) -> int:
        return self.d - int(self.members.size)


def good_set(sigma: SoficApprox, support: Iterable[Element]) -> GoodSet:
    g = sigma.group
    supp = frozenset(g.check(s) for s in support)
    ok = np.ones(sigma.d, dtype=bool)
    for s in sorted(supp, key=g.sort_key):
        ok &= sigma.evaluate(g.inv(s)) == invert(sigma.evaluate(s))
    members = np.flatnonzero(ok).astype(np.int64)
    members.setflags(write=False)
    return GoodSet(supp, members, sigma.d)

