"""Groups with decidable word problems and exact group-ring arithmetic over F_p.

Group elements are plain hashable canonical keys:

* ``IntegerLattice``: a tuple of ``rank`` ints,
* ``FreeGroup``: a reduced word, a tuple of nonzero ints where ``i + 1`` is the
  i-th generator and ``-(i + 1)`` its inverse,
* ``FinitePermGroup``: an index into the enumerated element list.

Equality of elements is equality of keys.  The group object does the
arithmetic and validates that a key belongs to it.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Any, Hashable, Iterable, Iterator, Sequence

import numpy as np

from .field import FieldSpec

Element = Hashable

_LATTICE_NAMES = ("u", "v", "w", "x", "y", "z")
_FREE_NAMES = tuple(string.ascii_lowercase)


class GroupMismatchError(ValueError):
    """Elements or ring elements from different groups or fields were combined."""


class Group:
    """Common interface; subclasses are frozen dataclasses."""

    generator_names: tuple[str, ...]

    def identity(self) -> Element:
        raise NotImplementedError

    def mul(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def inv(self, a: Element) -> Element:
        raise NotImplementedError

    def check(self, a: Any) -> Element:
        raise NotImplementedError

    def gen(self, i: int, k: int = 1) -> Element:
        """The i-th generator raised to the integer power k."""
        raise NotImplementedError

    def format(self, a: Element) -> str:
        raise NotImplementedError

    def sort_key(self, a: Element) -> Any:
        return a

    @property
    def ngens(self) -> int:
        return len(self.generator_names)

    def generators(self) -> list[Element]:
        return [self.gen(i) for i in range(self.ngens)]

    def power(self, a: Element, k: int) -> Element:
        base = a if k >= 0 else self.inv(a)
        out = self.identity()
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    def mul_many(self, elems: Iterable[Element]) -> Element:
        out = self.identity()
        for x in elems:
            out = self.mul(out, x)
        return out


def _fmt_power(name: str, k: int) -> str:
    return name if k == 1 else f"{name}^{k}"


@dataclass(frozen=True)
class IntegerLattice(Group):
    """Z^rank, written multiplicatively with generators t (rank 1) or u, v, w, ..."""

    rank: int

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= len(_LATTICE_NAMES):
            raise ValueError(f"lattice rank must be in 1..{len(_LATTICE_NAMES)}")

    @property
    def generator_names(self) -> tuple[str, ...]:  # type: ignore[override]
        return ("t",) if self.rank == 1 else _LATTICE_NAMES[: self.rank]

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def check(self, a: Any) -> tuple[int, ...]:
        if not (isinstance(a, tuple) and len(a) == self.rank and all(isinstance(x, (int, np.integer)) for x in a)):
            raise GroupMismatchError(f"{a!r} is not an element of Z^{self.rank}")
        return a

    def mul(self, a, b):
        self.check(a)
        self.check(b)
        return tuple(int(x) + int(y) for x, y in zip(a, b))

    def inv(self, a):
        self.check(a)
        return tuple(-int(x) for x in a)

    def gen(self, i: int, k: int = 1):
        v = [0] * self.rank
        v[i] = k
        return tuple(v)

    def format(self, a) -> str:
        parts = [_fmt_power(n, int(k)) for n, k in zip(self.generator_names, a) if k != 0]
        return "".join(parts) or "1"

    def __str__(self) -> str:
        return "Z" if self.rank == 1 else f"Z^{self.rank}"


@dataclass(frozen=True)
class FreeGroup(Group):
    """Free group on generators a, b, c, ...; elements are reduced words."""

    rank: int

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= len(_FREE_NAMES):
            raise ValueError(f"free group rank must be in 1..{len(_FREE_NAMES)}")

    @property
    def generator_names(self) -> tuple[str, ...]:  # type: ignore[override]
        return _FREE_NAMES[: self.rank]

    def identity(self) -> tuple[int, ...]:
        return ()

    def check(self, a: Any) -> tuple[int, ...]:
        if not isinstance(a, tuple):
            raise GroupMismatchError(f"{a!r} is not a free-group word")
        for i, x in enumerate(a):
            if not isinstance(x, (int, np.integer)) or x == 0 or abs(x) > self.rank:
                raise GroupMismatchError(f"{a!r} is not a word in F_{self.rank}")
            if i and a[i - 1] == -x:
                raise GroupMismatchError(f"{a!r} is not reduced")
        return a

    @staticmethod
    def reduce(letters: Iterable[int]) -> tuple[int, ...]:
        out: list[int] = []
        for x in letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(int(x))
        return tuple(out)

    def mul(self, a, b):
        self.check(a)
        self.check(b)
        return self.reduce(a + b)

    def inv(self, a):
        self.check(a)
        return tuple(-x for x in reversed(a))

    def gen(self, i: int, k: int = 1):
        letter = i + 1 if k > 0 else -(i + 1)
        return (letter,) * abs(k)

    def format(self, a) -> str:
        if not a:
            return "1"
        parts = []
        i = 0
        while i < len(a):
            j = i
            while j < len(a) and a[j] == a[i]:
                j += 1
            name = self.generator_names[abs(a[i]) - 1]
            parts.append(_fmt_power(name, (j - i) * (1 if a[i] > 0 else -1)))
            i = j
        return "".join(parts)

    def __str__(self) -> str:
        return f"free({self.rank})"


@dataclass(frozen=True)
class FinitePermGroup(Group):
    """Finite group generated by permutations of range(degree).

    Elements are enumerated breadth-first from the identity (index 0) by
    left multiplication with the generators, so indices are deterministic.
    The product is composition, ``(s t)(x) = s(t(x))``.
    """

    degree: int
    perm_generators: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()
    label: str = dc_field(default="", compare=False)
    max_order: int = dc_field(default=4096, compare=False, repr=False)

    def __post_init__(self) -> None:
        gens = tuple(tuple(int(x) for x in g) for g in self.perm_generators)
        for g in gens:
            if sorted(g) != list(range(self.degree)):
                raise ValueError(f"{g} is not a permutation of range({self.degree})")
        object.__setattr__(self, "perm_generators", gens)
        names = self.names or tuple(f"s{i}" for i in range(len(gens)))
        if len(names) != len(gens):
            raise ValueError("one name per generator required")
        object.__setattr__(self, "names", tuple(names))
        self._check_associative()

    @property
    def generator_names(self) -> tuple[str, ...]:  # type: ignore[override]
        return self.names

    @cached_property
    def elements(self) -> np.ndarray:
        ident = tuple(range(self.degree))
        found = {ident: 0}
        order = [ident]
        head = 0
        while head < len(order):
            x = order[head]
            head += 1
            for g in self.perm_generators:
                y = tuple(g[x[i]] for i in range(self.degree))
                if y not in found:
                    if len(order) >= self.max_order:
                        raise ValueError(f"group order exceeds {self.max_order}")
                    found[y] = len(order)
                    order.append(y)
        return np.array(order, dtype=np.int64).reshape(len(order), self.degree)

    @property
    def order(self) -> int:
        return int(self.elements.shape[0])

    def index_of(self, perm: Sequence[int]) -> int:
        codes = self._codes
        c = int(np.dot(np.asarray(perm, dtype=np.int64), self._radix))
        pos = int(np.searchsorted(codes[0], c))
        if pos >= codes[0].size or codes[0][pos] != c:
            raise GroupMismatchError(f"{tuple(perm)} is not in the group")
        return int(codes[1][pos])

    @cached_property
    def _radix(self) -> np.ndarray:
        return self.degree ** np.arange(self.degree, dtype=np.int64)

    @cached_property
    def _codes(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.elements @ self._radix
        order = np.argsort(c, kind="stable")
        return c[order], order

    @cached_property
    def table(self) -> np.ndarray:
        """``table[i, j]`` is the index of element_i * element_j."""
        e = self.elements
        comp = np.take_along_axis(
            np.broadcast_to(e[:, None, :], (self.order, self.order, self.degree)),
            np.broadcast_to(e[None, :, :], (self.order, self.order, self.degree)),
            axis=2,
        )
        codes = comp @ self._radix
        sorted_codes, order = self._codes
        return order[np.searchsorted(sorted_codes, codes)]

    @cached_property
    def inverse_table(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int64)
        rows, cols = np.nonzero(self.table == 0)
        inv[rows] = cols
        return inv

    def _check_associative(self) -> None:
        t = self.table
        n = self.order
        if n <= 64:
            left = t[t]  # [a, b, c] -> (ab)c
            right = t[np.arange(n)[:, None, None], t[None, :, :]]  # a(bc)
            ok = np.array_equal(left, right)
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, n, size=(3, 4096))
            ok = np.array_equal(t[t[a, b], c], t[a, t[b, c]])
        if not ok:
            raise ValueError("multiplication table is not associative")

    def identity(self) -> int:
        return 0

    def check(self, a: Any) -> int:
        if not isinstance(a, (int, np.integer)) or isinstance(a, bool) or not 0 <= a < self.order:
            raise GroupMismatchError(f"{a!r} is not an element index of {self}")
        return int(a)

    def mul(self, a, b):
        return int(self.table[self.check(a), self.check(b)])

    def inv(self, a):
        return int(self.inverse_table[self.check(a)])

    def gen(self, i: int, k: int = 1):
        g = self.index_of(self.perm_generators[i])
        return self.power(g, k)

    def format(self, a) -> str:
        return "1" if a == 0 else f"g{a}"

    def __str__(self) -> str:
        return self.label or f"perm({self.degree}; {len(self.perm_generators)} gens)"


def cyclic_group(n: int) -> FinitePermGroup:
    """Z/n with generator ``s``."""
    if n < 1:
        raise ValueError("cyclic group order must be >= 1")
    gen = tuple((i + 1) % n for i in range(n))
    return FinitePermGroup(n, (gen,), ("s",), label=f"Z/{n}")


def symmetric_group(m: int) -> FinitePermGroup:
    """S_m generated by ``s`` = (0 1) and ``r`` = (0 1 ... m-1)."""
    if m < 2:
        raise ValueError("symmetric group degree must be >= 2")
    s = list(range(m))
    s[0], s[1] = 1, 0
    r = tuple((i + 1) % m for i in range(m))
    return FinitePermGroup(m, (tuple(s), r), ("s", "r"), label=f"S{m}")


def dihedral_group(n: int) -> FinitePermGroup:
    """Symmetries of the n-gon: ``r`` rotation, ``s`` reflection."""
    if n < 3:
        raise ValueError("dihedral group needs n >= 3")
    r = tuple((i + 1) % n for i in range(n))
    s = tuple((-i) % n for i in range(n))
    return FinitePermGroup(n, (r, s), ("r", "s"), label=f"D{n}")


def _same(a, b, what: str) -> None:
    if a != b:
        raise GroupMismatchError(f"{what} mismatch: {a} vs {b}")


@dataclass(frozen=True)
class GroupRingElem:
    """Finitely supported F_p-valued function on a group, in canonical form.

    ``terms`` holds ``(element, coefficient)`` pairs with nonzero
    coefficients, distinct elements, sorted by the group's element order.
    """

    field: FieldSpec
    group: Group
    terms: tuple[tuple[Element, int], ...] = ()

    def __post_init__(self) -> None:
        acc: dict[Element, int] = {}
        for s, c in self.terms:
            s = self.group.check(s)
            acc[s] = (acc.get(s, 0) + int(c)) % self.field.p
        terms = tuple(sorted(((s, c) for s, c in acc.items() if c), key=lambda t: self.group.sort_key(t[0])))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def zero(cls, field: FieldSpec, group: Group) -> "GroupRingElem":
        return cls(field, group, ())

    @classmethod
    def one(cls, field: FieldSpec, group: Group) -> "GroupRingElem":
        return cls(field, group, ((group.identity(), 1),))

    @classmethod
    def monomial(cls, field: FieldSpec, group: Group, s: Element, c: int = 1) -> "GroupRingElem":
        return cls(field, group, ((s, c),))

    def _compat(self, other: "GroupRingElem") -> None:
        if not isinstance(other, GroupRingElem):
            raise TypeError(f"cannot combine GroupRingElem with {type(other).__name__}")
        _same(self.field, other.field, "field")
        _same(self.group, other.group, "group")

    def __add__(self, other: "GroupRingElem") -> "GroupRingElem":
        self._compat(other)
        return GroupRingElem(self.field, self.group, self.terms + other.terms)

    def __neg__(self) -> "GroupRingElem":
        return GroupRingElem(self.field, self.group, tuple((s, -c) for s, c in self.terms))

    def __sub__(self, other: "GroupRingElem") -> "GroupRingElem":
        return self + (-other)

    def __mul__(self, other: "GroupRingElem | int") -> "GroupRingElem":
        if isinstance(other, (int, np.integer)):
            return GroupRingElem(self.field, self.group, tuple((s, c * int(other)) for s, c in self.terms))
        self._compat(other)
        mul = self.group.mul
        return GroupRingElem(
            self.field,
            self.group,
            tuple((mul(s, t), a * b) for s, a in self.terms for t, b in other.terms),
        )

    __rmul__ = __mul__

    def star(self) -> "GroupRingElem":
        """The involution sum f_s s -> sum f_s s^{-1}."""
        inv = self.group.inv
        return GroupRingElem(self.field, self.group, tuple((inv(s), c) for s, c in self.terms))

    def support(self) -> frozenset:
        return frozenset(s for s, _ in self.terms)

    def coeff(self, s: Element) -> int:
        for t, c in self.terms:
            if t == s:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Element, int]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for s, c in self.terms:
            word = self.group.format(s)
            if word == "1":
                parts.append(str(c))
            else:
                parts.append(word if c == 1 else f"{c}{word}")
        return " + ".join(parts)


def ring_add(f: GroupRingElem, g: GroupRingElem) -> GroupRingElem:
    return f + g


def ring_mul(f: GroupRingElem, g: GroupRingElem) -> GroupRingElem:
    return f * g


def star(f: GroupRingElem) -> GroupRingElem:
    return f.star()


def support(f: GroupRingElem) -> frozenset:
    return f.support()


@dataclass(frozen=True)
class GroupRingMatrix:
    """An m x n matrix over F_p[group]; presents (F_p G)^n / (F_p G)^m f."""

    field: FieldSpec
    group: Group
    m: int
    n: int
    entries: tuple[tuple[GroupRingElem, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0:
            raise ValueError("matrix shape must be nonnegative")
        rows = tuple(tuple(r) for r in self.entries)
        if not rows and self.m:
            rows = tuple((GroupRingElem.zero(self.field, self.group),) * self.n for _ in range(self.m))
        if len(rows) != self.m or any(len(r) != self.n for r in rows):
            raise ValueError(f"entries do not form a {self.m}x{self.n} array")
        for r in rows:
            for e in r:
                _same(e.field, self.field, "field")
                _same(e.group, self.group, "group")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[GroupRingElem]], field: FieldSpec, group: Group, n: int | None = None):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else n
        if ncols is None:
            raise ValueError("column count required for an empty matrix")
        return cls(field, group, len(rows), ncols, tuple(tuple(r) for r in rows))

    @classmethod
    def scalar(cls, f: GroupRingElem) -> "GroupRingMatrix":
        return cls(f.field, f.group, 1, 1, ((f,),))

    def __getitem__(self, ij: tuple[int, int]) -> GroupRingElem:
        i, j = ij
        return self.entries[i][j]

    def star(self) -> "GroupRingMatrix":
        """Transpose with entrywise involution: (f*)_{ij} = (f_{ji})*."""
        return GroupRingMatrix(
            self.field,
            self.group,
            self.n,
            self.m,
            tuple(tuple(self.entries[j][i].star() for j in range(self.m)) for i in range(self.n)),
        )

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        _same(self.field, other.field, "field")
        _same(self.group, other.group, "group")
        if self.n != other.m:
            raise ValueError(f"shape mismatch {self.m}x{self.n} @ {other.m}x{other.n}")
        zero = GroupRingElem.zero(self.field, self.group)
        out = []
        for i in range(self.m):
            row = []
            for j in range(other.n):
                acc = zero
                for k in range(self.n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(tuple(row))
        return GroupRingMatrix(self.field, self.group, self.m, other.n, tuple(out))

    def support(self) -> frozenset:
        out: set = set()
        for r in self.entries:
            for e in r:
                out |= e.support()
        return frozenset(out)

    def __str__(self) -> str:
        return " ; ".join(", ".join(str(e) for e in r) for r in self.entries)


def matrix_star(f: GroupRingMatrix) -> GroupRingMatrix:
    return f.star()


def block_diag(f1: GroupRingMatrix, f2: GroupRingMatrix) -> GroupRingMatrix:
    _same(f1.field, f2.field, "field")
    _same(f1.group, f2.group, "group")
    zero = GroupRingElem.zero(f1.field, f1.group)
    rows = [tuple(r) + (zero,) * f2.n for r in f1.entries]
    rows += [(zero,) * f1.n + tuple(r) for r in f2.entries]
    return GroupRingMatrix(f1.field, f1.group, f1.m + f2.m, f1.n + f2.n, tuple(rows))
