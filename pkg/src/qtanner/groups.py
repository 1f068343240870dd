"""Finite groups as multiplication tables, with their regular actions.

Elements are the indices ``0..order-1``. Every constructor fixes a canonical
labelling so that a group descriptor plus element labels identify group
elements portably across runs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf2 import BitMatrix

__all__ = [
    "FiniteGroup",
    "GroupDescriptorError",
    "cyclic",
    "direct_product",
    "from_table",
    "left_regular_perm",
    "right_regular_perm",
    "is_right_transitive",
    "parse_group",
    "permutation_matrix",
    "quaternion8",
    "semidirect_c4_c4",
]

_VERIFY_MAX_ORDER = 256


class GroupDescriptorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table ``table[a, b] = a*b``."""

    table: np.ndarray
    labels: tuple[str, ...]
    descriptor: str
    identity: int = 0
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n) or n == 0:
            raise ValueError("multiplication table must be a non-empty square")
        if len(self.labels) != n or len(set(self.labels)) != n:
            raise ValueError("need one distinct label per element")
        _check_axioms(table, self.identity)
        inv = np.argmax(table == self.identity, axis=1)
        table.flags.writeable = False
        inv.flags.writeable = False
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "inverse", inv)

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def element_order(self, x: int) -> int:
        k, y = 1, int(x)
        while y != self.identity:
            y = int(self.table[y, x])
            k += 1
        return k

    def index(self, label) -> int:
        """Element index from a label, or from an integer index."""
        if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
            if not 0 <= label < self.order:
                raise ValueError(f"element index {label} out of range for order {self.order}")
            return int(label)
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValueError(f"unknown element label {label!r} in {self.descriptor}") from None

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def automorphisms(self) -> list[np.ndarray]:
        """All automorphisms as index maps, found by extending generator images."""
        return _automorphisms(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.labels, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.descriptor}, order={self.order})"


def _check_axioms(table: np.ndarray, identity: int) -> None:
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise ValueError("table entries out of range")
    full = np.arange(n)
    for axis in (0, 1):
        if not np.array_equal(np.sort(table, axis=axis), np.broadcast_to(full[:, None] if axis == 0 else full, (n, n))):
            raise ValueError("multiplication table is not a Latin square")
    if not (np.array_equal(table[identity], full) and np.array_equal(table[:, identity], full)):
        raise ValueError(f"element {identity} is not a two-sided identity")
    if n <= _VERIFY_MAX_ORDER:
        left = table[table, :]  # (a*b)*c indexed [a, b, c]
        right = table[:, table]  # a*(b*c) indexed [a, b, c]
        if not np.array_equal(left, right):
            raise ValueError("multiplication table is not associative")


# -- constructors -----------------------------------------------------------


def cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise ValueError(f"cyclic group order must be positive, got {m}")
    idx = np.arange(m)
    table = (idx[:, None] + idx[None, :]) % m
    return FiniteGroup(table, tuple(str(i) for i in range(m)), f"cyclic({m})")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Componentwise product; element (x, y) has index ``x * |h| + y``."""
    ng, nh = g.order, h.order
    xs, ys = np.divmod(np.arange(ng * nh), nh)
    table = g.table[xs[:, None], xs[None, :]] * nh + h.table[ys[:, None], ys[None, :]]
    labels = tuple(f"({g.labels[x]},{h.labels[y]})" for x, y in zip(xs, ys))
    return FiniteGroup(
        table, labels, f"product({g.descriptor},{h.descriptor})", identity=g.identity * nh + h.identity
    )


_Q8_LABELS = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
# unit products: _UNIT[u][v] = (sign, unit) for u, v in {1, i, j, k}
_UNIT = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def quaternion8() -> FiniteGroup:
    """Q8 = {±1, ±i, ±j, ±k}; index ``2*unit + (sign < 0)`` so that +1 is 0."""

    def decode(x):
        return (-1 if x % 2 else 1), x // 2

    table = np.zeros((8, 8), dtype=np.int64)
    for a, b in itertools.product(range(8), repeat=2):
        sa, ua = decode(a)
        sb, ub = decode(b)
        s, u = _UNIT[ua, ub]
        table[a, b] = 2 * u + (sa * sb * s < 0)
    return FiniteGroup(table, _Q8_LABELS, "quaternion8")


def semidirect_c4_c4(twist: str = "nontrivial") -> FiniteGroup:
    """C4 ⋊ C4 on pairs (x, y) = a^x b^y, index ``4x + y``.

    With the nontrivial twist b a b^-1 = a^-1; the trivial twist gives C4 x C4.
    """
    if twist not in ("trivial", "nontrivial"):
        raise ValueError(f"twist must be 'trivial' or 'nontrivial', got {twist!r}")
    xs, ys = np.divmod(np.arange(16), 4)
    if twist == "trivial":
        sign = np.ones(16, dtype=np.int64)
    else:
        sign = np.where(ys % 2, -1, 1)
    x = (xs[:, None] + sign[:, None] * xs[None, :]) % 4
    y = (ys[:, None] + ys[None, :]) % 4
    labels = tuple(f"({a},{b})" for a, b in zip(xs, ys))
    return FiniteGroup(x * 4 + y, labels, f"semidirect_c4_c4({twist})")


def from_table(table, labels: Sequence[str] | None = None) -> FiniteGroup:
    """Validate an arbitrary multiplication table; element 0 must be the identity."""
    arr = np.asarray(table, dtype=np.int64)
    if labels is None:
        labels = tuple(str(i) for i in range(arr.shape[0]))
    desc = "table(" + json.dumps(arr.tolist(), separators=(",", ":")) + ")"
    return FiniteGroup(arr, tuple(labels), desc)


# -- regular actions --------------------------------------------------------


def left_regular_perm(group: FiniteGroup, a: int) -> np.ndarray:
    """Index map g -> a*g."""
    return np.array(group.table[a, :])


def right_regular_perm(group: FiniteGroup, b: int) -> np.ndarray:
    """Index map g -> g*b^-1."""
    return np.array(group.table[:, group.inverse[b]])


def permutation_matrix(perm: Sequence[int]) -> BitMatrix:
    """Matrix with entry (g, h) = 1 iff h = perm[g]."""
    perm = np.asarray(perm)
    dense = np.zeros((perm.size, perm.size), dtype=np.uint8)
    dense[np.arange(perm.size), perm] = 1
    return BitMatrix.from_dense(dense)


def is_right_transitive(group: FiniteGroup, x: int) -> bool:
    """True iff g -> g*x is a single cycle on the whole group."""
    return group.element_order(x) == group.order


# -- automorphisms ----------------------------------------------------------


def _generating_set(group: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = {group.identity}
    for x in sorted(range(group.order), key=lambda e: -group.element_order(e)):
        if x in span:
            continue
        gens.append(x)
        span = _closure(group, gens)
        if len(span) == group.order:
            break
    return gens


def _closure(group: FiniteGroup, gens: Sequence[int]) -> set[int]:
    seen = {group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = group.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _extend(group: FiniteGroup, gens: Sequence[int], images: Sequence[int]) -> np.ndarray | None:
    phi = {group.identity: group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, t in zip(gens, images):
                y = group.mul(x, s)
                img = group.mul(phi[x], t)
                if y in phi:
                    if phi[y] != img:
                        return None
                else:
                    phi[y] = img
                    nxt.append(y)
        frontier = nxt
    out = np.array([phi[x] for x in range(group.order)])
    if len(set(out.tolist())) != group.order:
        return None
    if not np.array_equal(out[group.table], group.table[out[:, None], out[None, :]]):
        return None
    return out


def _automorphisms(group: FiniteGroup) -> list[np.ndarray]:
    gens = _generating_set(group)
    orders = [group.element_order(x) for x in range(group.order)]
    choices = [[y for y in range(group.order) if orders[y] == orders[g]] for g in gens]
    found = []
    for images in itertools.product(*choices):
        phi = _extend(group, gens, images)
        if phi is not None:
            found.append(phi)
    found.sort(key=lambda p: p.tolist())
    return found


# -- descriptors ------------------------------------------------------------


class _DescriptorParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> GroupDescriptorError:
        return GroupDescriptorError(f"group descriptor {self.text!r}, column {self.pos + 1}: {msg}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        self.skip()
        if not self.text.startswith(ch, self.pos):
            raise self.error(f"expected {ch!r}")
        self.pos += len(ch)

    def name(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a group name")
        return self.text[start : self.pos]

    def parse(self) -> FiniteGroup:
        g = self.group()
        self.skip()
        if self.pos != len(self.text):
            raise self.error("trailing characters")
        return g

    def group(self) -> FiniteGroup:
        self.skip()
        start = self.pos
        name = self.name()
        if name == "quaternion8":
            self.skip()
            if self.text.startswith("(", self.pos):
                self.expect("(")
                self.expect(")")
            return quaternion8()
        if name == "cyclic":
            self.expect("(")
            m = self.integer()
            self.expect(")")
            try:
                return cyclic(m)
            except ValueError as exc:
                raise self.error(str(exc)) from None
        if name == "product":
            self.expect("(")
            g = self.group()
            self.expect(",")
            h = self.group()
            self.expect(")")
            return direct_product(g, h)
        if name == "semidirect_c4_c4":
            self.expect("(")
            twist = self.name()
            self.expect(")")
            try:
                return semidirect_c4_c4(twist)
            except ValueError as exc:
                raise self.error(str(exc)) from None
        if name == "table":
            self.expect("(")
            depth, start = 0, self.pos
            while self.pos < len(self.text):
                ch = self.text[self.pos]
                if ch == "[":
                    depth += 1
                elif ch == "]":
                    depth -= 1
                elif ch == ")" and depth == 0:
                    break
                self.pos += 1
            try:
                rows = json.loads(self.text[start : self.pos])
                g = from_table(rows)
            except (json.JSONDecodeError, ValueError) as exc:
                raise self.error(f"bad inline table: {exc}") from None
            self.expect(")")
            return g
        self.pos = start
        raise self.error(f"unknown group family {name!r}")

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected an integer")
        return int(self.text[start : self.pos])


def parse_group(desc: str) -> FiniteGroup:
    """Parse ``cyclic(m)``, ``product(g,h)``, ``quaternion8``,
    ``semidirect_c4_c4(nontrivial|trivial)`` or ``table([[...]])``."""
    if not isinstance(desc, str):
        raise GroupDescriptorError(f"group descriptor must be a string, got {type(desc).__name__}")
    return _DescriptorParser(desc).parse()
