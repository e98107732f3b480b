"""Closed element algebra over cyclic, dihedral, wreath, and tuple shapes.

All shapes share one abstract multiplication, exposed as :func:`group_op`.
Permutations participate directly (see :mod:`cosetlab.perms`).  The wreath
shape follows the slot-permuting rule

    (g_1, ..., g_n, t) o (g'_1, ..., g'_n, t') = (g_{t'(1)} g'_1, ..., g_{t'(n)} g'_n, t + t')

where ``t'`` permutes slot indices cyclically by ``j -> j + t' (mod n)`` and
slot products use the shared multiplication.  A wreath element over two
permutation slots acts on the doubled point set and embeds into a symmetric
group of twice the degree; the embedding here is arranged to be a
homomorphism under left-to-right composition (the slot acting on a column is
the one indexed by the column's destination).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Union

from .perms import ExceedsCapError, Permutation, compose


class ShapeMismatchError(ValueError):
    """Raised when two elements of incompatible shapes are combined."""


@dataclass(frozen=True)
class CyclicElement:
    """Residue in the additive group of integers mod ``modulus``."""

    modulus: int
    value: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "value", self.value % self.modulus)

    def op(self, other: "CyclicElement") -> "CyclicElement":
        _check_shape(self, other)
        return CyclicElement(self.modulus, self.value + other.value)

    def inverse(self) -> "CyclicElement":
        return CyclicElement(self.modulus, -self.value)

    def identity_like(self) -> "CyclicElement":
        return CyclicElement(self.modulus, 0)

    def is_identity(self) -> bool:
        return self.value == 0

    def sort_key(self):
        return ("cyclic", self.modulus, self.value)

    def __str__(self):
        return f"{self.value} (mod {self.modulus})"


@dataclass(frozen=True)
class DihedralElement:
    """Element r^rot s^flip of the dihedral group of order 2*rotations.

    Multiplication uses the relation s r = r^-1 s, so
    (a, b) * (c, d) = (a + (-1)^b c, b xor d).
    """

    rotations: int
    rot: int
    flip: int

    def __post_init__(self):
        if self.rotations < 1:
            raise ValueError("rotation order must be positive")
        if self.flip not in (0, 1):
            raise ValueError("flip must be 0 or 1")
        object.__setattr__(self, "rot", self.rot % self.rotations)

    def op(self, other: "DihedralElement") -> "DihedralElement":
        _check_shape(self, other)
        sign = -1 if self.flip else 1
        return DihedralElement(self.rotations, self.rot + sign * other.rot,
                               self.flip ^ other.flip)

    def inverse(self) -> "DihedralElement":
        if self.flip:
            return self
        return DihedralElement(self.rotations, -self.rot, 0)

    def identity_like(self) -> "DihedralElement":
        return DihedralElement(self.rotations, 0, 0)

    def is_identity(self) -> bool:
        return self.rot == 0 and self.flip == 0

    def sort_key(self):
        return ("dihedral", self.rotations, self.flip, self.rot)

    def __str__(self):
        return f"r^{self.rot}" + ("s" if self.flip else "")


class WreathElement:
    """Tuple of same-shape slot elements plus a cyclic slot shift.

    A plain slotted class rather than a dataclass: wreath elements are
    constructed by the million when structured groups are streamed, so
    construction stays minimal.  Instances are immutable by convention.
    """

    __slots__ = ("slots", "shift")

    def __init__(self, slots: tuple["GroupElement", ...], shift: int):
        n = len(slots)
        if n < 1:
            raise ValueError("wreath element needs at least one slot")
        first = type(slots[0])
        for s in slots:
            if type(s) is not first:
                raise ShapeMismatchError("wreath slots mix shapes")
        self.slots = slots
        self.shift = shift % n

    def __eq__(self, other):
        return (isinstance(other, WreathElement) and self.shift == other.shift
                and self.slots == other.slots)

    def __hash__(self):
        return hash((self.slots, self.shift))

    def __repr__(self):
        return f"WreathElement({self.slots!r}, {self.shift})"

    @property
    def copies(self) -> int:
        return len(self.slots)

    def op(self, other: "WreathElement") -> "WreathElement":
        _check_shape(self, other)
        n = len(self.slots)
        slots = tuple(group_op(self.slots[(j + other.shift) % n], other.slots[j])
                      for j in range(n))
        return WreathElement(slots, self.shift + other.shift)

    def inverse(self) -> "WreathElement":
        n = len(self.slots)
        slots = tuple(invert(self.slots[(m - self.shift) % n]) for m in range(n))
        return WreathElement(slots, -self.shift)

    def identity_like(self) -> "WreathElement":
        return WreathElement(tuple(s.identity_like() for s in self.slots), 0)

    def is_identity(self) -> bool:
        return self.shift == 0 and all(s.is_identity() for s in self.slots)

    def sort_key(self):
        return ("wreath", len(self.slots), tuple(s.sort_key() for s in self.slots),
                self.shift)

    def __str__(self):
        inner = ", ".join(str(s) for s in self.slots)
        return f"({inner}; shift {self.shift})"


@dataclass(frozen=True)
class TupleElement:
    """Direct-product element with independent components."""

    items: tuple["GroupElement", ...]

    def op(self, other: "TupleElement") -> "TupleElement":
        if not isinstance(other, TupleElement) or len(self.items) != len(other.items):
            raise ShapeMismatchError("tuple shape mismatch")
        return TupleElement(tuple(group_op(a, b) for a, b in zip(self.items, other.items)))

    def inverse(self) -> "TupleElement":
        return TupleElement(tuple(invert(a) for a in self.items))

    def identity_like(self) -> "TupleElement":
        return TupleElement(tuple(a.identity_like() for a in self.items))

    def is_identity(self) -> bool:
        return all(a.is_identity() for a in self.items)

    def sort_key(self):
        return ("tuple", tuple(a.sort_key() for a in self.items))


GroupElement = Union[Permutation, CyclicElement, DihedralElement, WreathElement,
                     TupleElement]


def _check_shape(x: GroupElement, y: GroupElement) -> None:
    if type(x) is not type(y):
        raise ShapeMismatchError(f"cannot combine {type(x).__name__} with {type(y).__name__}")
    if isinstance(x, Permutation):
        if x.degree != y.degree:
            raise ShapeMismatchError(f"degree mismatch: {x.degree} != {y.degree}")
    elif isinstance(x, CyclicElement):
        if x.modulus != y.modulus:
            raise ShapeMismatchError(f"modulus mismatch: {x.modulus} != {y.modulus}")
    elif isinstance(x, DihedralElement):
        if x.rotations != y.rotations:
            raise ShapeMismatchError(f"dihedral order mismatch: {x.rotations} != {y.rotations}")
    elif isinstance(x, WreathElement):
        if len(x.slots) != len(y.slots):
            raise ShapeMismatchError("wreath copy-count mismatch")


def group_op(x: GroupElement, y: GroupElement) -> GroupElement:
    """The shared multiplication; for permutations this reads left to right."""
    if isinstance(x, Permutation) and isinstance(y, Permutation):
        return compose(x, y)
    if type(x) is not type(y):
        raise ShapeMismatchError(f"cannot combine {type(x).__name__} with {type(y).__name__}")
    return x.op(y)


def invert(x: GroupElement) -> GroupElement:
    return x.inverse()


def identity_like(x: GroupElement) -> GroupElement:
    return x.identity_like()


def element_key(x: GroupElement):
    """Total order key within a shape; doubles as the canonical serialized form."""
    return x.sort_key()


def element_pow(x: GroupElement, e: int) -> GroupElement:
    out = x.identity_like()
    base = x if e >= 0 else invert(x)
    for _ in range(abs(e)):
        out = group_op(out, base)
    return out


# -- JSON forms ---------------------------------------------------------------

def element_to_json(x: GroupElement):
    if isinstance(x, Permutation):
        return {"kind": "perm", "images": list(x.images)}
    if isinstance(x, CyclicElement):
        return {"kind": "cyclic", "modulus": x.modulus, "value": x.value}
    if isinstance(x, DihedralElement):
        return {"kind": "dihedral", "rotations": x.rotations, "rot": x.rot,
                "flip": x.flip}
    if isinstance(x, WreathElement):
        return {"kind": "wreath", "slots": [element_to_json(s) for s in x.slots],
                "shift": x.shift}
    if isinstance(x, TupleElement):
        return {"kind": "tuple", "items": [element_to_json(s) for s in x.items]}
    raise TypeError(f"not a group element: {x!r}")


def element_from_json(data) -> GroupElement:
    kind = data.get("kind")
    if kind == "perm":
        return Permutation(tuple(data["images"]))
    if kind == "cyclic":
        return CyclicElement(data["modulus"], data["value"])
    if kind == "dihedral":
        return DihedralElement(data["rotations"], data["rot"], data["flip"])
    if kind == "wreath":
        return WreathElement(tuple(element_from_json(s) for s in data["slots"]),
                             data["shift"])
    if kind == "tuple":
        return TupleElement(tuple(element_from_json(s) for s in data["items"]))
    raise ValueError(f"unknown element kind: {kind!r}")


# -- groups given by generator lists -------------------------------------------

DEFAULT_CAP = 100_000


@dataclass
class FiniteGroup:
    """A finite group presented by generators over one element shape.

    ``elements_hint``, when provided, is a zero-argument callable yielding
    every element in a fixed deterministic order (used for structured groups
    such as wreath products over an already-enumerated base, where
    breadth-first closure would be needlessly slow and materializing the
    list may be needlessly large).
    """

    generators: tuple[GroupElement, ...]
    identity: GroupElement
    name: str = ""
    elements_hint: Callable[[], Iterable[GroupElement]] | None = None
    known_order: int | None = None
    _elements: list[GroupElement] | None = field(default=None, repr=False)
    _member_keys: frozenset | None = field(default=None, repr=False)

    def __init__(self, generators: Iterable[GroupElement], identity: GroupElement,
                 name: str = "", elements_hint=None, known_order: int | None = None):
        self.generators = tuple(generators)
        self.identity = identity
        self.name = name
        self.elements_hint = elements_hint
        self.known_order = known_order
        self._elements = None
        self._member_keys = None

    def iter_elements(self, cap: int = DEFAULT_CAP) -> Iterator[GroupElement]:
        """Stream every element once, without forcing the list into memory.

        The cap guards open-ended closure; a hint-backed group of known order
        streams freely since its size was fixed at construction.
        """
        if self._elements is not None:
            return iter(self._elements)
        if self.elements_hint is not None:
            if self.known_order is not None:
                return iter(self.elements_hint())

            def capped():
                count = 0
                for g in self.elements_hint():
                    count += 1
                    if count > cap:
                        raise ExceedsCapError(f"group exceeds cap {cap}")
                    yield g
            return capped()
        return iter(self.elements(cap))

    def elements(self, cap: int = DEFAULT_CAP) -> list[GroupElement]:
        if self._elements is None:
            if self.known_order is not None and self.known_order > cap:
                raise ExceedsCapError(
                    f"group has {self.known_order} elements, cap {cap}")
            if self.elements_hint is not None:
                self._elements = list(self.iter_elements(cap))
            else:
                self._elements = enumerate_group(self, cap)
        return self._elements

    def order(self, cap: int = DEFAULT_CAP) -> int:
        if self.known_order is not None:
            return self.known_order
        if self._elements is not None:
            return len(self._elements)
        return sum(1 for _ in self.iter_elements(cap))

    def contains(self, x: GroupElement, cap: int = DEFAULT_CAP) -> bool:
        if self._member_keys is None:
            self._member_keys = frozenset(element_key(g) for g in self.elements(cap))
        return element_key(x) in self._member_keys

    def sorted_elements(self, cap: int = DEFAULT_CAP) -> list[GroupElement]:
        return sorted(self.elements(cap), key=element_key)

    def __repr__(self):
        label = self.name or f"{len(self.generators)} generators"
        return f"FiniteGroup({label})"


def close_under_op(seeds: Iterable[GroupElement], identity: GroupElement,
                   cap: int = DEFAULT_CAP) -> list[GroupElement]:
    """Breadth-first closure from the identity, layers tie-broken by serialized form."""
    gens = sorted(seeds, key=element_key)
    seen = {element_key(identity): identity}
    out = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = group_op(a, g)
                k = element_key(b)
                if k not in seen:
                    seen[k] = b
                    nxt.append(b)
                    if len(seen) > cap:
                        raise ExceedsCapError(f"closure exceeds cap {cap}")
        nxt.sort(key=element_key)
        out.extend(nxt)
        frontier = nxt
    return out


def enumerate_group(g: FiniteGroup, cap: int = DEFAULT_CAP) -> list[GroupElement]:
    return close_under_op(g.generators, g.identity, cap)


def reduce_generators(elements: Iterable[GroupElement], identity: GroupElement,
                      cap: int = DEFAULT_CAP) -> list[GroupElement]:
    """Greedy small generating set: add canonical-order elements until they span."""
    todo = sorted(elements, key=element_key)
    gens: list[GroupElement] = []
    span = {element_key(identity)}
    for x in todo:
        if element_key(x) in span:
            continue
        gens.append(x)
        span = {element_key(e) for e in close_under_op(gens, identity, cap)}
    return gens


# -- standard constructions -----------------------------------------------------

def symmetric_group(n: int) -> FiniteGroup:
    gens = []
    if n >= 2:
        gens.append(Permutation.from_cycles(n, [(1, 2)]))
    if n >= 3:
        gens.append(Permutation.from_cycles(n, [tuple(range(1, n + 1))]))
    return FiniteGroup(gens, Permutation.identity(n), name=f"S{n}",
                       known_order=math.factorial(n))


def cyclic_group(m: int) -> FiniteGroup:
    gens = [CyclicElement(m, 1)] if m > 1 else []
    return FiniteGroup(gens, CyclicElement(m, 0), name=f"Z{m}",
                       elements_hint=lambda: [CyclicElement(m, v) for v in range(m)],
                       known_order=m)


def dihedral_group(n: int) -> FiniteGroup:
    gens = [DihedralElement(n, 1, 0), DihedralElement(n, 0, 1)]
    return FiniteGroup(
        gens, DihedralElement(n, 0, 0), name=f"D{n}",
        elements_hint=lambda: [DihedralElement(n, r, f)
                               for f in (0, 1) for r in range(n)],
        known_order=2 * n)


def wreath_group(base: FiniteGroup, copies: int, cap: int = DEFAULT_CAP) -> FiniteGroup:
    """The wreath product of ``base`` with the cyclic shift on ``copies`` slots."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    e = base.identity
    gens: list[GroupElement] = []
    for slot in range(copies):
        for g in base.generators:
            slots = tuple(g if j == slot else e for j in range(copies))
            gens.append(WreathElement(slots, 0))
    gens.append(WreathElement((e,) * copies, 1))

    def all_elements():
        base_elems = base.elements(cap)
        return (WreathElement(slots, t)
                for t in range(copies)
                for slots in itertools.product(base_elems, repeat=copies))

    known = None
    if base.known_order is not None:
        known = base.known_order ** copies * copies
    return FiniteGroup(gens, WreathElement((e,) * copies, 0),
                       name=f"{base.name or 'G'} wr Z{copies}",
                       elements_hint=all_elements, known_order=known)


def product_group(factors: list[FiniteGroup], cap: int = DEFAULT_CAP) -> FiniteGroup:
    """Direct product over TupleElement components."""
    idents = tuple(f.identity for f in factors)
    gens = []
    for idx, f in enumerate(factors):
        for g in f.generators:
            gens.append(TupleElement(tuple(g if j == idx else idents[j]
                                           for j in range(len(factors)))))

    def all_elements():
        parts = [f.elements(cap) for f in factors]
        return (TupleElement(combo) for combo in itertools.product(*parts))

    known = None
    if all(f.known_order is not None for f in factors):
        known = 1
        for f in factors:
            known *= f.known_order
    return FiniteGroup(gens, TupleElement(idents), name="product",
                       elements_hint=all_elements, known_order=known)


def group_to_json(g: FiniteGroup):
    if all(isinstance(x, Permutation) for x in (*g.generators, g.identity)):
        return {"degree": g.identity.degree,
                "generators": [list(x.images) for x in g.generators]}
    return {"identity": element_to_json(g.identity),
            "generators": [element_to_json(x) for x in g.generators]}


def group_from_json(data) -> FiniteGroup:
    if "degree" in data:
        n = data["degree"]
        gens = [Permutation(tuple(images)) for images in data["generators"]]
        return FiniteGroup(gens, Permutation.identity(n))
    identity = element_from_json(data["identity"])
    gens = [element_from_json(x) for x in data["generators"]]
    return FiniteGroup(gens, identity)


# -- the doubled-point action of two-slot wreath elements ------------------------

def gamma_index(row: int, col: int, n: int) -> int:
    """Flatten the point (row, col) with col in {1, 2} to a point of 1..2n."""
    return row + (col - 1) * n


def gamma_point_image(w: WreathElement, row: int, col: int) -> tuple[int, int]:
    """Image of the point (row, col), col in {1, 2}, under a two-slot wreath element."""
    target = (col - 1 + w.shift) % 2
    return w.slots[target].apply(row), target + 1


def wreath_embed(w: WreathElement) -> Permutation:
    """Flatten a two-slot wreath element over degree-n permutations into one
    permutation of 2n points.

    The map is a group homomorphism for the slot-permuting multiplication and
    left-to-right composition; column c of the doubled point set is sent to
    column c + shift and acted on by the slot with that destination index.
    """
    if len(w.slots) != 2:
        raise ValueError("embedding is defined for two-slot wreath elements")
    if not all(isinstance(s, Permutation) for s in w.slots):
        raise ShapeMismatchError("embedding needs permutation slots")
    n = w.slots[0].degree
    if w.slots[1].degree != n:
        raise ShapeMismatchError("slot degrees differ")
    images = [0] * (2 * n)
    for col in (1, 2):
        for row in range(1, n + 1):
            img_row, img_col = gamma_point_image(w, row, col)
            images[gamma_index(row, col, n) - 1] = gamma_index(img_row, img_col, n)
    return Permutation(tuple(images))


def wreath_unembed(p: Permutation, n: int) -> WreathElement:
    """Two-sided inverse of :func:`wreath_embed` on its image.

    Raises ValueError when ``p`` does not respect the two-column structure.
    """
    if p.degree != 2 * n:
        raise ValueError(f"expected degree {2 * n}, got {p.degree}")
    shift = 0 if p.apply(1) <= n else 1
    slot_images: list[list[int]] = [[0] * n, [0] * n]
    for col in (1, 2):
        target = (col - 1 + shift) % 2
        for row in range(1, n + 1):
            img = p.apply(gamma_index(row, col, n))
            img_col = 1 if img <= n else 2
            if img_col != target + 1:
                raise ValueError("permutation does not preserve the column structure")
            slot_images[target][row - 1] = img - (img_col - 1) * n
    return WreathElement((Permutation(tuple(slot_images[0])),
                          Permutation(tuple(slot_images[1]))), shift)
