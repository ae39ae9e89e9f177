"""Replicated (2,3) share vectors.

Party ``i`` (0-based) holds the pair ``(x_i, x_{i+1})``.  Both pairs of all
three parties live in one object: ``local[i]`` is party i's own share and
``next[i]`` its copy of its successor's share, so honest execution keeps
``next[i] == local[(i + 1) % 3]``.  Every array has a leading party axis of
length 3 followed by the lane shape.
"""
import numpy as np

WIDTHS = (32, 64)


def rotate(comp: np.ndarray) -> np.ndarray:
    """Party axis shifted by one: entry i becomes comp[i+1]."""
    return comp[_ROT]


_ROT = np.array([1, 2, 0])


def lane_mask(width: int) -> np.uint64:
    return np.uint64((1 << width) - 1)


def _check_width(width):
    if width not in WIDTHS:
        raise ValueError(f"unsupported lane width {width}; expected one of {WIDTHS}")


class _Shares:
    __slots__ = ("local", "next", "width")

    def __init__(self, local: np.ndarray, next: np.ndarray, width: int = 64):
        _check_width(width)
        if local.shape != next.shape or local.shape[:1] != (3,):
            raise ValueError(f"malformed share arrays {local.shape} / {next.shape}")
        self.local = local
        self.next = next
        self.width = width

    # construction -------------------------------------------------------

    @classmethod
    def from_components(cls, comp: np.ndarray, width: int = 64):
        """Build replicated shares from the three additive/XOR components."""
        comp = np.asarray(comp, dtype=np.uint64)
        return cls(comp, rotate(comp), width)

    @classmethod
    def zeros(cls, shape, width: int = 64):
        shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
        z = np.zeros((3,) + shape, dtype=np.uint64)
        return cls(z, z.copy(), width)

    @classmethod
    def concat(cls, items, axis: int = 0):
        items = list(items)
        width = items[0].width
        ax = axis + 1 if axis >= 0 else axis
        return cls(
            np.concatenate([s.local for s in items], axis=ax),
            np.concatenate([s.next for s in items], axis=ax),
            width,
        )

    @classmethod
    def stack(cls, items, axis: int = 0):
        items = list(items)
        ax = axis + 1 if axis >= 0 else axis
        return cls(
            np.stack([s.local for s in items], axis=ax),
            np.stack([s.next for s in items], axis=ax),
            items[0].width,
        )

    # shape helpers -----------------------------------------------------

    @property
    def shape(self) -> tuple:
        return self.local.shape[1:]

    @property
    def lanes(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    def __len__(self):
        return self.shape[0]

    def _new(self, local, next):
        return type(self)(local, next, self.width)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        full = (slice(None),) + idx
        return self._new(self.local[full], self.next[full])

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return self._new(self.local.reshape((3,) + shape), self.next.reshape((3,) + shape))

    def flatten(self):
        return self.reshape(-1)

    def broadcast_to(self, shape):
        shape = tuple(shape)
        lead = (3,) + (1,) * (len(shape) - len(self.shape)) + self.shape
        return self._new(np.broadcast_to(self.local.reshape(lead), (3,) + shape),
                         np.broadcast_to(self.next.reshape(lead), (3,) + shape))

    def expand_last(self, n: int):
        """Repeat every lane ``n`` times along a new trailing axis."""
        return self[..., None].broadcast_to(self.shape + (n,))

    def take(self, indices, axis: int = 0):
        ax = axis + 1 if axis >= 0 else axis
        return self._new(np.take(self.local, indices, axis=ax), np.take(self.next, indices, axis=ax))

    def swapaxes(self, a: int, b: int):
        return self._new(np.swapaxes(self.local, a + 1, b + 1), np.swapaxes(self.next, a + 1, b + 1))

    def materialize(self):
        """Contiguous private copy (drops broadcast views)."""
        return self._new(np.ascontiguousarray(self.local), np.ascontiguousarray(self.next))

    def components(self) -> np.ndarray:
        """The three components ``x_0, x_1, x_2`` as held in ``local``."""
        return self.local

    def consistent(self) -> bool:
        return bool(np.array_equal(self.next, rotate(self.local)))

    def _public_comp(self, value):
        """Components (value, 0, 0) broadcast to this shape, split into local/next."""
        value = np.asarray(value, dtype=np.uint64)
        value = np.broadcast_to(value, self.shape)
        local = np.zeros((3,) + self.shape, dtype=np.uint64)
        local[0] = value
        nxt = np.zeros_like(local)
        nxt[2] = value
        return local, nxt

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.shape}, width={self.width})"


class BoolShares(_Shares):
    """XOR-shared lanes: x = x_0 ^ x_1 ^ x_2."""

    __slots__ = ()

    def __xor__(self, other):
        if isinstance(other, BoolShares):
            return self._new(self.local ^ other.local, self.next ^ other.next)
        pl, pn = self._public_comp(other)
        return self._new(self.local ^ pl, self.next ^ pn)

    __rxor__ = __xor__

    def __and__(self, public):
        """AND with a public constant (local)."""
        if isinstance(public, _Shares):
            raise TypeError("secret AND needs a protocol round; use Session.and_")
        c = np.asarray(public, dtype=np.uint64)
        return self._new(self.local & c, self.next & c)

    __rand__ = __and__

    def __invert__(self):
        return self ^ lane_mask(self.width)

    def __rshift__(self, s: int):
        s = np.uint64(s)
        return self._new(self.local >> s, self.next >> s)

    def __lshift__(self, s: int):
        s = np.uint64(s)
        m = lane_mask(self.width)
        return self._new((self.local << s) & m, (self.next << s) & m)

    def xor_reduce(self, axis: int = 0):
        ax = axis + 1 if axis >= 0 else axis
        return self._new(
            np.bitwise_xor.reduce(self.local, axis=ax), np.bitwise_xor.reduce(self.next, axis=ax)
        )

    def sign_extend_bit(self):
        """Spread bit 0 of every component over the whole lane (local)."""
        m = lane_mask(self.width)
        neg = lambda a: (np.uint64(0) - (a & np.uint64(1))) & m
        return self._new(neg(self.local), neg(self.next))


class ArithShares(_Shares):
    """Additively shared lanes: x = x_0 + x_1 + x_2 mod 2^w."""

    __slots__ = ()

    def _wrap(self, a):
        return a if self.width == 64 else a & lane_mask(self.width)

    def __add__(self, other):
        if isinstance(other, ArithShares):
            return self._new(self._wrap(self.local + other.local), self._wrap(self.next + other.next))
        pl, pn = self._public_comp(np.asarray(other, dtype=np.uint64))
        return self._new(self._wrap(self.local + pl), self._wrap(self.next + pn))

    __radd__ = __add__

    def __neg__(self):
        return self._new(self._wrap(np.uint64(0) - self.local), self._wrap(np.uint64(0) - self.next))

    def __sub__(self, other):
        if isinstance(other, ArithShares):
            return self + (-other)
        return self + (np.uint64(0) - np.asarray(other, dtype=np.uint64))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, public):
        """Multiply by a public constant (local)."""
        if isinstance(public, _Shares):
            raise TypeError("secret product needs a protocol round; use Session.mul")
        c = np.asarray(public, dtype=np.uint64)
        return self._new(self._wrap(self.local * c), self._wrap(self.next * c))

    __rmul__ = __mul__

    def sum(self, axis: int = -1):
        """Local sum of lanes along ``axis``."""
        ax = axis + 1 if axis >= 0 else axis
        return self._new(
            self._wrap(self.local.sum(axis=ax, dtype=np.uint64)),
            self._wrap(self.next.sum(axis=ax, dtype=np.uint64)),
        )
