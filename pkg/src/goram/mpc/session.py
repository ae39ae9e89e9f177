"""Three-party runtime: correlated randomness, lockstep protocol steps, metrics.

The three servers are driven in lockstep inside one process.  Share arrays
carry a leading party axis, so a protocol step computes all three parties'
local values with one vectorised numpy expression and then performs exactly
one :meth:`Transport.exchange` for the messages of that round.
"""
import math
from dataclasses import dataclass

import numpy as np

from .prf import PrfStream, derive_key
from .shares import ArithShares, BoolShares, _check_width, rotate
from .transport import CLIENT, InProcessTransport, Transport


class IntegrityError(RuntimeError):
    """Replicated copies disagree (debugging aid, not a malicious-security check)."""


@dataclass(frozen=True)
class Metrics:
    rounds: int
    bytes_sent: tuple[int, int, int]
    client_bytes: int = 0

    @property
    def total_bytes(self) -> int:
        return sum(self.bytes_sent)

    def __sub__(self, other: "Metrics") -> "Metrics":
        return Metrics(
            self.rounds - other.rounds,
            tuple(a - b for a, b in zip(self.bytes_sent, other.bytes_sent)),
            self.client_bytes - other.client_bytes,
        )

    def __add__(self, other: "Metrics") -> "Metrics":
        return Metrics(
            self.rounds + other.rounds,
            tuple(a + b for a, b in zip(self.bytes_sent, other.bytes_sent)),
            self.client_bytes + other.client_bytes,
        )

    def as_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "bytes_sent": list(self.bytes_sent),
            "client_bytes": self.client_bytes,
            "total_bytes": self.total_bytes,
        }


ZERO_METRICS = Metrics(0, (0, 0, 0), 0)


class PartyRuntime:
    """Handle for one computation server: its id and the two seeds it holds."""

    def __init__(self, index: int, session: "Session"):
        self.index = index
        self.session = session
        # pair key j is shared by parties j and j-1
        self.seeds = (session._pair_keys[index], session._pair_keys[(index + 1) % 3])

    @property
    def id(self) -> int:
        return self.index + 1

    @property
    def successor(self) -> int:
        return (self.index + 1) % 3 + 1

    @property
    def predecessor(self) -> int:
        return (self.index - 1) % 3 + 1

    def __repr__(self):
        return f"PartyRuntime(S{self.id})"


def _as_seed(seed) -> bytes:
    if isinstance(seed, bytes):
        return seed
    if isinstance(seed, int):
        return seed.to_bytes(16, "little", signed=True)
    return str(seed).encode()


def _encode(arr: np.ndarray, width: int) -> bytes:
    return np.ascontiguousarray(arr, dtype="<u8" if width == 64 else "<u4").tobytes()


def _decode(buf: bytes, width: int) -> np.ndarray:
    return np.frombuffer(buf, dtype="<u8" if width == 64 else "<u4").astype(np.uint64)


class Session:
    """One protocol session: three lockstep servers, a client, one transport.

    :param master_seed: all correlated randomness (pairwise PRF keys, client
        input masks, shuffle permutations) is derived from it, so two sessions
        with the same seed produce byte-identical transcripts.
    :param width: lane width in bits (32 or 64).
    """

    def __init__(self, master_seed=0, width: int = 64, transport: Transport | None = None,
                 record: bool = False):
        _check_width(width)
        self.master_seed = _as_seed(master_seed)
        self.width = width
        self._pair_keys = tuple(
            PrfStream(derive_key(self.master_seed, f"pair-{j}")) for j in range(3)
        )
        self.client_prf = PrfStream(derive_key(self.master_seed, "client"))
        self.parties = tuple(PartyRuntime(i, self) for i in range(3))
        self.transport = transport if transport is not None else InProcessTransport(record)

    def fork(self, label: str) -> "Session":
        """Independent session (fresh keys, own transport) for parallel work."""
        return Session(derive_key(self.master_seed, f"fork-{label}"), self.width,
                       record=getattr(self.transport, "log", None) is not None)

    # -- randomness ------------------------------------------------------

    def pair_stream(self, a: int, b: int) -> PrfStream:
        """PRF stream known to exactly parties ``a`` and ``b`` (0-based)."""
        if {a, b} == {0, 1}:
            return self._pair_keys[1]
        if {a, b} == {1, 2}:
            return self._pair_keys[2]
        if {a, b} == {0, 2}:
            return self._pair_keys[0]
        raise ValueError(f"no pair key for parties {a}, {b}")

    def _pair_words(self, shape) -> np.ndarray:
        n = math.prod(shape)
        out = np.empty((3, n), dtype=np.uint64)
        for j, k in enumerate(self._pair_keys):
            out[j] = k.view(n)
        return out.reshape((3,) + tuple(shape))

    def zero_components(self, shape, arithmetic: bool = False) -> np.ndarray:
        """Components of a fresh sharing of zero; needs no communication.

        Party ``i`` derives ``alpha_i = F(k_i) op F(k_{i+1})`` from its two keys.
        """
        shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
        s = self._pair_words(shape)
        if arithmetic:
            out = s - rotate(s)
            return out if self.width == 64 else out & np.uint64((1 << self.width) - 1)
        out = s ^ rotate(s)
        return out if self.width == 64 else out & np.uint64((1 << self.width) - 1)

    def _zero_many(self, shapes, arithmetic: bool = False) -> list[np.ndarray]:
        """Zero-sharing components for several shapes, drawn in one PRF call per key."""
        if len(shapes) == 1:
            return [self.zero_components(shapes[0], arithmetic)]
        sizes = [math.prod(sh) for sh in shapes]
        comp = self.zero_components((sum(sizes),), arithmetic)
        out, off = [], 0
        for sh, n in zip(shapes, sizes):
            out.append(comp[:, off:off + n].reshape((3,) + tuple(sh)))
            off += n
        return out

    def zero_sharing(self, shape) -> BoolShares:
        """A replicated sharing of zero.

        Each party only knows its own component, so filling the ``next`` copies
        costs one round; use :meth:`zero_components` when only the local
        components are needed.
        """
        comp = self.zero_components(shape)
        return BoolShares(comp, self._pass_to_predecessor([comp])[0], self.width)

    # -- communication ---------------------------------------------------

    def round(self, sends: dict) -> dict:
        """One round: ``{(src, dst): uint64 array}`` in, same keys with decoded arrays out."""
        payloads = {k: _encode(v, self.width) for k, v in sends.items()}
        got = self.transport.exchange(payloads)
        return {k: _decode(v, self.width).reshape(np.shape(sends[k])) for k, v in got.items()}

    def _pass_to_predecessor(self, zs: list[np.ndarray]) -> list[np.ndarray]:
        """Every party i sends its component z[i] to party i-1; returns the ``next`` arrays."""
        flat = [z.reshape(3, -1) for z in zs]
        cat = np.concatenate(flat, axis=1) if len(flat) > 1 else flat[0]
        w = self.width
        got = self.transport.exchange({(i, (i - 1) % 3): _encode(cat[i], w) for i in range(3)})
        recv = np.empty(cat.shape, dtype=np.uint64)
        dt = "<u8" if w == 64 else "<u4"
        for i in range(3):
            recv[i] = np.frombuffer(got[((i + 1) % 3, i)], dtype=dt)
        if len(zs) == 1:
            return [recv.reshape(zs[0].shape)]
        out, off = [], 0
        for z, f in zip(zs, flat):
            n = f.shape[1]
            out.append(recv[:, off:off + n].reshape(z.shape))
            off += n
        return out

    def share_input(self, owner: int, values, width: int | None = None,
                    arithmetic: bool = False):
        """Secret-share plaintext ``values`` held by ``owner``.

        ``owner`` is a 1-based server id or :data:`~goram.mpc.transport.CLIENT`.
        A server owner masks its component with a zero-sharing and every server
        forwards its component to its predecessor (one round).  The client samples
        two random components and sends each server its pair (one round).
        """
        width = width or self.width
        if width != self.width:
            raise ValueError("session and input widths differ")
        vals = np.asarray(values)
        if vals.size and (np.any(vals < 0) if vals.dtype.kind == "i" else False):
            raise ValueError("negative input")
        vals = vals.astype(np.uint64)
        if width < 64 and np.any(vals >> np.uint64(width)):
            raise OverflowError(f"value does not fit in {width} bits")
        cls = ArithShares if arithmetic else BoolShares
        if owner == CLIENT:
            n = vals.size
            r = np.stack([self.client_prf.words(n), self.client_prf.words(n)]).reshape((2,) + vals.shape)
            if width < 64:
                r &= np.uint64((1 << width) - 1)
            if arithmetic:
                last = vals - r[0] - r[1]
                if width < 64:
                    last &= np.uint64((1 << width) - 1)
            else:
                last = vals ^ r[0] ^ r[1]
            comp = np.stack([r[0], r[1], last])
            nxt = rotate(comp)
            sends = {(CLIENT, i): np.stack([comp[i], nxt[i]]) for i in range(3)}
            got = self.round(sends)
            local = np.stack([got[(CLIENT, i)][0] for i in range(3)])
            nxt = np.stack([got[(CLIENT, i)][1] for i in range(3)])
            return cls(local, nxt, width)
        if owner not in (1, 2, 3):
            raise ValueError(f"unknown input owner {owner}")
        comp = self.zero_components(vals.shape, arithmetic=arithmetic)
        if arithmetic:
            comp[owner - 1] = comp[owner - 1] + vals
            if width < 64:
                comp &= np.uint64((1 << width) - 1)
        else:
            comp[owner - 1] ^= vals
        return cls(comp, self._pass_to_predecessor([comp])[0], width)

    def reveal(self, x, to=None) -> np.ndarray:
        """Open ``x`` to every server (``to=None``), one server (1-based id) or the client.

        Every receiving party gets exactly the component it lacks, in one round.
        """
        if not x.consistent():
            raise IntegrityError("replicated copies disagree: next[i] != local[i+1]")
        comp = x.local
        if to is None:
            self.round({(j, (j + 1) % 3): comp[j] for j in range(3)})
        elif to == CLIENT:
            self.round({(j, CLIENT): comp[j] for j in range(3)})
        elif to in (1, 2, 3):
            src = (to - 1 + 2) % 3
            self.round({(src, to - 1): comp[src]})
        else:
            raise ValueError(f"unknown reveal target {to}")
        if isinstance(x, ArithShares):
            out = comp.sum(axis=0, dtype=np.uint64)
            if x.width < 64:
                out &= np.uint64((1 << x.width) - 1)
            return out
        return comp[0] ^ comp[1] ^ comp[2]

    # -- multiplication gates -------------------------------------------

    @staticmethod
    def _check_pair(x, y):
        if x.shape != y.shape:
            raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
        if x.width != y.width:
            raise ValueError("width mismatch")

    def and_many(self, pairs) -> list[BoolShares]:
        """Lane-wise AND of several pairs in a single round."""
        shapes = []
        for x, y in pairs:
            self._check_pair(x, y)
            shapes.append(x.shape)
        masks = self._zero_many(shapes)
        zs = [(x.local & (y.local ^ y.next)) ^ (x.next & y.local) ^ m
              for (x, y), m in zip(pairs, masks)]
        nexts = self._pass_to_predecessor(zs)
        return [BoolShares(z, n, self.width) for z, n in zip(zs, nexts)]

    def and_(self, x: BoolShares, y: BoolShares) -> BoolShares:
        return self.and_many([(x, y)])[0]

    def or_(self, x: BoolShares, y: BoolShares) -> BoolShares:
        return x ^ y ^ self.and_(x, y)

    def mul_many(self, pairs) -> list[ArithShares]:
        shapes = []
        for x, y in pairs:
            self._check_pair(x, y)
            shapes.append(x.shape)
        zs = []
        for (x, y), m in zip(pairs, self._zero_many(shapes, arithmetic=True)):
            z = x.local * (y.local + y.next) + x.next * y.local + m
            if self.width < 64:
                z &= np.uint64((1 << self.width) - 1)
            zs.append(z)
        nexts = self._pass_to_predecessor(zs)
        return [ArithShares(z, n, self.width) for z, n in zip(zs, nexts)]

    def mul(self, x: ArithShares, y: ArithShares) -> ArithShares:
        return self.mul_many([(x, y)])[0]

    # -- bookkeeping -----------------------------------------------------

    def metrics(self) -> Metrics:
        t = self.transport
        return Metrics(t.rounds, (t.bytes_sent(0), t.bytes_sent(1), t.bytes_sent(2)),
                       t.bytes_sent(CLIENT))

    metrics_snapshot = metrics

    def transcript_digest(self) -> str:
        return self.transport.transcript_digest()


def setup_parties(master_seed, width: int = 64, record: bool = False):
    """Create a session and return its three party handles (S1, S2, S3)."""
    return Session(master_seed, width, record=record).parties
