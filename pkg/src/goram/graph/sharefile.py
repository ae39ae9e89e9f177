"""Provider share bundles and their on-disk format.

File layout (little-endian)::

    magic 'GORA' | version u16 | party u8 | w u8 | A u16 | b u32 | l_i u32 | |V| u64 | k u32
    records: b * b * l_i * (1 + A) lanes, each as (local word, next word)

Blocks are row-major, records in stored order, lanes (key, attrs...).
"""
import struct
from dataclasses import dataclass, field

import numpy as np

from ..mpc.prf import PrfStream, derive_key
from ..mpc.shares import BoolShares
from .partition import GlobalConfig, LocalPartition

MAGIC = b"GORA"
VERSION = 1
HEADER = struct.Struct("<4sHBBHIIQI")


class ShareFileError(ValueError):
    pass


@dataclass
class ProviderShareBundle:
    """What one server receives from one provider: its two share words per lane."""
    party: int
    width: int
    attr_lanes: int
    b: int
    l: int
    num_vertices: int
    k: int
    local: np.ndarray = field(repr=False)
    next: np.ndarray = field(repr=False)

    def header(self) -> tuple:
        return (self.width, self.attr_lanes, self.b, self.l, self.num_vertices, self.k)

    def to_bytes(self) -> bytes:
        head = HEADER.pack(MAGIC, VERSION, self.party, self.width, self.attr_lanes, self.b,
                           self.l, self.num_vertices, self.k)
        body = np.stack([self.local, self.next], axis=-1).astype("<u8").tobytes()
        return head + body

    @classmethod
    def from_bytes(cls, buf: bytes) -> "ProviderShareBundle":
        if len(buf) < HEADER.size:
            raise ShareFileError("file shorter than header")
        magic, ver, party, w, a, b, l, nv, k = HEADER.unpack_from(buf)
        if magic != MAGIC:
            raise ShareFileError("bad magic")
        if ver != VERSION:
            raise ShareFileError(f"unsupported version {ver}")
        if party not in (1, 2, 3):
            raise ShareFileError(f"bad party id {party}")
        if w != 64:
            raise ShareFileError(f"unsupported lane width {w}")
        if b < 1 or l < 1 or not 1 <= k <= nv or -(-nv // k) != b:
            raise ShareFileError("inconsistent (b, l, |V|, k) header")
        shape = (b, b, l, 1 + a, 2)
        need = int(np.prod(shape)) * 8
        if len(buf) - HEADER.size != need:
            raise ShareFileError(f"body has {len(buf) - HEADER.size} bytes, expected {need}")
        body = np.frombuffer(buf, dtype="<u8", offset=HEADER.size).reshape(shape).astype(np.uint64)
        return cls(party, w, a, b, l, nv, k, body[..., 0].copy(), body[..., 1].copy())


def share_partition(part: LocalPartition, seed=b"") -> list[ProviderShareBundle]:
    """Split a provider's partition into three bundles (one per server).

    The provider draws two random components from its own PRF stream; the third
    is fixed by the XOR.  Server ``i`` gets components ``(x_i, x_{i+1})``.
    """
    cfg = part.config
    seed = seed if isinstance(seed, bytes) else str(seed).encode()
    prf = PrfStream(derive_key(seed, "provider-share"))
    rec = part.records
    r0 = prf.words(rec.size).reshape(rec.shape)
    r1 = prf.words(rec.size).reshape(rec.shape)
    comp = [r0, r1, rec ^ r0 ^ r1]
    return [ProviderShareBundle(i + 1, cfg.width, cfg.attr_lanes, cfg.b, part.l, cfg.num_vertices,
                                cfg.k, comp[i], comp[(i + 1) % 3]) for i in range(3)]


def write_share_file(path, bundle: ProviderShareBundle):
    with open(path, "wb") as fh:
        fh.write(bundle.to_bytes())


def read_share_file(path) -> ProviderShareBundle:
    with open(path, "rb") as fh:
        return ProviderShareBundle.from_bytes(fh.read())


def combine_trio(bundles) -> BoolShares:
    """Join the three servers' bundles of one provider into a replicated sharing.

    Checks party ids, header agreement and the replication invariant
    ``next[i] == local[i+1]``, which catches a modified byte in any one file.
    """
    bundles = sorted(bundles, key=lambda x: x.party)
    if [x.party for x in bundles] != [1, 2, 3]:
        raise ShareFileError("need exactly one bundle for each of parties 1, 2, 3")
    if len({x.header() for x in bundles}) != 1:
        raise ShareFileError("bundle headers disagree")
    local = np.stack([x.local for x in bundles])
    nxt = np.stack([x.next for x in bundles])
    sh = BoolShares(local, nxt, bundles[0].width)
    if not sh.consistent():
        raise ShareFileError("replicated share copies disagree (corrupted file?)")
    return sh


def bundle_config(bundle: ProviderShareBundle, B: int = 1024) -> GlobalConfig:
    return GlobalConfig(bundle.num_vertices, bundle.k, B, bundle.width, bundle.attr_lanes)
