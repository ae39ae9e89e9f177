"""Keyed pseudorandom streams used for correlated randomness."""
import hashlib

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes


def derive_key(master_seed: bytes, label: str) -> bytes:
    """Derive a 128-bit key from the master seed and a domain label."""
    h = hashlib.sha256()
    h.update(len(master_seed).to_bytes(4, "little"))
    h.update(master_seed)
    h.update(label.encode())
    return h.digest()[:16]


class PrfStream:
    """AES-128 in counter mode read as one continuous stream of 64-bit words.

    The keystream starts at counter block 0 and is produced ``CHUNK`` words at
    a time; calls consume it in order.  Two holders
    of the same key that issue the same sequence of calls see the same words,
    which is all the replicated protocols need.
    """

    CHUNK = 1 << 14

    def __init__(self, key: bytes):
        if len(key) != 16:
            raise ValueError("PRF key must be 16 bytes")
        self._key = key
        self.counter = 0
        self._buf = np.zeros(0, dtype="<u8")
        self._pos = 0

    def _chunk(self, words: int) -> np.ndarray:
        nonce = (self.counter * (self.CHUNK // 2)).to_bytes(16, "big")
        self.counter += -(-words // self.CHUNK)
        enc = Cipher(algorithms.AES(self._key), modes.CTR(nonce)).encryptor()
        return np.frombuffer(enc.update(bytes(8 * words)), dtype="<u8")

    def words(self, n: int) -> np.ndarray:
        """Return the next ``n`` pseudorandom 64-bit words."""
        return self.view(n).copy()

    def view(self, n: int) -> np.ndarray:
        """Like :meth:`words` but may return a read-only view into the buffer."""
        left = self._buf.size - self._pos
        if n <= left:
            self._pos += n
            return self._buf[self._pos - n:self._pos]
        need = -(-(n - left) // self.CHUNK) * self.CHUNK
        fresh = self._chunk(need)
        out = np.concatenate([self._buf[self._pos:], fresh[:n - left]])
        self._buf, self._pos = fresh, n - left
        return out

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of ``range(n)`` seeded from this stream (Fisher-Yates)."""
        seed = [int(x) for x in self.words(4)]
        return np.random.Generator(np.random.PCG64(seed)).permutation(n)

    def __repr__(self):
        return f"PrfStream(counter={self.counter}, pos={self._pos})"
