"""Message transport between the three computation servers and the client.

Node ids 0, 1, 2 are the servers S1, S2, S3; node 3 is the querying client.
"""
import hashlib
from abc import ABC, abstractmethod
from collections import deque
from typing import Mapping

CLIENT = 3
NUM_NODES = 4


class Transport(ABC):
    """Delivers one round of point-to-point messages.

    A call to :meth:`exchange` is one communication round: every message in
    the mapping is sent "simultaneously" and all are delivered before the
    call returns.
    """

    rounds: int

    @abstractmethod
    def exchange(self, messages: Mapping[tuple[int, int], bytes]) -> dict[tuple[int, int], bytes]:
        ...

    @abstractmethod
    def bytes_sent(self, node: int) -> int:
        ...


class InProcessTransport(Transport):
    """FIFO channels inside one process, with exact byte and round accounting.

    Every round is folded into a BLAKE2b hash chain so two executions can be
    compared for byte-identical behaviour.
    """

    def __init__(self, record: bool = False):
        self._channels: dict[tuple[int, int], deque] = {
            (s, d): deque() for s in range(NUM_NODES) for d in range(NUM_NODES) if s != d
        }
        self._sent = [0] * NUM_NODES
        self.rounds = 0
        self._digest = bytes(32)
        # (round, src, dst, payload) tuples, only kept when record=True
        self.log: list[tuple[int, int, int, bytes]] | None = [] if record else None

    def exchange(self, messages):
        h = hashlib.blake2b(self._digest, digest_size=32)
        for (src, dst), payload in messages.items():
            if src == dst:
                raise ValueError("node cannot message itself")
            self._channels[(src, dst)].append(payload)
            self._sent[src] += len(payload)
            h.update(bytes((src, dst)) + len(payload).to_bytes(8, "little") + payload)
            if self.log is not None:
                self.log.append((self.rounds, src, dst, payload))
        self._digest = h.digest()
        self.rounds += 1
        return {key: self._channels[key].popleft() for key in messages}

    def bytes_sent(self, node):
        return self._sent[node]

    def transcript_digest(self) -> str:
        return self._digest.hex()
