"""Pure-Python FCFS word chain; fallback for the compiled ``_fcfs`` kernel.

The word is stored as one FIFO of arrival indices per class. The oldest
compatible item for an arrival of class ``c`` is the smallest head index
among the nonempty queues of ``c``'s neighbors.
"""

from collections import deque


class FCFSChain:
    def __init__(self, n_classes, neighbors):
        self.n = int(n_classes)
        self.neighbors = [tuple(int(j) for j in nb) for nb in neighbors]
        if len(self.neighbors) != self.n:
            raise ValueError("need one neighbor list per class")
        self.reset()

    def reset(self):
        self.queues = [deque() for _ in range(self.n)]
        self.clock = 0
        self.length = 0

    def push_word(self, word):
        for c in word:
            self.queues[c].append(self.clock)
            self.clock += 1
            self.length += 1

    def word(self):
        tagged = [(idx, c) for c, q in enumerate(self.queues) for idx in q]
        return [c for _, c in sorted(tagged)]

    def advance(self, codes):
        """Feed arrivals (``-1`` = idle slot); return the sum over steps of
        the word length after each step."""
        queues = self.queues
        neighbors = self.neighbors
        clock = self.clock
        length = self.length
        acc = 0
        if hasattr(codes, "tolist"):
            codes = codes.tolist()
        for c in codes:
            if c >= 0:
                best = -1
                best_idx = None
                for j in neighbors[c]:
                    q = queues[j]
                    if q and (best_idx is None or q[0] < best_idx):
                        best_idx = q[0]
                        best = j
                if best >= 0:
                    queues[best].popleft()
                    length -= 1
                else:
                    queues[c].append(clock)
                    length += 1
                clock += 1
            acc += length
        self.clock = clock
        self.length = length
        return acc
