# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled FCFS word chain. Same interface and results as ``_fcfs_py``."""

from libc.stdlib cimport malloc, realloc, free
from libc.stdint cimport int64_t, int32_t


cdef class FCFSChain:
    cdef public int n
    cdef int64_t** buf
    cdef int64_t* cap
    cdef int64_t* head
    cdef int64_t* count
    cdef int* nbr_ptr
    cdef int* nbr_idx
    cdef int64_t _clock
    cdef int64_t _length

    def __cinit__(self, n_classes, neighbors):
        cdef int i, k, total
        self.n = int(n_classes)
        nbs = [list(map(int, nb)) for nb in neighbors]
        if len(nbs) != self.n:
            raise ValueError("need one neighbor list per class")
        total = sum(len(nb) for nb in nbs)
        self.buf = <int64_t**>malloc(self.n * sizeof(int64_t*))
        self.cap = <int64_t*>malloc(self.n * sizeof(int64_t))
        self.head = <int64_t*>malloc(self.n * sizeof(int64_t))
        self.count = <int64_t*>malloc(self.n * sizeof(int64_t))
        self.nbr_ptr = <int*>malloc((self.n + 1) * sizeof(int))
        self.nbr_idx = <int*>malloc((total + 1) * sizeof(int))
        if not (self.buf and self.cap and self.head and self.count and self.nbr_ptr and self.nbr_idx):
            raise MemoryError()
        k = 0
        for i in range(self.n):
            self.nbr_ptr[i] = k
            for j in nbs[i]:
                if j < 0 or j >= self.n:
                    raise ValueError("neighbor index out of range")
                self.nbr_idx[k] = j
                k += 1
            self.buf[i] = <int64_t*>malloc(16 * sizeof(int64_t))
            if not self.buf[i]:
                raise MemoryError()
            self.cap[i] = 16
        self.nbr_ptr[self.n] = k
        self.reset()

    def __dealloc__(self):
        cdef int i
        if self.buf:
            for i in range(self.n):
                free(self.buf[i])
            free(self.buf)
        free(self.cap)
        free(self.head)
        free(self.count)
        free(self.nbr_ptr)
        free(self.nbr_idx)

    def reset(self):
        cdef int i
        for i in range(self.n):
            self.head[i] = 0
            self.count[i] = 0
        self._clock = 0
        self._length = 0

    @property
    def clock(self):
        return self._clock

    @property
    def length(self):
        return self._length

    cdef int _push(self, int c) except -1:
        cdef int64_t newcap, k, src
        cdef int64_t* nb
        if self.count[c] == self.cap[c]:
            newcap = self.cap[c] * 2
            nb = <int64_t*>malloc(newcap * sizeof(int64_t))
            if not nb:
                raise MemoryError()
            for k in range(self.count[c]):
                src = (self.head[c] + k) % self.cap[c]
                nb[k] = self.buf[c][src]
            free(self.buf[c])
            self.buf[c] = nb
            self.cap[c] = newcap
            self.head[c] = 0
        self.buf[c][(self.head[c] + self.count[c]) % self.cap[c]] = self._clock
        self.count[c] += 1
        self._clock += 1
        self._length += 1
        return 0

    def push_word(self, word):
        for c in word:
            if c < 0 or c >= self.n:
                raise ValueError("class index out of range")
            self._push(c)

    def word(self):
        cdef int c
        cdef int64_t k
        tagged = []
        for c in range(self.n):
            for k in range(self.count[c]):
                tagged.append((self.buf[c][(self.head[c] + k) % self.cap[c]], c))
        tagged.sort()
        return [c for _, c in tagged]

    def advance(self, const int32_t[::1] codes):
        cdef Py_ssize_t t, m = codes.shape[0]
        cdef int c, j, p, best
        cdef int64_t best_idx, v
        cdef int64_t acc = 0
        for t in range(m):
            c = codes[t]
            if c >= 0:
                if c >= self.n:
                    raise ValueError("class index out of range")
                best = -1
                best_idx = 0
                for p in range(self.nbr_ptr[c], self.nbr_ptr[c + 1]):
                    j = self.nbr_idx[p]
                    if self.count[j] > 0:
                        v = self.buf[j][self.head[j]]
                        if best < 0 or v < best_idx:
                            best_idx = v
                            best = j
                if best >= 0:
                    self.head[best] = (self.head[best] + 1) % self.cap[best]
                    self.count[best] -= 1
                    self._length -= 1
                    self._clock += 1
                else:
                    self._push(c)
            acc += self._length
        return acc
