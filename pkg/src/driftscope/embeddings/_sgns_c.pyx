# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled skip-gram negative-sampling epoch kernel.

Must stay operation-for-operation equivalent to _sgns_py.train_epoch,
including the RNG sequence; tests compare the two backends directly.
"""

from libc.math cimport exp, log
from libc.stdlib cimport malloc, free

cdef extern from *:
    ctypedef unsigned long long uint64_t

cdef double Z_CLIP = 30.0
cdef uint64_t MULT = 0x2545F4914F6CDD1D
cdef double INV_2_64 = 1.0 / 18446744073709551616.0


cdef inline uint64_t xorshift(uint64_t state) nogil:
    state ^= state >> 12
    state ^= state << 25
    state ^= state >> 27
    return state


cdef inline double sigmoid(double z) nogil:
    if z > Z_CLIP:
        z = Z_CLIP
    elif z < -Z_CLIP:
        z = -Z_CLIP
    return 1.0 / (1.0 + exp(-z))


def train_epoch(double[:, ::1] w_in, double[:, ::1] w_out,
                int[::1] tokens, long long[::1] offsets,
                int window, int negatives, double lr,
                double[::1] noise_cdf, unsigned long long seed):
    cdef uint64_t state = seed
    if state == 0:
        state = 0x9E3779B97F4A7C15
    cdef int n_vocab = noise_cdf.shape[0]
    cdef int d = w_in.shape[1]
    cdef double total_loss = 0.0
    cdef double *grad_center = <double *> malloc(d * sizeof(double))
    if grad_center == NULL:
        raise MemoryError()
    cdef Py_ssize_t p, i, j
    cdef long long start, end
    cdef int center, context, target, k, m, lo_idx, hi_idx, mid
    cdef long long lo, hi
    cdef double label, z, p_hat, g, u
    try:
        for p in range(offsets.shape[0] - 1):
            start = offsets[p]
            end = offsets[p + 1]
            for i in range(start, end):
                center = tokens[i]
                lo = i - window
                if lo < start:
                    lo = start
                hi = i + window + 1
                if hi > end:
                    hi = end
                for j in range(lo, hi):
                    if j == i:
                        continue
                    context = tokens[j]
                    for m in range(d):
                        grad_center[m] = 0.0
                    for k in range(negatives + 1):
                        if k == 0:
                            target = context
                            label = 1.0
                        else:
                            state = xorshift(state)
                            u = <double>(state * MULT) * INV_2_64
                            # first index with noise_cdf[idx] > u
                            lo_idx = 0
                            hi_idx = n_vocab
                            while lo_idx < hi_idx:
                                mid = (lo_idx + hi_idx) >> 1
                                if noise_cdf[mid] <= u:
                                    lo_idx = mid + 1
                                else:
                                    hi_idx = mid
                            target = lo_idx
                            if target >= n_vocab:
                                target = n_vocab - 1
                            if target == context:
                                continue
                            label = 0.0
                        z = 0.0
                        for m in range(d):
                            z += w_in[center, m] * w_out[target, m]
                        p_hat = sigmoid(z)
                        if label == 1.0:
                            total_loss -= log(p_hat)
                        else:
                            total_loss -= log(1.0 - p_hat)
                        g = (label - p_hat) * lr
                        for m in range(d):
                            grad_center[m] += g * w_out[target, m]
                            w_out[target, m] += g * w_in[center, m]
                    for m in range(d):
                        w_in[center, m] += grad_center[m]
    finally:
        free(grad_center)
    return total_loss
