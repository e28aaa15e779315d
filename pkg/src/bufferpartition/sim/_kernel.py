"""Compiled event loop for one replication.

Customers are kept in per-class FIFO ring buffers of arrival times; the
event list is the four candidate times (next RT/NRT arrival, RT/NRT
service completion), so no heap is needed.
"""
import numpy as np
from numba import njit

NONPREEMPTIVE = 0
PREEMPTIVE = 1
INDEPENDENT = 2

# layout of the integer counters returned by run_kernel
(ARR_RT, ARR_NRT, LOSS_RT, LOSS_NRT, DONE_RT, DONE_NRT,
 TOT_ARR_RT, TOT_ARR_NRT, TOT_LOSS_RT, TOT_LOSS_NRT, TOT_DEP_RT, TOT_DEP_NRT,
 END_RT, END_NRT, MAX_RT, MAX_NRT) = range(16)
N_COUNTS = 16
# layout of the float accumulators
DELAY_RT, DELAY_NRT, AREA_RT, AREA_NRT = range(4)


@njit(cache=True, nogil=True)
def _draw(rng, rate):
    if rate <= 0.0:
        return np.inf
    return rng.exponential(1.0 / rate)


@njit(cache=True, nogil=True)
def run_kernel(rng, lam_rt, lam_nrt, mu_rt, mu_nrt, cap_rt, cap_nrt,
               discipline, warmup, t_end):
    counts = np.zeros(N_COUNTS, dtype=np.int64)
    sums = np.zeros(4)
    q_rt = np.empty(cap_rt)
    q_nrt = np.empty(cap_nrt)
    head_rt = 0
    head_nrt = 0
    n_rt = 0
    n_nrt = 0

    t = 0.0
    next_rt = _draw(rng, lam_rt)
    next_nrt = _draw(rng, lam_nrt)
    done_rt = np.inf
    done_nrt = np.inf
    nrt_left = -1.0  # residual work of a preempted NRT head, preemptive only

    while True:
        t_next = min(min(next_rt, next_nrt), min(done_rt, done_nrt))
        if t_next > t_end:
            t_next = t_end
        if t_next > warmup:
            lo = t if t > warmup else warmup
            sums[AREA_RT] += n_rt * (t_next - lo)
            sums[AREA_NRT] += n_nrt * (t_next - lo)
        if t_next >= t_end:
            break
        t = t_next
        measured = t >= warmup

        if t == next_rt:
            counts[TOT_ARR_RT] += 1
            if measured:
                counts[ARR_RT] += 1
            if n_rt == cap_rt:
                counts[TOT_LOSS_RT] += 1
                if measured:
                    counts[LOSS_RT] += 1
            else:
                q_rt[(head_rt + n_rt) % cap_rt] = t
                n_rt += 1
                if n_rt > counts[MAX_RT]:
                    counts[MAX_RT] = n_rt
                if done_rt == np.inf:
                    if discipline == INDEPENDENT:
                        done_rt = t + _draw(rng, mu_rt)
                    elif discipline == PREEMPTIVE:
                        if done_nrt != np.inf:
                            nrt_left = done_nrt - t
                            done_nrt = np.inf
                        done_rt = t + _draw(rng, mu_rt)
                    elif done_nrt == np.inf:
                        done_rt = t + _draw(rng, mu_rt)
            next_rt = t + _draw(rng, lam_rt)

        elif t == next_nrt:
            counts[TOT_ARR_NRT] += 1
            if measured:
                counts[ARR_NRT] += 1
            if n_nrt == cap_nrt:
                counts[TOT_LOSS_NRT] += 1
                if measured:
                    counts[LOSS_NRT] += 1
            else:
                q_nrt[(head_nrt + n_nrt) % cap_nrt] = t
                n_nrt += 1
                if n_nrt > counts[MAX_NRT]:
                    counts[MAX_NRT] = n_nrt
                if done_nrt == np.inf and nrt_left < 0.0:
                    if discipline == INDEPENDENT:
                        done_nrt = t + _draw(rng, mu_nrt)
                    elif done_rt == np.inf and (discipline == NONPREEMPTIVE or n_rt == 0):
                        done_nrt = t + _draw(rng, mu_nrt)
            next_nrt = t + _draw(rng, lam_nrt)

        elif t == done_rt:
            arrived = q_rt[head_rt]
            head_rt = (head_rt + 1) % cap_rt
            n_rt -= 1
            counts[TOT_DEP_RT] += 1
            if arrived >= warmup:
                counts[DONE_RT] += 1
                sums[DELAY_RT] += t - arrived
            done_rt = np.inf
            if n_rt > 0:
                done_rt = t + _draw(rng, mu_rt)
            elif discipline == PREEMPTIVE and n_nrt > 0:
                if nrt_left >= 0.0:
                    done_nrt = t + nrt_left
                    nrt_left = -1.0
                else:
                    done_nrt = t + _draw(rng, mu_nrt)
            elif discipline == NONPREEMPTIVE and n_nrt > 0:
                done_nrt = t + _draw(rng, mu_nrt)

        else:
            arrived = q_nrt[head_nrt]
            head_nrt = (head_nrt + 1) % cap_nrt
            n_nrt -= 1
            counts[TOT_DEP_NRT] += 1
            if arrived >= warmup:
                counts[DONE_NRT] += 1
                sums[DELAY_NRT] += t - arrived
            done_nrt = np.inf
            if discipline == NONPREEMPTIVE and n_rt > 0:
                done_rt = t + _draw(rng, mu_rt)
            elif n_nrt > 0:
                done_nrt = t + _draw(rng, mu_nrt)

    counts[END_RT] = n_rt
    counts[END_NRT] = n_nrt
    return counts, sums
