"""Compiled hot-path kernels for subpopulation evolution.

All kernels operate on plain int64 arrays (orders, inverse-position arrays,
cached lengths, weight matrix) and draw randomness from a numpy Generator,
which numba supports natively, so the random stream is shared bit-exactly
with Python-level code. Each subpopulation owns its arrays and its generator;
nothing here touches shared state.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "cycle_length",
    "invert_cyclic",
    "inver_over_inplace",
    "inver_over_sweep",
    "mapping_transplant",
    "evolve_interval",
]


@njit(cache=True)
def cycle_length(order, w):
    k = order.shape[0]
    total = np.int64(0)
    for p in range(k - 1):
        total += w[order[p], order[p + 1]]
    total += w[order[k - 1], order[0]]
    return total


@njit(cache=True)
def invert_cyclic(order, pos, i, j):
    """Reverse the cyclic block of positions i..j, keeping pos in sync."""
    k = order.shape[0]
    seg = j - i
    if seg < 0:
        seg += k
    seg += 1
    for t in range(seg // 2):
        p = i + t
        if p >= k:
            p -= k
        q = j - t
        if q < 0:
            q += k
        cp = order[p]
        cq = order[q]
        order[p] = cq
        order[q] = cp
        pos[cq] = p
        pos[cp] = q


@njit(cache=True)
def inver_over_inplace(order, pos, length, pool_orders, pool_pos, self_idx,
                       p_mu, max_inversions, w, gen, undo_from, undo_to):
    """Run one inver-over pass in place on (order, pos).

    Starting from a random current city, repeatedly pick a partner city c2:
    blind (uniform among the other cities) with probability p_mu, otherwise
    guided (the successor of the current city in a random other pool member).
    Stop as soon as c2 is already adjacent to the current city; otherwise
    reverse the cyclic block between the current city's successor and c2,
    making c2 the new successor, and continue from c2. A cap of
    ``max_inversions`` bounds pathological walks.

    Every inversion is recorded in (undo_from, undo_to); since a block
    reversal is an involution, replaying the records backwards restores the
    original tour. Returns (new_length, inversion_count).
    """
    k = order.shape[0]
    ni = pool_orders.shape[0]
    n_inv = 0
    c = order[gen.integers(0, k)]
    for _ in range(max_inversions):
        if gen.random() < p_mu:
            step = 1 + gen.integers(0, k - 1)
            p2 = pos[c] + step
            if p2 >= k:
                p2 -= k
            c2 = order[p2]
        else:
            if self_idx >= 0:
                m = gen.integers(0, ni - 1)
                if m >= self_idx:
                    m += 1
            else:
                m = gen.integers(0, ni)
            pm = pool_pos[m, c] + 1
            if pm >= k:
                pm -= k
            c2 = pool_orders[m, pm]
        pc = pos[c]
        sp = pc + 1
        if sp >= k:
            sp -= k
        pp = pc - 1
        if pp < 0:
            pp += k
        if order[sp] == c2 or order[pp] == c2:
            break
        b = pos[c2]
        u = order[sp]                  # current successor of c
        bn = b + 1
        if bn >= k:
            bn -= k
        v = order[bn]                  # current successor of c2
        length += w[c, c2] + w[u, v] - w[c, u] - w[c2, v]
        invert_cyclic(order, pos, sp, b)
        undo_from[n_inv] = sp
        undo_to[n_inv] = b
        n_inv += 1
        c = c2
    return length, n_inv


@njit(cache=True)
def inver_over_sweep(orders, positions, lengths, p_mu, max_inversions, w, gen,
                     undo_from, undo_to):
    """Apply inver-over to every individual; keep offspring iff not worse.

    The sweep is sequential: guided picks read the pool as it stands, so
    earlier updates in the same generation are visible to later individuals.
    Rejected offspring are rolled back by replaying their inversions in
    reverse, which leaves the parent bit-identical.
    """
    ni = orders.shape[0]
    for idx in range(ni):
        parent_len = lengths[idx]
        new_len, n_inv = inver_over_inplace(
            orders[idx], positions[idx], parent_len, orders, positions, idx,
            p_mu, max_inversions, w, gen, undo_from, undo_to)
        if new_len <= parent_len:
            lengths[idx] = new_len
        else:
            for t in range(n_inv - 1, -1, -1):
                invert_cyclic(orders[idx], positions[idx],
                              undo_from[t], undo_to[t])


@njit(cache=True)
def mapping_transplant(worse_order, worse_pos, better_order, better_pos,
                       seg_start, seg_len, w, donor, old_seg, donor_slot):
    """Transplant a better-tour segment into the worse tour, then repair.

    The donor is the better tour's cyclic block with the same first city and
    the same size as the worse tour's block at ``seg_start``. After the block
    is overwritten, each city outside the block that the donor duplicated is
    replaced through the position-wise old->donor mapping (chased until the
    value is no longer a donor city), which restores a valid permutation.

    ``donor``, ``old_seg`` are scratch of size >= seg_len; ``donor_slot`` is a
    size-k scratch that must enter and leave filled with -1. Returns the
    repaired tour's recomputed length.
    """
    k = worse_order.shape[0]
    anchor = worse_order[seg_start]
    bstart = better_pos[anchor]
    for t in range(seg_len):
        wp = seg_start + t
        if wp >= k:
            wp -= k
        bp = bstart + t
        if bp >= k:
            bp -= k
        old_seg[t] = worse_order[wp]
        dc = better_order[bp]
        donor[t] = dc
        donor_slot[dc] = t
    for t in range(seg_len):
        wp = seg_start + t
        if wp >= k:
            wp -= k
        worse_order[wp] = donor[t]
    for off in range(seg_len, k):
        wp = seg_start + off
        if wp >= k:
            wp -= k
        x = worse_order[wp]
        while donor_slot[x] >= 0:
            x = old_seg[donor_slot[x]]
        worse_order[wp] = x
    for p in range(k):
        worse_pos[worse_order[p]] = p
    for t in range(seg_len):
        donor_slot[donor[t]] = -1
    return cycle_length(worse_order, w)


# velocity-state slots (float64[5] buffer shared with the Python wrapper)
VS_BEST = 0         # best length ever seen in the subpopulation
VS_PREV = 1         # previous distinct best
VS_DELTA_G = 2      # generations between the two bests
VS_IMPROVEMENTS = 3  # number of improvement events so far
VS_LAST_GEN = 4     # generation (1-based) at which the best last improved


@njit(cache=True)
def evolve_interval(orders, positions, lengths, w, gen, n_gens, g_start,
                    g_total, p_mu0, p_ma0, vel_threshold, vel_state,
                    max_inversions, undo_from, undo_to, donor, old_seg,
                    donor_slot):
    """Evolve one subpopulation for ``n_gens`` generations.

    Each generation: an inver-over sweep over all individuals, then - if the
    evolutionary velocity is defined and below the threshold - with
    probability p_ma one segment transplant on a uniformly chosen pair
    (replacing the worse of the two; ties treat the second as worse). The
    mutation and mapping rates follow their schedules over the planned
    horizon ``g_total``; the generation counter is clamped there if a caller
    runs past it. Velocity state is updated at the end of each generation.
    """
    ni = orders.shape[0]
    k = orders.shape[1]
    for g_off in range(n_gens):
        g_n = g_start + g_off
        g_c = g_n if g_n < g_total else g_total
        p_mu = p_mu0 * (1.0 - 0.5 * g_c / g_total)
        p_ma = p_ma0 * (2.0 * g_c / g_total + 1.0)

        inver_over_sweep(orders, positions, lengths, p_mu, max_inversions, w,
                         gen, undo_from, undo_to)

        gate_open = False
        if vel_state[VS_IMPROVEMENTS] >= 1.0:
            velocity = (abs(vel_state[VS_BEST] - vel_state[VS_PREV])
                        / vel_state[VS_DELTA_G])
            gate_open = velocity < vel_threshold
        if gate_open and gen.random() < p_ma:
            i1 = gen.integers(0, ni)
            i2 = gen.integers(0, ni - 1)
            if i2 >= i1:
                i2 += 1
            if lengths[i1] > lengths[i2]:
                wi, bi = i1, i2
            else:
                wi, bi = i2, i1
            seg_start = gen.integers(0, k)
            seg_len = 2 + gen.integers(0, k - 2)   # uniform on 2..k-1
            lengths[wi] = mapping_transplant(
                orders[wi], positions[wi], orders[bi], positions[bi],
                seg_start, seg_len, w, donor, old_seg, donor_slot)

        cur_best = lengths[0]
        for i in range(1, ni):
            if lengths[i] < cur_best:
                cur_best = lengths[i]
        if cur_best < vel_state[VS_BEST]:
            done = g_n + 1.0
            vel_state[VS_PREV] = vel_state[VS_BEST]
            vel_state[VS_BEST] = cur_best
            vel_state[VS_DELTA_G] = done - vel_state[VS_LAST_GEN]
            vel_state[VS_LAST_GEN] = done
            vel_state[VS_IMPROVEMENTS] += 1.0
