"""Compiled inner loops of the round simulation.

Everything here works on the column arrays of a network state and visits
nodes in ascending id order, so a node that runs out of energy part-way
through a phase affects exactly the actions that come after it.
"""

import math

import numpy as np
from numba import njit

# Small helpers that take arrays are compiled without reference counting
# (_nrt=False): they never allocate, and it makes calling them per node cheap.

UNCLUSTERED = -1
TO_BS = -1

JOIN_RSSI = 0
JOIN_MIDPOINT = 1
JOIN_MLEACH = 2


@njit(cache=True, _nrt=False)
def spend(energy, dissipated, alive, i, cost):
    """Charge `cost` joules to node i; returns False if the node could not afford it.

    A node that cannot pay drains what it has left and dies without acting.
    """
    e = energy[i]
    if cost > e:
        dissipated[i] += e
        energy[i] = 0.0
        alive[i] = False
        return False
    energy[i] = e - cost
    dissipated[i] += cost
    if energy[i] <= 0.0:
        energy[i] = 0.0
        alive[i] = False
    return True


@njit(cache=True)
def spend_each(energy, dissipated, alive, idx, costs):
    ok = np.zeros(idx.shape[0], dtype=np.bool_)
    for a in range(idx.shape[0]):
        i = idx[a]
        if alive[i]:
            ok[a] = spend(energy, dissipated, alive, i, costs[a])
    return ok


@njit(cache=True, _nrt=False)
def nearest_ch(px, py, x, y, chs, alive):
    """Index into `chs` of the live head closest to (px, py); ties go to the lower id."""
    best = -1
    bd = np.inf
    for j in range(chs.shape[0]):
        c = chs[j]
        if not alive[c]:
            continue
        dx = x[c] - px
        dy = y[c] - py
        d2 = dx * dx + dy * dy
        if d2 < bd:
            bd = d2
            best = j
    return best


@njit(cache=True, _nrt=False)
def richest_ch_in_range(px, py, x, y, energy, chs, alive, range2):
    """Live head within range holding the most energy, else the nearest live head."""
    best = -1
    be = -1.0
    for j in range(chs.shape[0]):
        c = chs[j]
        if not alive[c]:
            continue
        dx = x[c] - px
        dy = y[c] - py
        if dx * dx + dy * dy <= range2 and energy[c] > be:
            be = energy[c]
            best = j
    if best >= 0:
        return best
    return nearest_ch(px, py, x, y, chs, alive)


@njit(cache=True, _nrt=False)
def choose_ch(i, mode, x, y, energy, chs, alive, bsx, bsy, range2):
    if mode == JOIN_MIDPOINT:
        return nearest_ch((x[i] + bsx) * 0.5, (y[i] + bsy) * 0.5, x, y, chs, alive)
    if mode == JOIN_MLEACH:
        return richest_ch_in_range(x[i], y[i], x, y, energy, chs, alive, range2)
    return nearest_ch(x[i], y[i], x, y, chs, alive)


@njit(cache=True)
def setup_phase(x, y, energy, dissipated, alive, ch_ids, cluster_of, mode,
                bsx, bsy, range2, l_c, e_tx, e_rx, eps, charge):
    """Advertise, receive advertisements and join. Returns the heads still alive.

    Each head advertises once at the distance of the farthest live node; every
    other live node hears one advertisement per head, then sends a join
    request to the head picked by `mode`.
    """
    n = x.shape[0]
    keep = np.zeros(ch_ids.shape[0], dtype=np.bool_)
    for a in range(ch_ids.shape[0]):
        c = ch_ids[a]
        if not alive[c]:
            continue
        if charge:
            dmax2 = 0.0
            for i in range(n):
                if alive[i] and i != c:
                    dx = x[i] - x[c]
                    dy = y[i] - y[c]
                    d2 = dx * dx + dy * dy
                    if d2 > dmax2:
                        dmax2 = d2
            keep[a] = spend(energy, dissipated, alive, c, e_tx * l_c + eps * l_c * dmax2)
        else:
            keep[a] = True
    chs = ch_ids[keep]
    k = chs.shape[0]

    is_ch = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        cluster_of[i] = UNCLUSTERED
    for c in chs:
        is_ch[c] = True
        cluster_of[c] = c
    if k == 0:
        return chs

    if charge:
        hear = k * e_rx * l_c
        for i in range(n):
            if alive[i] and not is_ch[i]:
                spend(energy, dissipated, alive, i, hear)

    for i in range(n):
        if not alive[i] or is_ch[i]:
            continue
        j = choose_ch(i, mode, x, y, energy, chs, alive, bsx, bsy, range2)
        if j < 0:
            continue
        c = chs[j]
        if charge:
            dx = x[i] - x[c]
            dy = y[i] - y[c]
            if not spend(energy, dissipated, alive, i, e_tx * l_c + eps * l_c * (dx * dx + dy * dy)):
                continue
            if not spend(energy, dissipated, alive, c, e_rx * l_c):
                continue
        cluster_of[i] = c

    for i in range(n):
        c = cluster_of[i]
        if c >= 0 and (not alive[c] or not alive[i]):
            cluster_of[i] = UNCLUSTERED
    return chs[alive[chs]]


@njit(cache=True)
def steady_frame(x, y, energy, dissipated, alive, cluster_of, order, next_hop,
                 bsx, bsy, l_c, l_a, e_tx, e_rx, eps, e_da, orphans_direct):
    """One data frame. `order` lists heads farthest-from-sink first (by hops).

    With `orphans_direct`, live nodes outside every cluster send their own
    packet straight to the sink.
    Returns (packets delivered to heads, packets delivered to the sink).
    """
    n = x.shape[0]
    return _frame(x, y, energy, dissipated, alive, cluster_of, order, next_hop, bsx, bsy,
                  l_c, l_a, e_tx, e_rx, eps, e_da, orphans_direct,
                  np.zeros(n, dtype=np.int64), np.zeros(n), np.zeros(n, dtype=np.int64))


@njit(cache=True)
def _frame(x, y, energy, dissipated, alive, cluster_of, order, next_hop, bsx, bsy,
           l_c, l_a, e_tx, e_rx, eps, e_da, orphans_direct, received, fwd_bits, fwd_cnt):
    n = x.shape[0]
    received[:] = 0
    fwd_bits[:] = 0.0
    fwd_cnt[:] = 0
    to_ch = 0
    to_bs = 0
    for i in range(n):
        if not alive[i]:
            continue
        c = cluster_of[i]
        if c < 0:
            if orphans_direct:
                dx = x[i] - bsx
                dy = y[i] - bsy
                if spend(energy, dissipated, alive, i, e_tx * l_c + eps * l_c * (dx * dx + dy * dy)):
                    to_bs += 1
            continue
        if c == i:
            continue
        dx = x[i] - x[c]
        dy = y[i] - y[c]
        if not spend(energy, dissipated, alive, i, e_tx * l_c + eps * l_c * (dx * dx + dy * dy)):
            continue
        if alive[c] and spend(energy, dissipated, alive, c, e_rx * l_c):
            received[c] += 1
            to_ch += 1

    for a in range(order.shape[0]):
        c = order[a]
        nh = next_hop[a]
        if not alive[c]:
            continue
        if not spend(energy, dissipated, alive, c, e_da * (received[c] + 1) * l_c):
            continue
        bits = l_a + fwd_bits[c]
        cnt = 1 + fwd_cnt[c]
        if nh < 0:
            dx = x[c] - bsx
            dy = y[c] - bsy
            if spend(energy, dissipated, alive, c, e_tx * bits + eps * bits * (dx * dx + dy * dy)):
                to_bs += cnt
        else:
            dx = x[c] - x[nh]
            dy = y[c] - y[nh]
            if not spend(energy, dissipated, alive, c, e_tx * bits + eps * bits * (dx * dx + dy * dy)):
                continue
            if alive[nh] and spend(energy, dissipated, alive, nh, e_rx * bits):
                fwd_bits[nh] += bits
                fwd_cnt[nh] += cnt
    return to_ch, to_bs


@njit(cache=True)
def steady_frames(x, y, energy, dissipated, alive, cluster_of, order, next_hop,
                  bsx, bsy, l_c, l_a, e_tx, e_rx, eps, e_da, orphans_direct, frames):
    """`frames` consecutive frames on a fixed assignment."""
    to_ch = 0
    to_bs = 0
    if order.shape[0] == 0 and not orphans_direct:
        return to_ch, to_bs
    n = x.shape[0]
    received = np.zeros(n, dtype=np.int64)
    fwd_bits = np.zeros(n)
    fwd_cnt = np.zeros(n, dtype=np.int64)
    for _ in range(frames):
        a, b = _frame(x, y, energy, dissipated, alive, cluster_of, order, next_hop, bsx, bsy,
                      l_c, l_a, e_tx, e_rx, eps, e_da, orphans_direct, received, fwd_bits, fwd_cnt)
        to_ch += a
        to_bs += b
    return to_ch, to_bs


@njit(cache=True, _nrt=False)
def harvest(energy, initial, harvested, alive, is_solar, amount):
    """Add up to `amount` joules to every live solar node, capped at its initial
    energy. Returns the total added."""
    total = 0.0
    for i in range(energy.shape[0]):
        if alive[i] and is_solar[i]:
            g = min(amount, initial[i] - energy[i])
            if g > 0.0:
                energy[i] += g
                harvested[i] += g
                total += g
    return total


@njit(cache=True)
def solar_handovers(ch_ids, cluster_of, alive, active, energy):
    """Pass each non-harvesting head's role to its richest harvesting live member.

    Returns the new (sorted) head ids and whether anything changed.
    """
    n = cluster_of.shape[0]
    heads = ch_ids.copy()
    changed = False
    for a in range(heads.shape[0]):
        c = heads[a]
        if active[c]:
            continue
        best = c
        be = -1.0
        for m in range(n):
            if m != c and cluster_of[m] == c and alive[m] and active[m] and energy[m] > be:
                best = m
                be = energy[m]
        if best == c:
            continue
        for m in range(n):
            if m != c and cluster_of[m] == c and alive[m]:
                cluster_of[m] = best
        cluster_of[c] = best
        heads[a] = best
        changed = True
    return np.sort(heads), changed


@njit(cache=True)
def mobile_handovers(x, y, energy, dissipated, alive, cluster_of, chs, range2, l_c, e_tx, eps):
    """Re-home members whose head died or drifted out of range.

    The member sends a DIS-JOIN to its old head (skipped if that head is dead)
    and a JOIN-REQ to the new one, each a data-sized transmission.
    Returns the number of handovers.
    """
    n = x.shape[0]
    is_head = np.zeros(n, dtype=np.bool_)
    for c in chs:
        is_head[c] = True
    moved = 0
    for i in range(n):
        if not alive[i] or is_head[i]:
            continue
        old = cluster_of[i]
        if old >= 0 and alive[old]:
            dx = x[i] - x[old]
            dy = y[i] - y[old]
            if dx * dx + dy * dy <= range2:
                continue
        j = richest_ch_in_range(x[i], y[i], x, y, energy, chs, alive, range2)
        if j < 0:
            continue
        new = chs[j]
        if new == old:
            continue
        moved += 1
        if old >= 0 and alive[old]:
            dx = x[i] - x[old]
            dy = y[i] - y[old]
            if not spend(energy, dissipated, alive, i, e_tx * l_c + eps * l_c * (dx * dx + dy * dy)):
                cluster_of[i] = UNCLUSTERED
                continue
        dx = x[i] - x[new]
        dy = y[i] - y[new]
        if spend(energy, dissipated, alive, i, e_tx * l_c + eps * l_c * (dx * dx + dy * dy)):
            cluster_of[i] = new
        else:
            cluster_of[i] = UNCLUSTERED
    return moved


@njit(cache=True)
def downward_query(x, y, energy, dissipated, alive, cluster_of, chs, l_bs, e_tx, e_rx, eps):
    """Sink instruction relayed by every head to each of its members."""
    n = x.shape[0]
    for c in chs:
        if not alive[c]:
            continue
        m = 0
        for i in range(n):
            if i != c and cluster_of[i] == c and alive[i]:
                m += 1
        if not spend(energy, dissipated, alive, c, (m + 1) * e_rx * l_bs):
            continue
        for i in range(n):
            if i == c or cluster_of[i] != c or not alive[i]:
                continue
            dx = x[i] - x[c]
            dy = y[i] - y[c]
            if not spend(energy, dissipated, alive, c, e_tx * l_bs + eps * l_bs * (dx * dx + dy * dy)):
                break
            spend(energy, dissipated, alive, i, e_rx * l_bs)


@njit(cache=True, _nrt=False)
def _assign_point(D, med, i, slot, slot2, d1, d2):
    b1 = np.inf
    b2 = np.inf
    s1 = -1
    s2 = -1
    for s in range(med.shape[0]):
        v = D[med[s], i]
        if v < b1:
            b2 = b1
            s2 = s1
            b1 = v
            s1 = s
        elif v < b2:
            b2 = v
            s2 = s
    slot[i] = s1
    slot2[i] = s2
    d1[i] = b1
    d2[i] = b2


@njit(cache=True, _nrt=False)
def _assign(D, med, n, slot, slot2, d1, d2):
    """Nearest and second-nearest medoid (slot and squared distance) of every point.
    Returns the total cost."""
    cost = 0.0
    for i in range(n):
        _assign_point(D, med, i, slot, slot2, d1, d2)
        cost += d1[i]
    return cost


@njit(cache=True, _nrt=False)
def _reassign(D, med, s, n, slot, slot2, d1, d2):
    """Update the assignment after ``med[s]`` was replaced. Returns the total cost.

    Only points whose nearest or second-nearest medoid left need a full rescan.
    """
    j = med[s]
    cost = 0.0
    for i in range(n):
        if slot[i] == s or slot2[i] == s:
            _assign_point(D, med, i, slot, slot2, d1, d2)
        else:
            v = D[j, i]
            if v < d1[i]:
                d2[i] = d1[i]
                slot2[i] = slot[i]
                d1[i] = v
                slot[i] = s
            elif v < d2[i]:
                d2[i] = v
                slot2[i] = s
        cost += d1[i]
    return cost


@njit(cache=True)
def _anneal_chain(D, med, chosen, n, u, t0_frac, t_end_frac, best_med, slot, slot2, d1, d2):
    """One annealing chain from `med`, then swap descent from the best state seen.

    Each row of `u` is one swap proposal (three uniforms: slot, replacement,
    acceptance) under a geometric cooling schedule. Leaves the chain's result
    in `med` and returns its cost. `best_med` and the assignment arrays are
    scratch space.
    """
    C = D.shape[0]
    k = med.shape[0]
    chosen[:] = False
    for s in range(k):
        chosen[med[s]] = True
    cost = _assign(D, med, n, slot, slot2, d1, d2)
    best_med[:] = med
    best_cost = cost
    iters = u.shape[0]
    if C > k and iters > 0 and cost > 0.0:
        temp = t0_frac * cost / n
        cooling = t_end_frac ** (1.0 / iters)
        for it in range(iters):
            s = min(int(u[it, 0] * k), k - 1)
            r = min(int(u[it, 1] * (C - k)), C - k - 1)
            j = -1
            for q in range(C):
                if not chosen[q]:
                    if r == 0:
                        j = q
                        break
                    r -= 1
            new_cost = 0.0
            for i in range(n):
                base = d2[i] if slot[i] == s else d1[i]
                new_cost += min(base, D[j, i])
            delta = new_cost - cost
            if delta < 0.0 or u[it, 2] < math.exp(-delta / temp):
                chosen[med[s]] = False
                chosen[j] = True
                med[s] = j
                cost = _reassign(D, med, s, n, slot, slot2, d1, d2)
                if cost < best_cost * (1.0 - 1e-12):
                    best_cost = cost
                    best_med[:] = med
            temp *= cooling
        if not (best_med == med).all():
            med[:] = best_med
            chosen[:] = False
            for s in range(k):
                chosen[med[s]] = True
            _assign(D, med, n, slot, slot2, d1, d2)
    if C == k:
        return best_cost
    return _swap_descent(D, med, chosen, n, slot, slot2, d1, d2)


@njit(cache=True)
def _swap_descent(D, med, chosen, n, slot, slot2, d1, d2):
    """Swap medoids for candidates until no single swap lowers the cost.

    Expects `chosen` and the assignment arrays to match `med`. Candidates are
    visited cyclically and an improving swap is applied as soon as it is
    found; the search stops after a full cycle without one. Each candidate is
    priced against every slot at once in O(n + k).
    Updates `med` in place and returns the final cost.
    """
    C = D.shape[0]
    k = med.shape[0]
    delta = np.empty(k)
    cost = 0.0
    for i in range(n):
        cost += d1[i]
    j = 0
    since = 0
    while since < C:
        if not chosen[j]:
            common = 0.0
            for s in range(k):
                delta[s] = 0.0
            for i in range(n):
                dj = D[j, i]
                if dj < d1[i]:
                    # the point moves to j whichever medoid leaves
                    common += dj - d1[i]
                else:
                    delta[slot[i]] += min(dj, d2[i]) - d1[i]
            bs = -1
            best = -1e-12 * cost
            for s in range(k):
                if common + delta[s] < best:
                    best = common + delta[s]
                    bs = s
            if bs >= 0:
                chosen[med[bs]] = False
                chosen[j] = True
                med[bs] = j
                cost = _reassign(D, med, bs, n, slot, slot2, d1, d2)
                since = 0
        since += 1
        j += 1
        if j == C:
            j = 0
    return cost


@njit(cache=True)
def anneal_medoids(px, py, cand, k, u, v, confirm, t0_frac, t_end_frac):
    """Pick k medoids among `cand` minimising the summed squared distance of all points.

    The main chain starts from greedy seeding (repeatedly add the candidate
    with the largest cost reduction), anneals with the proposals in `u` and
    finishes with swap descent. Each row of `v` adds a restart: swap descent
    from the k candidates ranked lowest by ``v[r, :len(cand)]``. Restarts stop
    early once `confirm` searches have ended at the best cost found. The
    cheapest result wins, the earliest on ties.
    Returns (sorted chosen point indices, cost).
    """
    n = px.shape[0]
    C = cand.shape[0]
    D = np.empty((C, n))
    for j in range(C):
        cx = px[cand[j]]
        cy = py[cand[j]]
        for i in range(n):
            dx = px[i] - cx
            dy = py[i] - cy
            D[j, i] = dx * dx + dy * dy

    cur = np.full(n, np.inf)
    chosen = np.zeros(C, dtype=np.bool_)
    med = np.empty(k, dtype=np.int64)
    for s in range(k):
        bj = -1
        bc = np.inf
        for j in range(C):
            if chosen[j]:
                continue
            c = 0.0
            for i in range(n):
                c += min(cur[i], D[j, i])
                if c >= bc:
                    break
            if c < bc:
                bc = c
                bj = j
        med[s] = bj
        chosen[bj] = True
        for i in range(n):
            cur[i] = min(cur[i], D[bj, i])

    scratch = np.empty(k, dtype=np.int64)
    slot = np.empty(n, dtype=np.int64)
    slot2 = np.empty(n, dtype=np.int64)
    d1 = np.empty(n)
    d2 = np.empty(n)
    best_cost = _anneal_chain(D, med, chosen, n, u, t0_frac, t_end_frac, scratch, slot, slot2, d1, d2)
    best_med = med.copy()
    restarts = v.shape[0] if C > k else 0
    hits = 1
    for r in range(restarts):
        if hits >= confirm:
            break
        med[:] = np.argsort(v[r, :C])[:k]
        cost = _anneal_chain(D, med, chosen, n, u[:0], t0_frac, t_end_frac, scratch, slot, slot2, d1, d2)
        if cost < best_cost * (1.0 - 1e-12):
            best_cost = cost
            best_med[:] = med
            hits = 1
        elif cost <= best_cost * (1.0 + 1e-12):
            hits += 1
    out = np.empty(k, dtype=np.int64)
    for s in range(k):
        out[s] = cand[best_med[s]]
    return np.sort(out), best_cost


@njit(cache=True)
def charge_status(x, y, energy, dissipated, alive, bsx, bsy, l_c, e_tx, e_rx, eps, report):
    """Centralized control traffic: every live node reports to the sink (``report``)
    or hears the sink's announcement (otherwise)."""
    for i in range(x.shape[0]):
        if not alive[i]:
            continue
        if report:
            dx = x[i] - bsx
            dy = y[i] - bsy
            spend(energy, dissipated, alive, i, e_tx * l_c + eps * l_c * (dx * dx + dy * dy))
        else:
            spend(energy, dissipated, alive, i, e_rx * l_c)


@njit(cache=True)
def centralized_candidates(energy, alive, is_solar, solar_aware, k):
    """Live node ids and the positions (into those ids) of the head candidates.

    Candidates are the nodes at or above the mean residual energy, restricted
    to solar nodes when at least k of those qualify. When fewer than k nodes
    clear the bar, the k richest live nodes (lowest id on ties) are used.
    """
    ids = np.flatnonzero(alive)
    m = ids.shape[0]
    if m == 0:
        return ids, ids
    e = energy[ids]
    mean = e.sum() / m
    bar = mean * (1.0 - 1e-12)
    n_cand = 0
    n_solar = 0
    for a in range(m):
        if e[a] >= bar:
            n_cand += 1
            if is_solar[ids[a]]:
                n_solar += 1
    use_solar = solar_aware and n_solar >= k
    size = n_solar if use_solar else n_cand
    if size < k:
        return ids, np.sort(np.argsort(-e, kind="mergesort")[:k])
    cand = np.empty(size, dtype=np.int64)
    q = 0
    for a in range(m):
        if e[a] >= bar and (not use_solar or is_solar[ids[a]]):
            cand[q] = a
            q += 1
    return ids, cand


@njit(cache=True)
def route_hops(chs, x, y, bsx, bsy, range2):
    """Minimum-hop routes over the head graph. `chs` must be sorted.

    Returns (next hop per head, TO_BS for the sink; hop count per head, 0 when
    the head has no path and sends straight to the sink).
    """
    k = chs.shape[0]
    hop = np.full(k, -1, dtype=np.int64)
    nxt = np.full(k, TO_BS, dtype=np.int64)
    for a in range(k):
        dx = x[chs[a]] - bsx
        dy = y[chs[a]] - bsy
        if dx * dx + dy * dy <= range2:
            hop[a] = 1
    level = 1
    grew = True
    while grew:
        grew = False
        for a in range(k):
            if hop[a] >= 0:
                continue
            for b in range(k):
                if hop[b] != level:
                    continue
                dx = x[chs[a]] - x[chs[b]]
                dy = y[chs[a]] - y[chs[b]]
                if dx * dx + dy * dy <= range2:
                    hop[a] = level + 1
                    grew = True
                    break
        level += 1
    for a in range(k):
        if hop[a] <= 1:
            if hop[a] < 0:
                hop[a] = 0
            continue
        bd = np.inf
        for b in range(k):
            if hop[b] != hop[a] - 1:
                continue
            dx = x[chs[a]] - x[chs[b]]
            dy = y[chs[a]] - y[chs[b]]
            d2 = dx * dx + dy * dy
            if d2 <= range2 and d2 < bd:
                bd = d2
                nxt[a] = chs[b]
    return nxt, hop
