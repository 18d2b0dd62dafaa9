"""Compiled inner loops.

All kernels work on flat CSR arrays.  Edge ``e`` joins clause
``edge_clause[e]`` to 0-based variable ``edge_var[e]``; ``edge_neg[e]`` is the
literal sign.  ``var_edges[var_start[v]:var_start[v + 1]]`` lists the edges of
variable ``v``.  Random numbers come from a SplitMix64 state held in a
one-element ``uint64`` array so every kernel is reproducible from its seed.
"""

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

UP_OK = 0
UP_CONTRADICTION = 1


@njit(cache=True)
def rng_next(state):
    state[0] += _GAMMA
    z = state[0]
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def rng_uniform(state):
    return np.float64(rng_next(state) >> _S11) * _INV53


@njit(cache=True)
def rng_below(state, n):
    # float scaling: bias is below 2**-40 for the sizes used here
    r = np.int64(rng_uniform(state) * n)
    if r >= n:
        r = n - 1
    return r


@njit(cache=True)
def fill_uniform(out, idx, state):
    for t in range(idx.shape[0]):
        out[idx[t]] = rng_uniform(state)


@njit(cache=True)
def shuffle(arr, state):
    for t in range(arr.shape[0] - 1, 0, -1):
        s = rng_below(state, t + 1)
        tmp = arr[t]
        arr[t] = arr[s]
        arr[s] = tmp


@njit(cache=True)
def unit_propagate(fix_vars, fix_vals, edge_clause, edge_var, edge_neg,
                   clause_start, var_start, var_edges,
                   edge_live, clause_live, clause_nlive, var_live, assignment):
    """Apply fixes and propagate to fixpoint.

    Returns ``(status, queue, n_queued)``; ``queue[:n_queued]`` holds every
    variable assigned by this call in assignment order.
    """
    n = assignment.shape[0]
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for t in range(fix_vars.shape[0]):
        v = fix_vars[t]
        val = fix_vals[t]
        if assignment[v] == -1:
            assignment[v] = val
            queue[tail] = v
            tail += 1
        elif assignment[v] != val:
            return UP_CONTRADICTION, queue, tail
    while head < tail:
        v = queue[head]
        head += 1
        val = assignment[v]
        var_live[v] = False
        for p in range(var_start[v], var_start[v + 1]):
            e = var_edges[p]
            if not edge_live[e]:
                continue
            c = edge_clause[e]
            # literal is true iff value differs from the negation flag
            if (val == 1) != edge_neg[e]:
                clause_live[c] = False
                for e2 in range(clause_start[c], clause_start[c + 1]):
                    edge_live[e2] = False
                clause_nlive[c] = 0
            else:
                edge_live[e] = False
                clause_nlive[c] -= 1
                if clause_nlive[c] == 0:
                    clause_live[c] = False
                    return UP_CONTRADICTION, queue, tail
                if clause_nlive[c] == 1:
                    for e2 in range(clause_start[c], clause_start[c + 1]):
                        if edge_live[e2]:
                            w = edge_var[e2]
                            need = np.int8(0) if edge_neg[e2] else np.int8(1)
                            if assignment[w] == -1:
                                assignment[w] = need
                                queue[tail] = w
                                tail += 1
                            elif assignment[w] != need:
                                return UP_CONTRADICTION, queue, tail
                            break
    return UP_OK, queue, tail


@njit(cache=True)
def _cavity_ratio(j, skip_edge, sign, eta, edge_neg, var_start, var_edges, edge_live):
    """Probability-ratio factor that variable ``j`` is forced to violate the clause.

    ``skip_edge`` is the edge joining ``j`` to the clause itself; ``sign`` is
    the literal sign of ``j`` in that clause.  Returns -1.0 on a zero
    normalizer (certain warnings in both directions).
    """
    p_unsat = 1.0
    p_sat = 1.0
    for p in range(var_start[j], var_start[j + 1]):
        f = var_edges[p]
        if f == skip_edge or not edge_live[f]:
            continue
        if edge_neg[f] == sign:
            p_sat *= 1.0 - eta[f]
        else:
            p_unsat *= 1.0 - eta[f]
    w_u = (1.0 - p_unsat) * p_sat
    w_s = (1.0 - p_sat) * p_unsat
    w_0 = p_unsat * p_sat
    den = w_u + w_s + w_0
    if den <= 0.0:
        return -1.0
    return w_u / den


@njit(cache=True)
def edge_update(e, eta, edge_clause, edge_neg, edge_var, clause_start,
                var_start, var_edges, edge_live):
    """New survey on edge ``e``; negative return flags a contradiction."""
    a = edge_clause[e]
    prod = 1.0
    for e2 in range(clause_start[a], clause_start[a + 1]):
        if e2 == e or not edge_live[e2]:
            continue
        r = _cavity_ratio(edge_var[e2], e2, edge_neg[e2], eta, edge_neg,
                          var_start, var_edges, edge_live)
        if r < 0.0:
            return -1.0
        prod *= r
    return prod


@njit(cache=True)
def var_products(eta, edge_neg, var_start, var_edges, edge_live, prod, zeros):
    """Per variable and sign, product of nonzero ``1 - eta`` and count of zero factors.

    Column 0 covers positive occurrences, column 1 negated ones.  Keeping
    zeros apart lets a cavity product divide out one edge exactly.
    """
    for v in range(var_start.shape[0] - 1):
        prod[v, 0] = 1.0
        prod[v, 1] = 1.0
        zeros[v, 0] = 0
        zeros[v, 1] = 0
        for p in range(var_start[v], var_start[v + 1]):
            f = var_edges[p]
            if not edge_live[f]:
                continue
            s = 1 if edge_neg[f] else 0
            fac = 1.0 - eta[f]
            if fac == 0.0:
                zeros[v, s] += 1
            else:
                prod[v, s] *= fac


@njit(cache=True, inline="always")
def _fast_update(e, eta, edge_clause, edge_var, edge_neg, clause_start, edge_live,
                 prod, zeros):
    a = edge_clause[e]
    out = 1.0
    for e2 in range(clause_start[a], clause_start[a + 1]):
        if e2 == e or not edge_live[e2]:
            continue
        j = edge_var[e2]
        s = 1 if edge_neg[e2] else 0
        fac = 1.0 - eta[e2]
        if fac == 0.0:
            p_sat = prod[j, s] if zeros[j, s] == 1 else 0.0
        else:
            p_sat = prod[j, s] / fac if zeros[j, s] == 0 else 0.0
        p_unsat = prod[j, 1 - s] if zeros[j, 1 - s] == 0 else 0.0
        den = p_sat + p_unsat - p_sat * p_unsat
        if den <= 0.0:
            return -1.0
        out *= (1.0 - p_unsat) * p_sat / den
    return out


@njit(cache=True)
def sp_sweep(order, eta, edge_clause, edge_var, edge_neg, clause_start,
             var_start, var_edges, edge_live, damping, state):
    """One asynchronous sweep over ``order`` (shuffled in place first)."""
    n = var_start.shape[0] - 1
    prod = np.empty((n, 2))
    zeros = np.empty((n, 2), dtype=np.int64)
    var_products(eta, edge_neg, var_start, var_edges, edge_live, prod, zeros)
    shuffle(order, state)
    max_delta = 0.0
    contradiction = False
    for t in range(order.shape[0]):
        e = order[t]
        new = _fast_update(e, eta, edge_clause, edge_var, edge_neg, clause_start,
                           edge_live, prod, zeros)
        if new < 0.0:
            contradiction = True
            new = 0.0
        elif damping > 0.0:
            new = (1.0 - damping) * new + damping * eta[e]
        old = eta[e]
        delta = abs(new - old)
        if delta > max_delta:
            max_delta = delta
        if new != old:
            # swap the edge's factor in its variable's running product
            v = edge_var[e]
            s = 1 if edge_neg[e] else 0
            if old == 1.0:
                zeros[v, s] -= 1
            else:
                prod[v, s] /= 1.0 - old
            if new == 1.0:
                zeros[v, s] += 1
            else:
                prod[v, s] *= 1.0 - new
            eta[e] = new
    return max_delta, contradiction


@njit(cache=True)
def sp_sweep_clauses(clauses, eta, edge_clause, edge_var, edge_neg, clause_start,
                     var_start, var_edges, edge_live, damping, state):
    """Sweep that visits clauses in random order and refreshes all their edges.

    Surveys leaving one clause never enter each other's cavity products, so
    this equals an edge-level asynchronous sweep whose order keeps each
    clause's edges adjacent.
    """
    n = var_start.shape[0] - 1
    prod = np.empty((n, 2))
    zeros = np.empty((n, 2), dtype=np.int64)
    var_products(eta, edge_neg, var_start, var_edges, edge_live, prod, zeros)
    shuffle(clauses, state)
    ratio = np.empty(64)
    max_delta = 0.0
    contradiction = False
    for t in range(clauses.shape[0]):
        a = clauses[t]
        lo = clause_start[a]
        hi = clause_start[a + 1]
        if hi - lo > ratio.shape[0]:
            ratio = np.empty(2 * (hi - lo))
        n_zero = 0
        nz_prod = 1.0
        bad = False
        for e2 in range(lo, hi):
            if not edge_live[e2]:
                continue
            j = edge_var[e2]
            s = 1 if edge_neg[e2] else 0
            fac = 1.0 - eta[e2]
            if fac == 0.0:
                p_sat = prod[j, s] if zeros[j, s] == 1 else 0.0
            else:
                p_sat = prod[j, s] / fac if zeros[j, s] == 0 else 0.0
            p_unsat = prod[j, 1 - s] if zeros[j, 1 - s] == 0 else 0.0
            den = p_sat + p_unsat - p_sat * p_unsat
            if den <= 0.0:
                bad = True
                r = 0.0
            else:
                r = (1.0 - p_unsat) * p_sat / den
            ratio[e2 - lo] = r
            if r == 0.0:
                n_zero += 1
            else:
                nz_prod *= r
        for e in range(lo, hi):
            if not edge_live[e]:
                continue
            if bad:
                new = _fast_update(e, eta, edge_clause, edge_var, edge_neg,
                                   clause_start, edge_live, prod, zeros)
            else:
                r = ratio[e - lo]
                if r == 0.0:
                    new = nz_prod if n_zero == 1 else 0.0
                else:
                    new = nz_prod / r if n_zero == 0 else 0.0
            if new < 0.0:
                contradiction = True
                new = 0.0
            elif damping > 0.0:
                new = (1.0 - damping) * new + damping * eta[e]
            old = eta[e]
            delta = abs(new - old)
            if delta > max_delta:
                max_delta = delta
            if new != old:
                # swap the edge's factor in its variable's running product
                v = edge_var[e]
                s = 1 if edge_neg[e] else 0
                if old == 1.0:
                    zeros[v, s] -= 1
                else:
                    prod[v, s] /= 1.0 - old
                if new == 1.0:
                    zeros[v, s] += 1
                else:
                    prod[v, s] *= 1.0 - new
                eta[e] = new
    return max_delta, contradiction


@njit(cache=True)
def sp_run(order, by_clause, eta, edge_clause, edge_var, edge_neg, clause_start,
           var_start, var_edges, edge_live, damping, tol, max_sweeps, state):
    """Sweep until the largest change drops below ``tol``.

    ``order`` holds live clause ids when ``by_clause`` is set, live edge ids
    otherwise.  Returns ``(converged, sweeps, contradiction, last_delta)``.
    """
    delta = 0.0
    for s in range(max_sweeps):
        if by_clause:
            delta, contra = sp_sweep_clauses(order, eta, edge_clause, edge_var, edge_neg,
                                             clause_start, var_start, var_edges,
                                             edge_live, damping, state)
        else:
            delta, contra = sp_sweep(order, eta, edge_clause, edge_var, edge_neg,
                                     clause_start, var_start, var_edges, edge_live,
                                     damping, state)
        if contra:
            return False, s + 1, True, delta
        if delta < tol:
            return True, s + 1, False, delta
    return False, max_sweeps, False, delta


@njit(cache=True)
def marginals(eta, edge_neg, var_start, var_edges, edge_live, var_live, swap_polarity):
    """Rows ``(mu0, mu1, mu_star)`` per variable; dead variables get NaN.

    The second return value flags variables whose three weights are all zero.
    """
    n = var_live.shape[0]
    out = np.full((n, 3), np.nan)
    bad = np.zeros(n, dtype=np.bool_)
    for v in range(n):
        if not var_live[v]:
            continue
        p_pos = 1.0
        p_neg = 1.0
        for p in range(var_start[v], var_start[v + 1]):
            f = var_edges[p]
            if not edge_live[f]:
                continue
            if edge_neg[f]:
                p_neg *= 1.0 - eta[f]
            else:
                p_pos *= 1.0 - eta[f]
        if swap_polarity:
            w1 = (1.0 - p_neg) * p_pos
            w0 = (1.0 - p_pos) * p_neg
        else:
            w1 = (1.0 - p_pos) * p_neg
            w0 = (1.0 - p_neg) * p_pos
        ws = p_pos * p_neg
        z = w0 + w1 + ws
        if z <= 0.0:
            bad[v] = True
            continue
        out[v, 0] = w0 / z
        out[v, 1] = w1 / z
        out[v, 2] = ws / z
    return out, bad


@njit(cache=True)
def walksat(starts, vars0, negs, var_start, occ_clause, occ_neg, n,
            noise, max_flips, tries, state):
    """SKC WalkSAT.  Returns ``(found, assignment, total_flips)``."""
    m = starts.shape[0] - 1
    assign = np.zeros(n, dtype=np.int8)
    numtrue = np.zeros(m, dtype=np.int64)
    unsat = np.empty(m, dtype=np.int64)
    where = np.full(m, -1, dtype=np.int64)
    cand = np.empty(max(1, np.max(starts[1:] - starts[:-1]) if m > 0 else 1), dtype=np.int64)
    total = 0
    for _ in range(tries):
        for v in range(n):
            assign[v] = np.int8(rng_next(state) >> np.uint64(63))
        n_unsat = 0
        for c in range(m):
            cnt = 0
            for p in range(starts[c], starts[c + 1]):
                if (assign[vars0[p]] == 1) != negs[p]:
                    cnt += 1
            numtrue[c] = cnt
            where[c] = -1
            if cnt == 0:
                where[c] = n_unsat
                unsat[n_unsat] = c
                n_unsat += 1
        flips = 0
        while n_unsat > 0 and flips < max_flips:
            c = unsat[rng_below(state, n_unsat)]
            best = 1 << 62
            n_cand = 0
            for p in range(starts[c], starts[c + 1]):
                v = vars0[p]
                brk = 0
                for q in range(var_start[v], var_start[v + 1]):
                    c2 = occ_clause[q]
                    if numtrue[c2] == 1 and (assign[v] == 1) != occ_neg[q]:
                        brk += 1
                if brk < best:
                    best = brk
                    n_cand = 0
                if brk == best:
                    cand[n_cand] = v
                    n_cand += 1
            if best > 0 and rng_uniform(state) < noise:
                v = vars0[starts[c] + rng_below(state, starts[c + 1] - starts[c])]
            else:
                v = cand[rng_below(state, n_cand)]
            assign[v] = 1 - assign[v]
            flips += 1
            for q in range(var_start[v], var_start[v + 1]):
                c2 = occ_clause[q]
                if (assign[v] == 1) != occ_neg[q]:
                    numtrue[c2] += 1
                    if numtrue[c2] == 1:
                        last = unsat[n_unsat - 1]
                        pos = where[c2]
                        unsat[pos] = last
                        where[last] = pos
                        where[c2] = -1
                        n_unsat -= 1
                else:
                    numtrue[c2] -= 1
                    if numtrue[c2] == 0:
                        where[c2] = n_unsat
                        unsat[n_unsat] = c2
                        n_unsat += 1
        total += flips
        if n_unsat == 0:
            return True, assign, total
    return False, assign, total


@njit(cache=True)
def enumerate_all(n, starts, vars0, negs, cap, state):
    """Brute force over all ``2**n`` assignments (bit ``v`` of ``x`` is variable ``v``).

    Returns ``(count, ones, sample, n_sample)`` where ``ones[v]`` counts
    solutions with variable ``v`` true and ``sample`` is a uniform reservoir
    sample of at most ``cap`` solutions.
    """
    m = starts.shape[0] - 1
    ones = np.zeros(n, dtype=np.int64)
    sample = np.empty(max(cap, 1), dtype=np.int64)
    count = 0
    total = np.int64(1) << np.int64(n)
    for x in range(total):
        ok = True
        for c in range(m):
            sat = False
            for p in range(starts[c], starts[c + 1]):
                bit = (x >> vars0[p]) & 1
                if (bit == 1) != negs[p]:
                    sat = True
                    break
            if not sat:
                ok = False
                break
        if not ok:
            continue
        count += 1
        for v in range(n):
            ones[v] += (x >> v) & 1
        if count <= cap:
            sample[count - 1] = x
        elif cap > 0:
            r = rng_below(state, count)
            if r < cap:
                sample[r] = x
    return count, ones, sample, min(count, cap)
