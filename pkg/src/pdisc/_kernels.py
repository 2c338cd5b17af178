"""Jitted inner loops.

Grids are cubic cells of ``edge`` anchored at ``lo`` with ``shape`` cells per
axis.  Storage is tiled: blocks of ``2**tbits`` cells per axis are contiguous,
so the neighborhood of a query lies on a few memory pages.  Each cell keeps
its first ``nslot`` point indices inline in ``slots[c*nslot:(c+1)*nslot]``
(insertion order, padded with -1).  Further indices spill into a singly linked
list: ``head[c]`` is the newest spilled entry of cell ``c`` (or -1),
``epoint[e]`` the point index of entry ``e`` and ``enext[e]`` the next-older
entry.

Generation draw order (fixed, relied on by the equivalence tests):
initial point = ``n`` x ``random()``; each round = one ``integers(0, len(active))``
then per candidate ``n`` x ``standard_normal()`` and one ``random()``.

Performance note.  numba reference-counts every array bound to a new variable,
which includes the parameters of helpers it inlines, and its pruning pass
misses the pairs that straddle loops.  Each leftover pair is two atomic
operations.  The per-candidate path of :func:`_generate` is therefore written
out in one body; helpers are only called once per accepted point.
"""

import math

import numba
import numpy as np

MODE_REACH = 0
MODE_BRUTE = 1
MODE_TULLEKEN = 2
MODE_BRIDSON = 3

RULE_MIN = 0
RULE_CANDIDATE = 1

# built-in radius families, selected by params[0]
KIND_PARAMETRIC = 0
KIND_CONSTANT = 1

# stats slots
ST_CANDIDATES = 0
ST_OUTSIDE = 1
ST_DIST_CHECKS = 2
ST_ENTRIES = 3
ST_ROUNDS = 4
N_STATS = 5

# relative slack on box-ball tests; keeps the registered/queried cell sets
# supersets under rounding of cell boundaries
_SLACK = 1e-9
INDEX_LIMIT = 2**31 - 1


@numba.njit(cache=True)
def builtin_radius(x, gamma, params):
    """Built-in fields: ``params = [KIND_PARAMETRIC, offset]`` or ``[KIND_CONSTANT, value]``."""
    if params[0] == KIND_CONSTANT:
        return params[1] / gamma
    s = 0.0
    for v in x:
        s += v * v
    return (math.sqrt(s) + params[1]) / gamma


@numba.njit(cache=True)
def cell_coords(p, lo, edge, shape, out):
    """Per-axis cell indices of ``p``; the upper boundary clamps to the last cell."""
    for d in range(p.size):
        i = math.floor((p[d] - lo[d]) / edge)
        out[d] = min(max(i, 0), shape[d] - 1)


@numba.njit(cache=True)
def flat_index(coords, shape, tbits):
    """Storage index of a cell: tiles in C order, cells within a tile in C order."""
    mask = (1 << tbits) - 1
    tf = 0
    wf = 0
    for d in range(coords.size):
        tf = tf * ((shape[d] + mask) >> tbits) + (coords[d] >> tbits)
        wf = (wf << tbits) | (coords[d] & mask)
    return (tf << (coords.size * tbits)) | wf


def storage_size(shape, tbits):
    """Number of cells a tiled grid of ``shape`` allocates (each axis padded to whole tiles)."""
    t = 1 << tbits
    out = 1
    for s in shape:
        out *= -(-int(s) // t) * t
    return out


@numba.njit(cache=True)
def box_dist2(p, coords, lo, edge):
    """Squared distance from ``p`` to the slack-expanded closed box of cell ``coords``."""
    s = 0.0
    for d in range(p.size):
        s += _axis_gap2(p[d], coords[d], lo[d], edge)
    return s


@numba.njit(cache=True, inline='always')
def _axis_gap2(x, i, lo, edge):
    eps = edge * _SLACK
    a = lo + i * edge - eps
    b = a + edge + 2.0 * eps
    if x < a:
        return (a - x) * (a - x)
    if x > b:
        return (x - b) * (x - b)
    return 0.0


def window_size(r, edge, ndim):
    """Upper bound on the number of cells a ball of radius ``r`` can touch."""
    return (2 * (int(r / edge) + 1) + 1) ** ndim


@numba.njit(cache=True)
def collect_cells(p, r, lo, edge, shape, tbits, win, buf):
    """Write the storage indices of cells whose closed box meets B(p, r) into ``buf``.

    Odometer over the leading axes (``win`` holds 3n ints: position, lower
    and upper bound); on the last axis the admissible cell range is solved from
    the remaining squared-radius budget.  Returns the count.  The same
    enumeration is written out inline in :func:`_generate`.
    """
    n = p.size
    last = n - 1
    m = int(r / edge) + 1
    r2 = r * r * (1.0 + _SLACK)
    eps = edge * _SLACK
    mask = (1 << tbits) - 1
    shift = n * tbits
    tl = (shape[last] + mask) >> tbits
    for d in range(last):
        c0 = math.floor((p[d] - lo[d]) / edge)
        win[n + d] = max(c0 - m, 0)
        win[2 * n + d] = min(c0 + m, shape[d] - 1)
        win[d] = win[n + d]
    xl = p[last] - lo[last]
    cnt = 0
    done = False
    while not done:
        part = 0.0
        tp = 0
        wp = 0
        for d in range(last):
            part += _axis_gap2(p[d], win[d], lo[d], edge)
            tp = tp * ((shape[d] + mask) >> tbits) + (win[d] >> tbits)
            wp = (wp << tbits) | (win[d] & mask)
        if part <= r2:
            h = math.sqrt(r2 - part) + eps
            a = max(math.floor((xl - h) / edge), 0)
            b = min(math.floor((xl + h) / edge), shape[last] - 1)
            tp *= tl
            wp <<= tbits
            for j in range(a, b + 1):
                buf[cnt] = ((tp + (j >> tbits)) << shift) | wp | (j & mask)
                cnt += 1
        carry = True
        for d in range(last - 1, -1, -1):
            if carry:
                if win[d] < win[2 * n + d]:
                    win[d] += 1
                    carry = False
                else:
                    win[d] = win[n + d]
        done = carry
    return cnt


@numba.njit(cache=True)
def cells_touching(p, r, lo, edge, shape, tbits):
    """Sorted storage indices of all cells whose closed box meets B(p, r)."""
    buf = np.empty((2 * (int(r / edge) + 1) + 1) ** p.size, np.int64)
    win = np.empty(3 * p.size, np.int64)
    cnt = collect_cells(p, r, lo, edge, shape, tbits, win, buf)
    return np.sort(buf[:cnt])


@numba.njit(cache=True)
def grown(arr, need):
    """Copy of ``arr`` with capacity >= ``need`` (doubling)."""
    size = max(arr.size, 1024)
    while size < need:
        size *= 2
    out = np.empty(size, arr.dtype)
    out[:arr.size] = arr
    return out


@numba.njit(cache=True)
def push_cells(cells, cnt, idx, slots, nslot, head, epoint, enext, count):
    """Add ``idx`` to ``cells[:cnt]``; spill capacity must already suffice.

    Returns the new spill-entry count.
    """
    for t in range(cnt):
        c = cells[t]
        s = c * nslot
        while s < c * nslot + nslot and slots[s] >= 0:
            s += 1
        if s < c * nslot + nslot:
            slots[s] = idx
        else:
            epoint[count] = idx
            enext[count] = head[c]
            head[c] = count
            count += 1
    return count


@numba.njit(cache=True)
def list_cell(cell, slots, nslot, head, epoint, enext):
    """Indices stored in one cell, oldest first."""
    out = []
    for s in range(cell * nslot, cell * nslot + nslot):
        if slots[s] < 0:
            break
        out.append(slots[s])
    spill = []
    e = head[cell]
    while e >= 0:
        spill.append(epoint[e])
        e = enext[e]
    spill.reverse()
    out.extend(spill)
    return np.array(out, dtype=np.int64)


@numba.njit(cache=True)
def _register(mode, y, ry, idx, lo, edge, shape, tbits, slots, nslot, head, epoint, enext,
              count, win, buf):
    """List accepted point ``idx`` in its grid cells.

    Reach lists get every cell meeting B(y, ry), enumerated as in
    :func:`collect_cells` and filled in the same pass; point lists get the
    containing cell.  ``buf.size`` bounds the cells per point, so spill
    capacity is reserved for that many up front.  Returns
    ``(epoint, enext, n_spilled, n_cells)``.
    """
    if mode == MODE_BRUTE:
        return epoint, enext, count, 0
    if count + buf.size > epoint.size:
        if count + buf.size > INDEX_LIMIT:
            raise OverflowError("grid entry count exceeds 32-bit indexing")
        epoint = grown(epoint, count + buf.size)
        enext = grown(enext, count + buf.size)
    n = y.size
    last = n - 1
    mask = (1 << tbits) - 1
    shift = n * tbits
    tl = (shape[last] + mask) >> tbits
    ncell = 0
    if mode != MODE_REACH:
        tf = 0
        wf = 0
        for d in range(n):
            cd = min(max(math.floor((y[d] - lo[d]) / edge), 0), shape[d] - 1)
            tf = tf * ((shape[d] + mask) >> tbits) + (cd >> tbits)
            wf = (wf << tbits) | (cd & mask)
        c = (tf << shift) | wf
        if mode == MODE_BRIDSON and slots[c] >= 0:
            raise RuntimeError("Bridson grid cell received a second point")
        buf[0] = c
        return epoint, enext, push_cells(buf, 1, idx, slots, nslot, head, epoint, enext, count), 1
    m = int(ry / edge) + 1
    r2 = ry * ry * (1.0 + _SLACK)
    eps = edge * _SLACK
    for d in range(last):
        c0 = math.floor((y[d] - lo[d]) / edge)
        win[n + d] = max(c0 - m, 0)
        win[2 * n + d] = min(c0 + m, shape[d] - 1)
        win[d] = win[n + d]
    xl = y[last] - lo[last]
    done = False
    while not done:
        part = 0.0
        tp = 0
        wp = 0
        for d in range(last):
            part += _axis_gap2(y[d], win[d], lo[d], edge)
            tp = tp * ((shape[d] + mask) >> tbits) + (win[d] >> tbits)
            wp = (wp << tbits) | (win[d] & mask)
        if part <= r2:
            h = math.sqrt(r2 - part) + eps
            lo_j = max(math.floor((xl - h) / edge), 0)
            hi_j = min(math.floor((xl + h) / edge), shape[last] - 1)
            tp *= tl
            wp <<= tbits
            for j in range(lo_j, hi_j + 1):
                c = ((tp + (j >> tbits)) << shift) | wp | (j & mask)
                ncell += 1
                s = c * nslot
                end = s + nslot
                while s < end and slots[s] >= 0:
                    s += 1
                if s < end:
                    slots[s] = idx
                else:
                    epoint[count] = idx
                    enext[count] = head[c]
                    head[c] = count
                    count += 1
        carry = True
        for d in range(last - 1, -1, -1):
            if carry:
                if win[d] < win[2 * n + d]:
                    win[d] += 1
                    carry = False
                else:
                    win[d] = win[n + d]
        done = carry
    return epoint, enext, count, ncell


@numba.njit(cache=True, inline='always')
def _generate(rng, lo, hi, k, radius_fn, builtin, gamma, params, mode, rule,
              edge, shape, tbits, slots, nslot, head, epoint, enext, max_points, r_cap, buf):
    """Active-list Poisson-disc generation (Bridson outer loop).

    Always inlined into a per-mode entry with constant ``mode`` and
    ``builtin``, so each compiles to its own loop.  Returns
    ``(points, radii, epoint, enext, n_spilled, stats)``.
    """
    n = lo.size
    last = n - 1
    mask = (1 << tbits) - 1
    shift = n * tbits
    tl = (shape[last] + mask) >> tbits
    eps = edge * _SLACK
    stats = np.zeros(N_STATS, np.int64)
    cap = 1024
    P = np.empty((cap, n))
    R = np.empty(cap)
    active = np.empty(cap, np.int64)
    win = np.empty(3 * n, np.int64)
    y = np.empty(n)
    u = np.empty(n)
    count = 0
    n_entries = 0
    n_rounds = 0
    n_cand = 0
    n_out = 0
    n_checks = 0

    # initial point
    while True:
        inside = True
        for d in range(n):
            y[d] = lo[d] + (hi[d] - lo[d]) * rng.random()
            if y[d] >= hi[d]:
                inside = False
        if inside:
            break
    r0 = radius_fn(y, gamma, params)
    if not (r0 > 0.0 and r0 <= r_cap):
        raise ValueError("radius field returned a value outside (0, r_max]")
    P[0] = y
    R[0] = r0
    npts = 1
    active[0] = 0
    nact = 1
    epoint, enext, count, ncell = _register(mode, y, r0, 0, lo, edge, shape, tbits, slots,
                                            nslot, head, epoint, enext, count, win, buf)
    n_entries += ncell

    while nact > 0:
        n_rounds += 1
        a = rng.integers(0, nact)
        i = active[a]
        ri = R[i]
        found = False
        for _ in range(k):
            n_cand += 1
            # candidate in the annulus [ri, 2 ri]
            while True:
                s = 0.0
                for d in range(n):
                    u[d] = rng.standard_normal()
                    s += u[d] * u[d]
                if s > 0.0:
                    break
            f = (ri + ri * rng.random()) / math.sqrt(s)
            inside = True
            for d in range(n):
                y[d] = P[i, d] + u[d] * f
                if y[d] < lo[d] or y[d] >= hi[d]:
                    inside = False
            if not inside:
                n_out += 1
                continue

            if builtin:
                if params[0] == KIND_CONSTANT:
                    ry = params[1] / gamma
                else:
                    s = 0.0
                    for d in range(n):
                        s += y[d] * y[d]
                    ry = (math.sqrt(s) + params[1]) / gamma
            else:
                ry = radius_fn(y, gamma, params)
            if not ry > 0.0:
                raise ValueError("radius field returned a non-positive threshold")
            if not ry <= r_cap:
                raise ValueError("radius field exceeded its r_max bound")

            bad = False
            if mode == MODE_BRUTE:
                # newest first: a conflicting neighbor is usually recent
                j = npts - 1
                ry2 = ry * ry
                y0 = y[0]
                y1 = y[1] if n > 1 else 0.0
                while j >= 0:
                    t = y0 - P[j, 0]
                    s = t * t
                    if n == 2:
                        t = y1 - P[j, 1]
                        s += t * t
                    else:
                        for d in range(1, n):
                            t = y[d] - P[j, d]
                            s += t * t
                    if s <= ry2:
                        thr = min(ry, R[j]) if rule == RULE_MIN else ry
                        if s <= thr * thr:
                            bad = True
                            break
                    j -= 1
                n_checks += npts - max(j, 0)
            else:
                # cells to scan: the candidate's own cell (reach lists) or
                # every cell meeting B(y, ry) (point lists)
                if mode == MODE_REACH:
                    tf = 0
                    wf = 0
                    for d in range(n):
                        cd = min(max(math.floor((y[d] - lo[d]) / edge), 0), shape[d] - 1)
                        tf = tf * ((shape[d] + mask) >> tbits) + (cd >> tbits)
                        wf = (wf << tbits) | (cd & mask)
                    buf[0] = (tf << shift) | wf
                    ncell = 1
                else:
                    m = int(ry / edge) + 1
                    r2 = ry * ry * (1.0 + _SLACK)
                    for d in range(last):
                        c0 = math.floor((y[d] - lo[d]) / edge)
                        win[n + d] = max(c0 - m, 0)
                        win[2 * n + d] = min(c0 + m, shape[d] - 1)
                        win[d] = win[n + d]
                    xl = y[last] - lo[last]
                    ncell = 0
                    done = False
                    while not done:
                        part = 0.0
                        tp = 0
                        wp = 0
                        for d in range(last):
                            part += _axis_gap2(y[d], win[d], lo[d], edge)
                            tp = tp * ((shape[d] + mask) >> tbits) + (win[d] >> tbits)
                            wp = (wp << tbits) | (win[d] & mask)
                        if part <= r2:
                            h = math.sqrt(r2 - part) + eps
                            lo_j = max(math.floor((xl - h) / edge), 0)
                            hi_j = min(math.floor((xl + h) / edge), shape[last] - 1)
                            tp *= tl
                            wp <<= tbits
                            for j in range(lo_j, hi_j + 1):
                                buf[ncell] = ((tp + (j >> tbits)) << shift) | wp | (j & mask)
                                ncell += 1
                        carry = True
                        for d in range(last - 1, -1, -1):
                            if carry:
                                if win[d] < win[2 * n + d]:
                                    win[d] += 1
                                    carry = False
                                else:
                                    win[d] = win[n + d]
                        done = carry

                # scan each cell: inline slots, then the spill chain
                for t in range(ncell):
                    c = buf[t]
                    pos = c * nslot
                    end = pos + nslot
                    e = -2
                    going = True
                    while going:
                        j = -1
                        if pos < end:
                            j = slots[pos]
                            pos += 1
                        else:
                            e = head[c] if e == -2 else enext[e]
                            if e >= 0:
                                j = epoint[e]
                        if j < 0:
                            going = False
                        else:
                            n_checks += 1
                            s = 0.0
                            for d in range(n):
                                dd = y[d] - P[j, d]
                                s += dd * dd
                            thr = min(ry, R[j]) if rule == RULE_MIN else ry
                            if s <= thr * thr:
                                bad = True
                                going = False
                    if bad:
                        break
            if bad:
                continue

            if npts >= max_points:
                raise RuntimeError("accepted-point count exceeded the packing cap")
            if npts == cap:
                cap *= 2
                P2 = np.empty((cap, n))
                R2 = np.empty(cap)
                A2 = np.empty(cap, np.int64)
                P2[:npts] = P[:npts]
                R2[:npts] = R[:npts]
                A2[:nact] = active[:nact]
                P = P2
                R = R2
                active = A2
            P[npts] = y
            R[npts] = ry
            active[nact] = npts
            nact += 1
            epoint, enext, count, ncell = _register(mode, y, ry, npts, lo, edge, shape, tbits,
                                                    slots, nslot, head, epoint, enext, count,
                                                    win, buf)
            n_entries += ncell
            npts += 1
            found = True
        if not found:
            nact -= 1
            active[a] = active[nact]
    stats[ST_CANDIDATES] = n_cand
    stats[ST_OUTSIDE] = n_out
    stats[ST_DIST_CHECKS] = n_checks
    stats[ST_ENTRIES] = n_entries
    stats[ST_ROUNDS] = n_rounds
    return P[:npts].copy(), R[:npts].copy(), epoint, enext, count, stats


# One cached entry per mode for the built-in fields.  The radius kernel is a
# global here, not an argument: numba cannot cache a function whose signature
# holds another jitted function.

@numba.njit(cache=True)
def _generate_reach(rng, lo, hi, k, gamma, params, rule, edge, shape, tbits,
                    slots, nslot, head, epoint, enext, max_points, r_cap, buf):
    return _generate(rng, lo, hi, k, builtin_radius, True, gamma, params, MODE_REACH, rule,
                     edge, shape, tbits, slots, nslot, head, epoint, enext, max_points, r_cap,
                     buf)


@numba.njit(cache=True)
def _generate_brute(rng, lo, hi, k, gamma, params, rule, edge, shape, tbits,
                    slots, nslot, head, epoint, enext, max_points, r_cap, buf):
    return _generate(rng, lo, hi, k, builtin_radius, True, gamma, params, MODE_BRUTE, rule,
                     edge, shape, tbits, slots, nslot, head, epoint, enext, max_points, r_cap,
                     buf)


@numba.njit(cache=True)
def _generate_tulleken(rng, lo, hi, k, gamma, params, rule, edge, shape, tbits,
                       slots, nslot, head, epoint, enext, max_points, r_cap, buf):
    return _generate(rng, lo, hi, k, builtin_radius, True, gamma, params, MODE_TULLEKEN, rule,
                     edge, shape, tbits, slots, nslot, head, epoint, enext, max_points, r_cap,
                     buf)


@numba.njit(cache=True)
def _generate_bridson(rng, lo, hi, k, gamma, params, rule, edge, shape, tbits,
                      slots, nslot, head, epoint, enext, max_points, r_cap, buf):
    return _generate(rng, lo, hi, k, builtin_radius, True, gamma, params, MODE_BRIDSON, rule,
                     edge, shape, tbits, slots, nslot, head, epoint, enext, max_points, r_cap,
                     buf)


@numba.njit
def _generate_custom(rng, lo, hi, k, radius_fn, gamma, params, mode, rule, edge, shape, tbits,
                     slots, nslot, head, epoint, enext, max_points, r_cap, buf):
    return _generate(rng, lo, hi, k, radius_fn, False, gamma, params, mode, rule, edge, shape,
                     tbits, slots, nslot, head, epoint, enext, max_points, r_cap, buf)


_ENTRIES = {MODE_REACH: _generate_reach, MODE_BRUTE: _generate_brute,
            MODE_TULLEKEN: _generate_tulleken, MODE_BRIDSON: _generate_bridson}


def generate(rng, lo, hi, k, radius_fn, gamma, params, mode, rule,
             edge, shape, tbits, slots, nslot, head, epoint, enext, max_points, r_cap, buf):
    """Run the kernel for ``mode``; built-in fields take the cached path."""
    if radius_fn is builtin_radius:
        return _ENTRIES[mode](rng, lo, hi, k, gamma, params, rule, edge, shape, tbits,
                              slots, nslot, head, epoint, enext, max_points, r_cap, buf)
    return _generate_custom(rng, lo, hi, k, radius_fn, gamma, params, mode, rule, edge, shape,
                            tbits, slots, nslot, head, epoint, enext, max_points, r_cap, buf)


@numba.njit(cache=True, inline='always')
def _dart_throw(rng, lo, hi, radius_fn, gamma, params, rule, max_failures, max_points):
    n = lo.size
    cap = 256
    P = np.empty((cap, n))
    R = np.empty(cap)
    y = np.empty(n)
    stats = np.zeros(N_STATS, np.int64)
    npts = 0
    misses = 0
    n_cand = 0
    n_out = 0
    n_checks = 0
    while misses < max_failures:
        inside = True
        for d in range(n):
            y[d] = lo[d] + (hi[d] - lo[d]) * rng.random()
            if y[d] >= hi[d]:
                inside = False
        n_cand += 1
        if not inside:
            n_out += 1
            misses += 1
            continue
        ry = radius_fn(y, gamma, params)
        if not ry > 0.0:
            raise ValueError("radius field returned a non-positive threshold")
        bad = False
        for j in range(npts):
            n_checks += 1
            s = 0.0
            for d in range(n):
                t = y[d] - P[j, d]
                s += t * t
            thr = min(ry, R[j]) if rule == RULE_MIN else ry
            if s <= thr * thr:
                bad = True
                break
        if bad:
            misses += 1
            continue
        if npts >= max_points:
            raise RuntimeError("accepted-point count exceeded the packing cap")
        if npts == cap:
            cap *= 2
            P2 = np.empty((cap, n))
            R2 = np.empty(cap)
            P2[:npts] = P[:npts]
            R2[:npts] = R[:npts]
            P = P2
            R = R2
        P[npts] = y
        R[npts] = ry
        npts += 1
        misses = 0
    stats[ST_CANDIDATES] = n_cand
    stats[ST_OUTSIDE] = n_out
    stats[ST_DIST_CHECKS] = n_checks
    return P[:npts].copy(), R[:npts].copy(), stats


@numba.njit(cache=True)
def _dart_throw_builtin(rng, lo, hi, gamma, params, rule, max_failures, max_points):
    return _dart_throw(rng, lo, hi, builtin_radius, gamma, params, rule, max_failures,
                       max_points)


@numba.njit
def _dart_throw_custom(rng, lo, hi, radius_fn, gamma, params, rule, max_failures, max_points):
    return _dart_throw(rng, lo, hi, radius_fn, gamma, params, rule, max_failures, max_points)


def dart_throw(rng, lo, hi, radius_fn, gamma, params, rule, max_failures, max_points):
    """Uniform darts checked against every accepted point; stops after ``max_failures`` misses in a row."""
    if radius_fn is builtin_radius:
        return _dart_throw_builtin(rng, lo, hi, gamma, params, rule, max_failures, max_points)
    return _dart_throw_custom(rng, lo, hi, radius_fn, gamma, params, rule, max_failures,
                              max_points)


@numba.njit(cache=True)
def _audit_pairs(X, R, rule):
    n, npts = X.shape
    for i in range(npts):
        Ri = R[i]
        # branch-free count first so the row vectorizes; rescan only on a hit
        hits = 0
        if n == 2:
            x0 = X[0]
            x1 = X[1]
            a = x0[i]
            b = x1[i]
            # radii are positive, so min(R_j, R_i)^2 = min(R_j^2, R_i^2)
            Ri2 = Ri * Ri if rule == RULE_MIN else np.inf
            for j in range(i + 1, npts):
                t = a - x0[j]
                u = b - x1[j]
                s = t * t + u * u
                hits += np.int64(s <= R[j] * R[j]) & np.int64(s <= Ri2)
        else:
            for j in range(i + 1, npts):
                s = 0.0
                for d in range(n):
                    t = X[d, i] - X[d, j]
                    s += t * t
                thr = min(R[j], Ri) if rule == RULE_MIN else R[j]
                hits += s <= thr * thr
        if hits:
            for j in range(i + 1, npts):
                s = 0.0
                for d in range(n):
                    t = X[d, i] - X[d, j]
                    s += t * t
                thr = min(R[j], Ri) if rule == RULE_MIN else R[j]
                if s <= thr * thr:
                    return i, j
    return -1, -1


def audit_pairs(P, R, rule):
    """O(N^2) scan; returns the first violating pair ``(i, j)`` or ``(-1, -1)``.

    Under the candidate rule ``j`` (accepted later) is the one whose radius counts.
    """
    P = np.asarray(P, dtype=np.float64)
    return _audit_pairs(np.ascontiguousarray(P.T), np.ascontiguousarray(R, dtype=np.float64), rule)
