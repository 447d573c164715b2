"""Adaptive tanh-sinh (double-exponential) quadrature over mpmath values.

Internal cross-check machinery: the certified code paths never depend on
these routines, but several contracts are validated against them (the
terminant's defining integral, the xi Dirichlet series' integral form,
the resurgence moment integrals).  Values are plain mpf/mpc; the second
return element is a heuristic error estimate from the standard level
-doubling model (the difference between consecutive refinements squares),
not a certified bound.

Supports finite intervals via x = tanh((pi/2) sinh t) and the half line
[0, inf) via x = scale * exp((pi/2) sinh t); integrands may be complex.
"""

from __future__ import annotations

import mpmath as mp


def _level_sum(g, h, level, tiny_rel, t_cap):
    """Sum g at the new nodes of this refinement level, step h.

    Level 0 visits every integer multiple of h; deeper levels only the odd
    multiples (the even ones were visited at the coarser step).  The node
    walk stops in each direction after three consecutive contributions
    below tiny_rel times the largest contribution seen, so tails cost O(1)
    whatever the integral's overall scale; t_cap bounds the walk even for
    an identically-zero integrand.
    """
    total = mp.mpf(0)
    peak = mp.mpf(0)
    for direction in (1, -1):
        k = direction
        if level == 0 and direction == 1:
            contrib = g(mp.mpf(0))
            total += contrib
            peak = abs(contrib)
        dead = 0
        while True:
            t = k * h
            if abs(t) > t_cap:
                break
            contrib = g(t)
            total += contrib
            mag = abs(contrib)
            if mag > peak:
                peak = mag
            if mag < tiny_rel * peak:
                dead += 1
                if dead >= 3:
                    break
            else:
                dead = 0
            k += 2 * direction if level > 0 else direction
    return total


def _refine(g, target, max_level):
    # level-doubling driver shared by both transformations; g(t) already
    # contains the weight but not the step h.  The walk cap keeps endpoint
    # offsets representable at the (elevated) working precision, so nodes
    # never collapse onto a singular endpoint; the dead-node cutoff tracks
    # the caller's target, not the working precision, so tail walks stay
    # short.
    tiny_rel = target * mp.mpf(2) ** -40
    # endpoint offsets shrink like 2 e^{-2 s}, s = (pi/2) sinh t, so this
    # cap keeps them above 2^{10 - prec}, representable in b - offset
    t_cap = mp.asinh((mp.mp.prec - 10) * mp.log(2) / mp.pi)
    h = mp.mpf(1)
    total = _level_sum(g, h, 0, tiny_rel, t_cap)
    value = h * total
    prev_delta = None
    err = abs(value) + 1
    for level in range(1, max_level + 1):
        h = h / 2
        total = total + _level_sum(g, h, level, tiny_rel, t_cap)
        new_value = h * total
        delta = abs(new_value - value)
        value = new_value
        if prev_delta is not None:
            if prev_delta > 0 and delta > 0:
                err = min(delta, delta * delta / prev_delta)
            else:
                err = delta
            if err <= target * max(abs(value), mp.mpf(1)):
                break
        prev_delta = delta
    floor = abs(value) * mp.mpf(2) ** (8 - mp.mp.prec)
    return value, max(err, floor)


def tanh_sinh(f, a, b, prec_bits: int = 256, max_level: int = 12):
    """Integrate f over the finite interval [a, b].

    Returns (value, error_estimate).  Endpoint behavior up to integrable
    algebraic/log singularities is handled by the double-exponential decay
    of the weights.
    """
    a = mp.mpf(a)
    b = mp.mpf(b)
    if a == b:
        return mp.mpf(0), mp.mpf(0)
    with mp.workprec(2 * prec_bits + 70):
        half = (b - a) / 2
        piotwo = mp.pi / 2

        def g(t):
            # 1 -+ tanh(s) in exponential form: tanh rounds to exactly +-1
            # near saturation, which would put nodes on the endpoints
            s = piotwo * mp.sinh(t)
            ep = mp.exp(s)
            em = 1 / ep
            w = piotwo * mp.cosh(t) * (2 / (ep + em)) ** 2
            if t < 0:
                x = a + half * (2 * ep / (ep + em))  # a + half*(1 + tanh s)
            else:
                x = b - half * (2 * em / (ep + em))  # b - half*(1 - tanh s)
            return w * f(x)

        target = mp.mpf(2) ** (-prec_bits)
        value, err = _refine(g, target, max_level)
        return half * value, abs(half) * err


def exp_sinh(f, prec_bits: int = 256, max_level: int = 12, scale=1):
    """Integrate f over [0, inf); nodes cluster around x = scale.

    Returns (value, error_estimate).  The integrand must decay at infinity
    fast enough for double-exponential truncation (exponential decay is
    ample); an integrable singularity at 0 is tolerated.
    """
    with mp.workprec(2 * prec_bits + 70):
        piotwo = mp.pi / 2
        s = mp.mpf(scale)

        def g(t):
            x = s * mp.exp(piotwo * mp.sinh(t))
            w = x * piotwo * mp.cosh(t)
            return w * f(x)

        target = mp.mpf(2) ** (-prec_bits)
        return _refine(g, target, max_level)


def half_line_split(f, split, prec_bits: int = 256, max_level: int = 12):
    """Integrate f over [0, inf) as [0, split] + [split, inf).

    The split isolates a feature (integrand peak, nearby pole) inside the
    finite piece; the far piece is shifted so the half-line map's node
    cluster lands just past the split.  Returns (value, error_estimate).
    """
    split = mp.mpf(split)
    if split <= 0:
        raise ValueError("split must be positive")
    near, near_err = tanh_sinh(f, 0, split, prec_bits, max_level)
    far, far_err = exp_sinh(lambda u: f(split + u), prec_bits, max_level, scale=split)
    with mp.workprec(2 * prec_bits + 70):
        return near + far, near_err + far_err
