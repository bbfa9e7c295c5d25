"""Independent reference implementations used only by the tests."""

import math

import numpy as np

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2)


def ry(t):
    return np.array([[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]])


def rz(p):
    return np.diag([np.exp(-0.5j * p), np.exp(0.5j * p)])


def embed(u, target, controls, nq):
    """Dense 2^nq unitary of ``u`` on ``target`` gated by (qubit, polarity) controls.

    Built column by column from basis states, little-endian.
    """
    dim = 1 << nq
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        if all(((col >> q) & 1) == pol for q, pol in controls):
            b = (col >> target) & 1
            for nb in (0, 1):
                row = (col & ~(1 << target)) | (nb << target)
                out[row, col] += u[nb, b]
        else:
            out[col, col] = 1.0
    return out


def gate_unitary(g, nq):
    u = {"H": H, "X": X, "CX": X}.get(g.kind)
    if u is None:
        u = ry(g.angle) if g.kind in ("RY", "U") else rz(g.angle)
    return embed(u, g.target, list(g.controls), nq)


def circuit_unitary(gates, nq):
    m = np.eye(1 << nq, dtype=complex)
    for g in gates:
        m = gate_unitary(g, nq) @ m
    return m


def multiplexor(rot, angles, target, controls, nq):
    """Block-diagonal reference: rot(angles[j]) on ``target`` when the controls read j."""
    dim = 1 << nq
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        j = sum(((col >> q) & 1) << b for b, q in enumerate(controls))
        u = rot(angles[j])
        bit = (col >> target) & 1
        for nb in (0, 1):
            out[(col & ~(1 << target)) | (nb << target), col] += u[nb, bit]
    return out


def phase_aligned(a, b):
    """``a`` rotated by the global phase that best matches ``b``."""
    ov = np.vdot(a, b)
    return a * (ov / abs(ov)) if abs(ov) > 0 else a


def _frac_pt(p):
    from fractions import Fraction

    return Fraction(float(p[0])), Fraction(float(p[1]))


def circumcircle_violations(points, triangles):
    """(triangle, point) pairs with the point strictly inside the circumcircle.

    Uses the exact rational circumcentre, not a determinant predicate.
    """
    pts = [_frac_pt(p) for p in points]
    bad = []
    for tri in triangles:
        (ax, ay), (bx, by), (cx, cy) = (pts[i] for i in tri)
        d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        if d == 0:
            bad.append((tri, None))
            continue
        a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
        ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
        uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
        r2 = (ax - ux) ** 2 + (ay - uy) ** 2
        for k, (px, py) in enumerate(pts):
            if k not in tri and (px - ux) ** 2 + (py - uy) ** 2 < r2:
                bad.append((tri, k))
    return bad


def hull_size(points):
    """Number of input points on the convex hull boundary, collinear ones included."""
    pts = sorted({_frac_pt(p) for p in points})

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) < 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = chain(pts), chain(pts[::-1])
    return len(set(lower[:-1] + upper[:-1]))
