"""Independent reference values for the C++ tests.

Everything here is built from the Hamiltonians and definitions directly
(explicit kets, symbolic gradients, L'Huilier areas), without touching the
library. Run once; the JSON files next to this script are committed.

    python3 tests/oracles/generate_oracles.py
"""
import json
import math
import os

import numpy as np
import scipy.linalg
import sympy as sp

HERE = os.path.dirname(os.path.abspath(__file__))


def dump(name, obj):
    with open(os.path.join(HERE, name), "w") as f:
        json.dump(obj, f, indent=1)
        f.write("\n")


# --- full Hilbert space of a two-ring crystal (7 spins) ----------------------

sx = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
sy = np.array([[0, -0.5j], [0.5j, 0]], dtype=complex)
sz = np.array([[0.5, 0], [0, -0.5]], dtype=complex)
splus = sx + 1j * sy
sminus = sx - 1j * sy
up = np.array([1, 0], dtype=complex)
down = np.array([0, 1], dtype=complex)


def site_op(op, j, n):
    out = np.array([[1.0 + 0j]])
    for k in range(n):
        out = np.kron(out, op if k == j else np.eye(2))
    return out


def ring_geometry():
    r = [0.0] + [1.0] * 6
    phi = [0.0] + [2 * math.pi * i / 6 for i in range(6)]
    return r, phi


def one_channel_h(r, phi, K, J):
    n = len(r)
    H = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(n):
        H += K * r[j] ** 2 * site_op(sz, j, n)
    for j in range(n):
        for k in range(n):
            if j != k:
                H -= (J / n) * r[j] * r[k] * np.exp(-1j * (phi[j] - phi[k])) * (
                    site_op(splus, j, n) @ site_op(sminus, k, n))
    return H


def coherent(theta, azim):
    return math.cos(theta / 2) * up + np.exp(1j * azim) * math.sin(theta / 2) * down


def bcs_product(r, phi):
    # Bloch vector (1/2)(sin t sin p, -sin t cos p, cos t): azimuth p - pi/2
    psi = np.array([1.0 + 0j])
    for j in range(len(r)):
        psi = np.kron(psi, coherent(math.pi * r[j], phi[j] - math.pi / 2))
    return psi


def order_parameter(state, r, phi):
    n = len(r)
    total = 0j
    for j in range(n):
        total += r[j] * np.exp(1j * phi[j]) * np.vdot(state, site_op(sminus, j, n) @ state)
    return 2.0 / n * total


def symmetric_sector(r, phi):
    # centre spin (2 states) times the Dicke ladder of the outer ring, built by
    # repeated application of sum_j e^{-i phi_j} S^+_j to the all-down state
    n = len(r)
    jplus = sum(np.exp(-1j * phi[j]) * site_op(splus, j, n) for j in range(1, n))
    vecs = []
    for c in (up, down):
        v = c
        for _ in range(1, n):
            v = np.kron(v, down)
        for k in range(n):
            vecs.append(v / np.linalg.norm(v))
            v = jplus @ v
    return np.array(vecs).T


def brute_force():
    r, phi = ring_geometry()
    out = {"ions": 7, "cases": []}
    for K in (1.0, 0.3):
        H = one_channel_h(r, phi, K, 1.0)
        V = symmetric_sector(r, phi)
        hs = V.conj().T @ H @ V
        ev = np.linalg.eigvalsh(hs)
        full = np.linalg.eigvalsh(H)
        assert all(np.min(np.abs(full - e)) < 1e-10 for e in ev)
        psi0 = bcs_product(r, phi)
        assert np.linalg.norm(V @ (V.conj().T @ psi0) - psi0) < 1e-12
        times = [0.5 * i for i in range(11)]
        series = []
        for t in times:
            st = scipy.linalg.expm(-1j * H * t) @ psi0
            p = order_parameter(st, r, phi)
            series.append([p.real, p.imag])
        out["cases"].append({"K": K, "J": 1.0, "symmetric_eigenvalues": ev.tolist(),
                             "times": times, "psi": series})
    dump("brute_force_rings.json", out)


# --- classical two-spin equations of motion ----------------------------------

def two_spin():
    r = [0.6, 1.0]
    phi = [0.4, -2.1]
    spins = [[0.21, -0.33, 0.31], [-0.12, 0.4, -0.27]]
    X = sp.symbols("x0 x1")
    Y = sp.symbols("y0 y1")
    Z = sp.symbols("z0 z1")
    a, ac = sp.symbols("a ac")  # alpha and its conjugate, independent

    def ev(expr, subs):
        return complex(sp.N(expr.subs(subs), 30))

    subs = {}
    for j in range(2):
        subs[X[j]], subs[Y[j]], subs[Z[j]] = spins[j]
    out = {"r": r, "phi": phi, "spins": spins}

    # one channel, direct double sum over j != k
    K, J, N = sp.Rational(7, 10), sp.Rational(13, 10), 2
    H = sum(K * r[j] ** 2 * Z[j] for j in range(2))
    for j in range(2):
        for k in range(2):
            if j != k:
                spj = X[j] + sp.I * Y[j]
                smk = X[k] - sp.I * Y[k]
                H -= J / N * r[j] * r[k] * sp.exp(-sp.I * (phi[j] - phi[k])) * spj * smk
    H = sp.expand(H)
    rhs = []
    for j in range(2):
        h = [sp.diff(H, v) for v in (X[j], Y[j], Z[j])]
        s = (X[j], Y[j], Z[j])
        cross = [h[1] * s[2] - h[2] * s[1], h[2] * s[0] - h[0] * s[2], h[0] * s[1] - h[1] * s[0]]
        rhs.append([ev(c, subs).real for c in cross])
    out["one_channel"] = {"K": float(K), "J": float(J), "energy": ev(H, subs).real, "rhs": rhs}

    # two channel
    B1, d1, G = sp.Rational(2, 5), sp.Rational(9, 10), sp.Rational(11, 10)
    alpha = complex(0.3, -0.2)
    H2 = sum(B1 * r[j] ** 2 * Z[j] for j in range(2)) + d1 * a * ac
    for j in range(2):
        spj = X[j] + sp.I * Y[j]
        smj = X[j] - sp.I * Y[j]
        H2 += sp.I * G / sp.sqrt(N) * r[j] * (sp.exp(sp.I * phi[j]) * smj * ac
                                              - sp.exp(-sp.I * phi[j]) * spj * a)
    H2 = sp.expand(H2)
    subs2 = dict(subs)
    subs2[a] = alpha.real + sp.I * alpha.imag
    subs2[ac] = alpha.real - sp.I * alpha.imag
    rhs2 = []
    for j in range(2):
        h = [sp.diff(H2, v) for v in (X[j], Y[j], Z[j])]
        s = (X[j], Y[j], Z[j])
        cross = [h[1] * s[2] - h[2] * s[1], h[2] * s[0] - h[0] * s[2], h[0] * s[1] - h[1] * s[0]]
        rhs2.append([ev(c, subs2).real for c in cross])
    dalpha = ev(-sp.I * sp.diff(H2, ac), subs2)
    # d/dt (sum z + |alpha|^2) vanishes identically
    total = sum(
        sum(sp.diff(H2, v) * 0 for v in (X[j], Y[j])) for j in range(2))
    zdot = 0
    for j in range(2):
        h = [sp.diff(H2, v) for v in (X[j], Y[j], Z[j])]
        zdot += h[0] * Y[j] - h[1] * X[j]
    adot = -sp.I * sp.diff(H2, ac)
    acdot = sp.I * sp.diff(H2, a)
    number_rate = sp.simplify(sp.expand(zdot + adot * ac + a * acdot + total))
    assert number_rate == 0
    out["two_channel"] = {"B1": float(B1), "delta1": float(d1), "G": float(G),
                          "alpha": [alpha.real, alpha.imag], "energy": ev(H2, subs2).real,
                          "rhs": rhs2, "dalpha": [dalpha.real, dalpha.imag]}
    dump("two_spin_rhs.json", out)


# --- single-mode couplings on two ions ---------------------------------------

def single_mode():
    inp = {
        "r": [0.5, 0.9], "phi": [0.3, 2.2], "M": [0.6, 0.8],
        "omega_n": 2 * math.pi * 1.2e6, "omega_r": 2 * math.pi * 180e3,
        "mu_r": 2 * math.pi * 1.75e6, "B0": 2 * math.pi * 10e3, "delta_ac": 2 * math.pi * 40e3,
        "eta_x": 0.3, "dk_z": 1.5e7, "mass": 9.012 * 1.66053906660e-27,
    }
    hbar = 1.054571817e-34
    eta = inp["dk_z"] * math.sqrt(hbar / (2 * inp["mass"] * inp["omega_n"]))
    dn = inp["B0"] - inp["mu_r"] + inp["omega_n"] + inp["omega_r"]
    d2 = inp["delta_ac"] ** 2
    M, r, phi = inp["M"], inp["r"], inp["phi"]
    ex2 = inp["eta_x"] ** 2
    j5 = np.zeros((2, 2), dtype=complex)
    j11 = np.zeros((2, 2), dtype=complex)
    j12 = np.zeros((2, 2), dtype=complex)
    den5 = inp["mu_r"] - inp["omega_n"]
    for j in range(2):
        for k in range(2):
            if j == k:
                j5[j, k] = d2 * inp["B0"] * eta**2 * M[j] ** 2 / (2 * den5**2)
                j11[j, k] = d2 * ex2 * r[j] ** 2 * eta**2 * M[j] ** 2 / (16 * (dn - 2 * inp["B0"]))
                j12[j, k] = -d2 * ex2 * r[j] ** 2 * eta**2 * M[j] ** 2 / (16 * dn)
            else:
                j5[j, k] = d2 * eta**2 * M[j] * M[k] / (2 * den5)
                pre = d2 * ex2 * r[j] * r[k] * eta**2 * M[j] * M[k] / 16
                j11[j, k] = -pre * (1 / (dn - 2 * inp["B0"]) + 1 / (dn - 2 * inp["omega_r"])) * \
                    np.exp(1j * (phi[j] - phi[k]))
                j12[j, k] = -pre * (1 / (dn - 2 * inp["omega_r"]) + 1 / dn) * \
                    np.exp(-1j * (phi[j] - phi[k]))

    def pack(m):
        return [[[m[j, k].real, m[j, k].imag] for k in range(2)] for j in range(2)]

    dump("single_mode_couplings.json", {"input": inp, "eta": eta, "delta_n": dn,
                                        "J5": pack(j5), "J11": pack(j11), "J12": pack(j12)})


# --- solid angles by subdivision ---------------------------------------------

def lhuilier(a, b, c):
    # unsigned spherical excess from the side lengths
    A = math.acos(max(-1.0, min(1.0, float(np.dot(b, c)))))
    B = math.acos(max(-1.0, min(1.0, float(np.dot(c, a)))))
    C = math.acos(max(-1.0, min(1.0, float(np.dot(a, b)))))
    s = 0.5 * (A + B + C)
    t = math.tan(s / 2) * math.tan((s - A) / 2) * math.tan((s - B) / 2) * math.tan((s - C) / 2)
    return 4 * math.atan(math.sqrt(max(t, 0.0)))


def subdivided(a, b, c, depth):
    if depth == 0:
        return lhuilier(a, b, c)
    ab = (a + b) / np.linalg.norm(a + b)
    bc = (b + c) / np.linalg.norm(b + c)
    ca = (c + a) / np.linalg.norm(c + a)
    return (subdivided(a, ab, ca, depth - 1) + subdivided(ab, b, bc, depth - 1)
            + subdivided(ca, bc, c, depth - 1) + subdivided(ab, bc, ca, depth - 1))


def solid_angles():
    rng = np.random.default_rng(20240611)
    cases = []
    while len(cases) < 20:
        v = rng.normal(size=(3, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        a, b, c = v
        # keep triangles well inside a hemisphere so the geodesic triangle is unambiguous
        if min(np.dot(a, b), np.dot(b, c), np.dot(c, a)) < -0.2:
            continue
        sign = 1.0 if np.dot(a, np.cross(b, c)) >= 0 else -1.0
        cases.append({"a": a.tolist(), "b": b.tolist(), "c": c.tolist(),
                      "omega": sign * subdivided(a, b, c, 5)})
    dump("solid_angles.json", {"cases": cases})


if __name__ == "__main__":
    brute_force()
    two_spin()
    single_mode()
    solid_angles()
