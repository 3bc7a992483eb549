"""Reference values for the integration tests.

Computed with scipy (Schur-based expm/logm/sqrtm, LAPACK Cholesky) and
mpmath at 50 digits, independently of the crate's Jacobi eigen path.
Regenerate with `python3 oracles.py > oracles.json`.
"""

import json

import mpmath as mp
import numpy as np
from scipy.linalg import expm, fractional_matrix_power, logm, sqrtm
from scipy.spatial.transform import Rotation

mp.mp.dps = 50

A = np.array([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]])
B = np.array([[2.0, -0.3, 0.1], [-0.3, 1.5, 0.4], [0.1, 0.4, 1.0]])
C = np.array([[1.0, 0.0, 0.3], [0.0, 2.0, 0.0], [0.3, 0.0, 0.7]])
S = np.array([[0.3, -0.2, 0.1], [-0.2, -0.5, 0.4], [0.1, 0.4, 0.2]])
G = np.array([[1.0, 0.5, -0.2], [0.5, -0.3, 0.7], [-0.2, 0.7, 0.4]])
W = [0.2, 0.5, 0.3]

BATCH = [
    np.array([[2.0, 0.3], [0.3, 1.0]]),
    np.array([[1.2, -0.4], [-0.4, 0.9]]),
    np.array([[0.6, 0.1], [0.1, 1.8]]),
    np.array([[3.0, 1.0], [1.0, 1.5]]),
]
BIAS = np.array([[1.5, 0.2], [0.2, 0.8]])
SCALE, EPS, MOMENTUM = 0.7, 1e-5, 0.1


def real(m):
    return np.real_if_close(m, tol=1e6).real


def sym(m):
    return 0.5 * (m + m.T)


def spow(p, t):
    return sym(real(fractional_matrix_power(p, t)))


def slog(p):
    return sym(real(logm(p)))


def sexp(s):
    return sym(expm(s))


def ssqrt(p):
    return sym(real(sqrtm(p)))


def clog(p):
    l = np.linalg.cholesky(p)
    return np.tril(l, -1) + np.diag(np.log(np.diag(l)))


def clog_inv(x):
    l = np.tril(x, -1) + np.diag(np.exp(np.diag(x)))
    return l @ l.T


def ab_norm(v, alpha, beta):
    return np.sqrt(alpha * np.sum(v * v) + beta * np.trace(v) ** 2)


def aim_whiten(p, q):
    r = np.linalg.inv(ssqrt(q))
    return sym(r @ p @ r)


def aim_dist(p, q, theta=1.0, alpha=1.0, beta=0.0):
    pt, qt = spow(p, theta), spow(q, theta)
    return ab_norm(slog(aim_whiten(pt, qt)), alpha, beta) / abs(theta)


def lem_dist(p, q, alpha=1.0, beta=0.0):
    return ab_norm(slog(p) - slog(q), alpha, beta)


def lcm_dist(p, q, theta=1.0):
    return np.linalg.norm(clog(spow(p, theta)) - clog(spow(q, theta))) / abs(theta)


def aim_mean(points, weights, theta=1.0):
    pts = [spow(p, theta) for p in points]
    m = sexp(sum(w * slog(p) for p, w in zip(pts, weights)))
    for _ in range(500):
        r = ssqrt(m)
        ri = np.linalg.inv(r)
        t = sum(w * slog(sym(ri @ p @ ri)) for p, w in zip(pts, weights))
        m = sym(r @ sexp(t) @ r)
        if np.linalg.norm(t) < 1e-15:
            break
    return spow(m, 1.0 / theta)


def lem_mean(points, weights):
    return sexp(sum(w * slog(p) for p, w in zip(points, weights)))


def lcm_mean(points, weights):
    return clog_inv(sum(w * clog(p) for p, w in zip(points, weights)))


def mp_directional(f, a, g, h=mp.mpf("1e-20")):
    am, gm = mp.matrix(a.tolist()), mp.matrix(g.tolist())
    d = (f(am + h * gm) - f(am - h * gm)) / (2 * h)
    return np.array([[float(d[i, j]) for j in range(d.cols)] for i in range(d.rows)])


def mp_pow(t):
    def f(x):
        e, q = mp.eighe(x)
        return q * mp.diag([v ** mp.mpf(t) for v in e]) * q.T

    return f


def so_log(r, s):
    v = real(logm(r.T @ s))
    return 0.5 * (v - v.T)


def so_mean(rots, weights):
    m = rots[int(np.argmax(weights))]
    for _ in range(500):
        t = sum(w * so_log(m, r) for r, w in zip(rots, weights))
        m = m @ expm(t)
        if np.linalg.norm(t) < 1e-15:
            break
    return m


def liebn(kind):
    if kind == "lem":
        logs = [slog(x) for x in BATCH]
        mu = sum(logs) / len(logs)
        var = float(np.mean([np.sum((l - mu) ** 2) for l in logs]))
        f = SCALE / np.sqrt(var + EPS)
        out = [sexp(f * (l - mu) + slog(BIAS)) for l in logs]
        mean = sexp(mu)
        running = sexp(MOMENTUM * mu)
    elif kind == "lcm":
        logs = [clog(x) for x in BATCH]
        mu = sum(logs) / len(logs)
        var = float(np.mean([np.sum((l - mu) ** 2) for l in logs]))
        f = SCALE / np.sqrt(var + EPS)
        out = [clog_inv(f * (l - mu) + clog(BIAS)) for l in logs]
        mean = clog_inv(mu)
        running = clog_inv(MOMENTUM * mu)
    else:
        w = [1.0 / len(BATCH)] * len(BATCH)
        mean = aim_mean(BATCH, w)
        var = float(np.mean([aim_dist(x, mean) ** 2 for x in BATCH]))
        f = SCALE / np.sqrt(var + EPS)
        # Group inverse under Q ⊙ P = K_Q P K_Qᵀ is K⁻¹K⁻ᵀ, not the matrix inverse.
        kinv = np.linalg.inv(np.linalg.cholesky(mean))
        k, kb = np.linalg.cholesky(kinv @ kinv.T), np.linalg.cholesky(BIAS)
        out = [sym(kb @ spow(sym(k @ x @ k.T), f) @ kb.T) for x in BATCH]
        running = spow(mean, MOMENTUM)
    return {
        "outputs": [o.tolist() for o in out],
        "batch_mean": mean.tolist(),
        "batch_variance": var,
        "running_mean": running.tolist(),
        "running_variance": (1 - MOMENTUM) * 1.0 + MOMENTUM * var,
    }


def main():
    out = {}
    out["eigenvalues"] = sorted(np.linalg.eigvalsh(A).tolist(), reverse=True)
    out["mexp_s"] = sexp(S).tolist()
    out["mlog_a"] = slog(A).tolist()
    out["pow_a_half"] = ssqrt(A).tolist()
    out["pow_a_m1_5"] = spow(A, -1.5).tolist()
    out["clog_a"] = clog(A).tolist()
    out["vjp"] = {
        "exp": mp_directional(mp.expm, A, G).tolist(),
        "log": mp_directional(mp.logm, A, G).tolist(),
        "pow_0.5": mp_directional(mp_pow(0.5), A, G).tolist(),
        "pow_-1.5": mp_directional(mp_pow(-1.5), A, G).tolist(),
    }
    out["dist"] = {
        "aim": aim_dist(A, B),
        "aim_theta0.5_beta0.1": aim_dist(A, B, 0.5, 1.0, 0.1),
        "aim_theta-1.5": aim_dist(A, B, -1.5),
        "lem": lem_dist(A, B),
        "lem_beta1/9": lem_dist(A, B, 1.0, 1.0 / 9.0),
        "lem_alpha2_beta0.5": lem_dist(A, B, 2.0, 0.5),
        "lcm": lcm_dist(A, B),
        "lcm_theta0.5": lcm_dist(A, B, 0.5),
    }
    ra, rb = ssqrt(A), np.linalg.inv(ssqrt(A))
    out["aim_log_at"] = sym(ra @ slog(sym(rb @ B @ rb)) @ ra).tolist()
    ka, kb = np.linalg.cholesky(A), np.linalg.cholesky(B)
    lcm_sum = np.tril(ka, -1) + np.tril(kb, -1) + np.diag(np.diag(ka) * np.diag(kb))
    out["compose"] = {
        "aim": (ka @ B @ ka.T).tolist(),
        "lem": sexp(slog(A) + slog(B)).tolist(),
        "lcm": (lcm_sum @ lcm_sum.T).tolist(),
    }
    pts = [A, B, C]
    out["mean"] = {
        "aim": aim_mean(pts, W).tolist(),
        "aim_theta0.5": aim_mean(pts, W, 0.5).tolist(),
        "lem": lem_mean(pts, W).tolist(),
        "lcm": lcm_mean(pts, W).tolist(),
    }
    r = Rotation.from_rotvec([0.3, -1.1, 0.7]).as_matrix()
    s = Rotation.from_rotvec([-0.9, 0.2, 1.4]).as_matrix()
    t = Rotation.from_rotvec([0.5, 0.4, -0.2]).as_matrix()
    k1 = np.array([[0, -0.4, 0.2, 0.1], [0.4, 0, -0.3, 0.5], [-0.2, 0.3, 0, -0.6], [-0.1, -0.5, 0.6, 0]])
    k2 = np.array([[0, 0.7, -0.1, 0.3], [-0.7, 0, 0.2, -0.4], [0.1, -0.2, 0, 0.5], [-0.3, 0.4, -0.5, 0]])
    r4, s4 = expm(k1), expm(k2)
    out["so3"] = {
        "r": r.tolist(),
        "s": s.tolist(),
        "t": t.tolist(),
        "log": so_log(r, s).tolist(),
        "dist": float(np.linalg.norm(so_log(r, s))),
        "mean": so_mean([r, s, t], W).tolist(),
    }
    out["so4"] = {
        "r": r4.tolist(),
        "s": s4.tolist(),
        "log": so_log(r4, s4).tolist(),
        "dist": float(np.linalg.norm(so_log(r4, s4))),
        "midpoint": (r4 @ expm(0.5 * so_log(r4, s4))).tolist(),
    }
    out["liebn"] = {
        "batch": [x.tolist() for x in BATCH],
        "bias": BIAS.tolist(),
        "scale": SCALE,
        "epsilon": EPS,
        "momentum": MOMENTUM,
        "lem": liebn("lem"),
        "lcm": liebn("lcm"),
        "aim": liebn("aim"),
    }
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
