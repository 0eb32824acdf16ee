"""Independent high-precision evaluation of the closed-form constants frozen
into the C++ unit tests. Run with `python3 tests/oracles/frozen_values.py`."""
import itertools
from mpmath import mp, mpf, log, ceil

mp.dps = 40


def brute_force_projection(p):
    """Enumerate support sets; keep the feasible one with minimal distance."""
    n = len(p)
    best = None
    for k in range(1, n + 1):
        for supp in itertools.combinations(range(n), k):
            lam = (1 - sum(p[i] for i in supp)) / k
            y = [p[i] + lam if i in supp else mpf(0) for i in range(n)]
            if any(v < 0 for v in y):
                continue
            d = sum((y[i] - p[i]) ** 2 for i in range(n))
            if best is None or d < best[0]:
                best = (d, lam, y)
    return best[1], best[2]


for p in ([mpf("0.4"), mpf("0.8"), mpf("0.3")], [mpf("1.2"), mpf("0.1"), mpf("-0.5")],
          [mpf(3), mpf(-2)]):
    lam, y = brute_force_projection(p)
    print("proj", [float(v) for v in p], "lambda", lam, "y", [str(v) for v in y])

g = mpf("0.9")
print("PI k0", ceil(1 / (1 - g) * log(3 / ((1 - g) * mpf("0.5")))), 1 / (1 - g) * log(3 / ((1 - g) * mpf("0.5"))))
d, eta, mut, nA = mpf("0.5"), mpf(1), mpf(1), 2
ppg = (2 / d) * (1 + 1 / (eta * mut * d)) * (1 / (mut * (1 - g) ** 2)) * (1 + (2 + 5 * nA) / (eta * mut))
print("PPG k0 raw", ppg)
pqa = (2 / d) * (1 + 1 / (eta * d)) * (1 / (eta * (1 - g)) + 1 / (1 - g) ** 2) - 1
print("PQA k0 raw", pqa)
print("linear bound k=10", g ** 10 * (mpf("2.5") + 1 / (1 - g)))
print("geometric eta k=0", 2 / g)
print("improvement lb eta=1", mpf("0.0625") / (mpf("0.25") + 12))
print("improvement lb eta=1e9", mpf("0.0625") / (mpf("0.25") + mpf(12) / mpf(10) ** 9))
print("L(0.9,2)", 2 * g * 2 / (1 - g) ** 3, "L(0.5,4)", 2 * mpf("0.5") * 4 / mpf("0.5") ** 3)
for eta in (mpf("0.1"), mpf("0.3")):
    # Homotopic bandit: solve sum_a (p_a - lam)_+ = 1/gamma for p = (1, -eta*delta).
    p = [mpf(1), -eta * d]
    target = 1 / g
    lam = None
    for k in (1, 2):
        top = sorted(p, reverse=True)[:k]
        cand = (sum(top) - target) / k
        if all(v - cand > 0 for v in top):
            lam = cand
    y = [max(v - lam, 0) * g for v in p]
    print("homotopic eta", eta, "lambda", lam, "pi+", y, "closed form", g * (1 - (1 - 1 / g - eta * d) / 2))
