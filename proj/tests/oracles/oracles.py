"""Independent reference values frozen into the C++ tests.

Run with python3; needs mpmath. Each block prints the constants used by the
corresponding test case.
"""
import itertools

import mpmath as mp

mp.mp.dps = 40


def conjugacy_classes(genus, max_len):
    # Letters (g, e); words cyclically reduced, classes under rotation and inversion.
    letters = [(g, e) for g in range(2 * genus) for e in (1, -1)]
    seen = set()
    counts = []
    for n in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=n):
            ok = all(w[i][0] != w[(i + 1) % n][0] or w[i][1] == w[(i + 1) % n][1] for i in range(n))
            if n == 1:
                ok = True
            if not ok:
                continue
            inv = tuple((g, -e) for g, e in reversed(w))
            key = min(min(u[i:] + u[:i] for i in range(n)) for u in (w, inv))
            seen.add(key)
        counts.append(len(seen))
    return counts


def octagon_trace():
    # Regular octagon with interior angles pi/4: vertices at radius r in the disk.
    n = 8
    cosh_R = mp.cot(mp.pi / n) * mp.cot(mp.pi / n)  # circumradius: cosh R = cot(pi/n) cot(alpha/2)
    R = mp.acosh(cosh_R)
    rd = mp.tanh(R / 2)
    v = [rd * mp.expjpi(2 * mp.mpf(k) / n) for k in range(n)]

    def to_uhp(z):
        return 1j * (1 + z) / (1 - z)

    # Isometry taking side (v2, v3) onto side (v1, v0): the unique PSL2R element
    # sending one geodesic segment to the other with the same length.
    def frame(p, q):
        # Mobius sending i -> p with q on the upward ray from p.
        p, q = to_uhp(p), to_uhp(q)
        a = mp.matrix([[mp.sqrt(p.imag), p.real / mp.sqrt(p.imag)], [0, 1 / mp.sqrt(p.imag)]])
        ai = a ** -1
        w = (ai[0, 0] * q + ai[0, 1]) / (ai[1, 0] * q + ai[1, 1])
        z = (w - 1j) / (w + 1j)
        th = mp.arg(z) / 2 - mp.pi / 4
        c, s = mp.cos(th), mp.sin(th)
        return a * mp.matrix([[c, s], [-s, c]])

    m = frame(v[1], v[0]) * frame(v[2], v[3]) ** -1
    return abs(m[0, 0] + m[1, 1]), R


print("conjugacy classes g=2, max_len 1..4:", conjugacy_classes(2, 4))
print("conjugacy classes g=3, max_len 1..2:", conjugacy_classes(3, 2))
tr, R = octagon_trace()
print("octagon generator |trace|:", mp.nstr(tr, 20), " 2 + sqrt 2 =", mp.nstr(2 + mp.sqrt(2), 20))
print("octagon circumradius:", mp.nstr(R, 20))
print("generator translation length:", mp.nstr(2 * mp.acosh(tr / 2), 20))
for c in (0, 0.25, 1):
    print("wolf constant root c=%s:" % c, mp.nstr((1 + mp.sqrt(1 + 4 * mp.mpf(c))) / 2, 20))
print("genus-2 area 4 pi:", mp.nstr(4 * mp.pi, 20))
