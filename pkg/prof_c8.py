import random, sys, time
from fractions import Fraction
from autoequiv.freealg import FreePoly, Word
from autoequiv.autgroup import TAU, Affine, Triangular, UniPoly, apply, compose
from autoequiv.decide import equiv_decide, verify_witness, format_certificate

WORDS3 = []
for d in range(0, 4):
    for bits in range(1 << d):
        WORDS3.append(Word.from_letters((bits >> i) & 1 for i in range(d)))


def rand_elem(rng):
    while True:
        n = rng.randint(1, 3)
        terms = {}
        for w in rng.sample(WORDS3, n):
            terms[w] = Fraction(rng.choice([-2, -1, 1, 2]))
        u = FreePoly(terms)
        if not u.is_zero() and u.max_degree() >= 1:
            return u


def rand_affine(rng):
    while True:
        a, b, c, d = (rng.randint(-2, 2) for _ in range(4))
        if a * d - b * c != 0:
            e, f = rng.randint(-1, 1), rng.randint(-1, 1)
            return Affine(a, c, e, b, d, f)


def rand_tri(rng):
    deg = rng.randint(1, 2)
    coeffs = [Fraction(rng.randint(-2, 2)) for _ in range(deg + 1)]
    coeffs[-1] = Fraction(rng.choice([-2, -1, 1, 2]))
    xi = rng.choice([-2, -1, 1, 2])
    eta = rng.choice([-2, -1, 1, 2])
    return Triangular(xi, UniPoly(coeffs), eta, rng.randint(-1, 1))


def rand_aut(rng):
    factors = []
    if rng.random() < 0.5:
        factors.append(rand_affine(rng))
    for k in range(rng.randint(1, 2)):
        factors.append(rand_tri(rng))
        if rng.random() < 0.4:
            factors.append(TAU)
        if rng.random() < 0.3:
            factors.append(rand_affine(rng))
    return compose(*factors)


def main(seed, count):
    rng = random.Random(seed)
    times = []
    for i in range(count):
        u = rand_elem(rng)
        phi = rand_aut(rng)
        v = apply(phi, u)
        t0 = time.time()
        cert = equiv_decide(u, v)
        dt = time.time() - t0
        times.append(dt)
        ok = cert.verdict == "EQUIVALENT" and cert.witness is not None and verify_witness(cert.witness, u, v)
        print("%2d %6.2fs %-10s witness_ok=%s  deg(u)=%d deg(v)=%d" % (
            i, dt, cert.verdict, ok, u.max_degree(), v.max_degree()), flush=True)
        if not ok:
            print("   u =", u, flush=True)
            print("   v =", v, flush=True)
            print("   phi =", phi, flush=True)
            print("   ", format_certificate(cert).replace("\n", "\n    "), flush=True)
    times.sort()
    print("median %.2fs  p90 %.2fs  max %.2fs" % (
        times[len(times) // 2], times[int(len(times) * 0.9) - 1], times[-1]), flush=True)


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 1, int(sys.argv[2]) if len(sys.argv) > 2 else 8)
