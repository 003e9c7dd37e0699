import random, time
from fractions import Fraction
from autoequiv.freealg import FreePoly, Word
from autoequiv.autgroup import TAU, Affine, Triangular, UniPoly, apply, compose
from autoequiv import decide as D
from autoequiv import groebner as G
from prof_c8 import rand_elem, rand_aut

rng = random.Random(1)
u = rand_elem(rng)
phi = rand_aut(rng)
v = apply(phi, u)
print("u =", u, flush=True)
print("v =", v, flush=True)
print("deg u =", u.max_degree(), " deg v =", v.max_degree(), flush=True)
print("phi =", phi, flush=True)

orig_build = D._build_equiv
def build(u_, v_, seq, guard):
    t0 = time.time()
    sysm = orig_build(u_, v_, seq, guard)
    print("  build %-34s %5.2fs eqs=%d vars=%d" % (
        seq.describe(), time.time() - t0, len(sysm[0].equations) if isinstance(sysm, tuple) else 0,
        len(sysm[0].variables) if isinstance(sysm, tuple) else 0), flush=True)
    return sysm
D._build_equiv = build

orig_solv = G.solvable
def solv(sysm, max_pairs=None, deadline=None):
    t0 = time.time()
    r = orig_solv(sysm, max_pairs, deadline)
    dt = time.time() - t0
    if dt > 0.5:
        print("    solvable -> %s  %5.2fs" % (r, dt), flush=True)
    return r
D.solvable = solv

t0 = time.time()
cert = D.equiv_decide(u, v)
print("verdict %s in %.2fs" % (cert.verdict, time.time() - t0), flush=True)
for line in cert.trace:
    print("TRACE:", line, flush=True)
