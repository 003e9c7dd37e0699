import random, sys, time
from autoequiv.freealg import FreePoly
from autoequiv.autgroup import apply
from autoequiv import decide as D
from autoequiv import groebner as G
from prof_c8 import rand_elem, rand_aut

rng = random.Random(1)
u = rand_elem(rng)
phi = rand_aut(rng)
v = apply(phi, u)

want = sys.argv[1] if len(sys.argv) > 1 else "n=2 (3, 1, 1, 4) m=0 ends=tt flat"
seq = next(s for s in D._all_shapes(3, 4) if s.describe() == want)
sysm, plan = D._build_equiv(u, v, seq, 300000)
print("seq:", seq.describe(), " eqs=%d vars=%d" % (len(sysm.equations), len(sysm.variables)), flush=True)

eqs, neq, variables, _ = G._presolve(list(sysm.equations), sysm.inequation, list(sysm.variables))
print("after presolve: eqs=%d vars=%d" % (len(eqs), len(variables)), flush=True)
rows = G._interreduce_rows(eqs)
print("after rows: eqs=%d  degs=%s" % (len(rows), sorted(set(e.total_degree() for e in rows))), flush=True)

t0 = time.time()
pt = G.search_point(sysm, 4000, max_nodes=80)
print("quick search: %s  %.2fs" % ("point" if pt else None, time.time() - t0), flush=True)

t0 = time.time()
orig = G.buchberger_internal
stats = [0]
def traced(gens, order, max_pairs=None):
    t1 = time.time()
    try:
        return orig(gens, order, max_pairs)
    finally:
        stats[0] += 1
        dt = time.time() - t1
        if dt > 1.0:
            print("  buch #%d kind=%s nvars=%d ngens=%d %.1fs" % (stats[0], order.kind, len(order.variables), len(gens), dt), flush=True)
G.buchberger_internal = traced
try:
    r = G.solvable(sysm, 60000)
    print("solvable -> %s  %.2fs" % (r, time.time() - t0), flush=True)
except G.BudgetExceeded as e:
    print("solvable raised BudgetExceeded (%s)  %.2fs" % (e, time.time() - t0), flush=True)
