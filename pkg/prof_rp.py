import sys, time
sys.setrecursionlimit(10000)
from fractions import Fraction
from autoequiv import groebner as G
from autoequiv.commalg import CommPoly
from autoequiv import decide as D

u = CommPoly.make(("x", "y"), {(2, 1): 1})
v = CommPoly.make(("x", "y"), {(2, 1): 1, (1, 3): 2, (0, 5): 1})

seqs = D.enumerate_sequences(3, 5, (False, False))
seq = next(iter(seqs))
print("seq:", seq.describe(), flush=True)
sysm, plan = D._build_comm_equiv(u, v, seq, 300000)
print("vars:", sysm.variables, flush=True)
print("eqs:", len(sysm.equations), flush=True)

orig_buch = G.buchberger
calls = [0]
def traced(eqs, order, max_pairs=None):
    calls[0] += 1
    t0 = time.time()
    try:
        return orig_buch(eqs, order, max_pairs)
    finally:
        dt = time.time() - t0
        if dt > 0.2:
            print("  buch #%d kind=%s nvars=%d neqs=%d %.2fs" % (
                calls[0], order.kind, len(order.variables), len(eqs), dt), flush=True)
G.buchberger = traced

orig_sp = G._search_point
depth = [0]
def sp(eqs, neq, variables, nodes, max_pairs):
    depth[0] += 1
    if nodes[0] % 25 == 0:
        print("node %d depth %d vars=%d" % (nodes[0], depth[0], len(variables)), flush=True)
    try:
        return orig_sp(eqs, neq, variables, nodes, max_pairs)
    finally:
        depth[0] -= 1
G._search_point = sp

t0 = time.time()
try:
    pt = G.rational_point(sysm, 60000)
    print("point:", None if pt is None else sorted(pt.items()), flush=True)
except Exception as e:
    print("raised:", type(e).__name__, e, flush=True)
print("total %.2fs, %d buchberger calls" % (time.time() - t0, calls[0]), flush=True)
