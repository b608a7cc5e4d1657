#!/usr/bin/env python3
"""Reservoir topology under the distance-offset connection law.

Builds 10x10x10 reservoirs with offsets d = 0 and d = 5 and shows how the
offset moves the preferred connection length, which is the whole point of
the multi-length-scale ensemble: members wired at different d values see
the input through differently shaped recurrent circuits.
"""

import numpy as np

from lsmkit import ConnectionLaw, GridDims, NeuronParams, build_reservoir, save_topology

dims = GridDims(10, 10, 10)
params = NeuronParams()
coords = dims.coordinates().astype(float)

for d in (0.0, 5.0):
    law = ConnectionLaw(lam=2.0, d=d)
    topo = build_reservoir(dims, law, params, seed=42)
    dist = np.linalg.norm(coords[topo.src] - coords[topo.dst], axis=1)
    print(f"d = {d}: {topo.n_edges} edges, "
          f"{(topo.signs > 0).sum()} excitatory / {(topo.signs < 0).sum()} inhibitory neurons")
    hist, edges = np.histogram(dist, bins=np.arange(0.0, 12.0, 1.0))
    peak = hist.max()
    for lo, count in zip(edges, hist):
        bar = "#" * int(40 * count / peak) if peak else ""
        print(f"  D in [{lo:4.1f}, {lo + 1:4.1f})  {count:>7}  {bar}")
    print()

print("Exactly half the neurons are excitatory for every seed, outgoing")
print("weights carry the source neuron's sign, and the edge list is a pure")
print("function of (dims, law, seed):")
a = build_reservoir(dims, ConnectionLaw(), params, seed=7)
b = build_reservoir(dims, ConnectionLaw(), params, seed=7)
print("  rebuild with the same seed is identical:",
      np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst))

save_topology(a, "demo02_topology.txt")
print("exported the d=0 topology to demo02_topology.txt (text, one edge per line)")
