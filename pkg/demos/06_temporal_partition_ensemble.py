#!/usr/bin/env python3
"""Temporal excitation partitioning, visualized through its gating.

Three partition reservoirs split a 300-step presentation: partition r is
driven only during steps [100r, 100(r+1)), while all partitions keep
evolving (and partition r inhibits r+1 through sparse negative links) for
the whole window.
"""

import numpy as np

from lsmkit import (
    ConnectionLaw,
    GridDims,
    InputSpec,
    NeuronParams,
    build_input,
    build_reservoir,
    build_tepre,
    equal_split_schedule,
    run_tepre,
)

params = NeuronParams()
dims = GridDims(5, 5, 8)  # three 200-neuron partitions

members = []
for i in range(3):
    topo = build_reservoir(dims, ConnectionLaw(), params, seed=1 + i)
    imap = build_input(
        InputSpec(n_inputs=64, input_weight=8.0, density=0.15), dims, seed=11 + i
    )
    members.append((topo, imap))

links = build_tepre([t for t, _ in members], inter_density=0.01,
                    inter_weight=-1.0, seed=21)
print("inter-partition inhibitory links:",
      ", ".join(f"{src.size} edges {r}->{r+1}" for r, (src, _, _) in enumerate(links)))

schedule = equal_split_schedule(300, 3)
print("gating schedule:", schedule.intervals)

rng = np.random.default_rng(3)
rates = rng.poisson(0.6, size=(300, 64)).astype(float)
records = run_tepre(rates, members, links, schedule, params,
                    record_raster=True, record_drive=True)

print()
print("injected input drive (L1 per step, averaged over each third):")
for r, rec in enumerate(records):
    thirds = [rec.drive_l1[k * 100 : (k + 1) * 100].mean() for k in range(3)]
    print(f"  partition {r}: " + "  ".join(f"{v:8.1f}" for v in thirds)
          + "   <- nonzero only in its own slab")

print()
print("spiking activity per third of the presentation (spikes):")
for r, rec in enumerate(records):
    thirds = [int(rec.raster[k * 100 : (k + 1) * 100].sum()) for k in range(3)]
    own = rec.slab_counts.sum()
    print(f"  partition {r}: {thirds}   own-slab total {own}")

print()
print("Each partition spikes essentially only while it is driven, so the")
print("concatenated count vector is a per-phase summary of the input; the")
print("sparse inhibition nudges successive partitions apart when their")
print("slabs would otherwise respond alike.")
