#!/usr/bin/env python3
"""A single LIF neuron step by step.

Drives one neuron with a constant synaptic current and watches the
membrane charge toward threshold, spike, and reset subtractively.
"""

import numpy as np

from lsmkit import NeuronParams, PopulationState, lif_step

params = NeuronParams(tau_v=16, tau_u=16, theta=20)
print(f"tau_v={params.tau_v}  tau_u={params.tau_u}  theta={params.theta}")
print()
print("Holding the synaptic current at u=2 (drive 2*tau_u on the first step")
print("charges the trace, then 2 per step keeps it there):")
print()

state = PopulationState.zeros(1)
print(f"{'step':>4}  {'u':>7}  {'v':>8}  spike")
for t in range(1, 41):
    drive = 2.0 * params.tau_u if t == 1 else 2.0
    state = lif_step(state, np.array([drive]), None, params)
    marker = "  <-- spike, v reset by -theta" if state.spikes[0] else ""
    if t <= 18 or state.spikes[0]:
        print(f"{t:>4}  {state.u[0]:>7.3f}  {state.v[0]:>8.4f}  {int(state.spikes[0])}{marker}")

print()
print("The membrane follows v(t) = 32 (1 - (15/16)^t) and first crosses")
print("theta=20 at step 16; the reset subtracts theta instead of zeroing v,")
print("so the overshoot carries into the next charging cycle.")
print()

# pure decay: no input at all
state = PopulationState(np.array([10.0]), np.array([0.0]))
trajectory = [10.0]
for _ in range(5):
    state = lif_step(state, np.zeros(1), None, params)
    trajectory.append(float(state.v[0]))
print("Zero-input decay from v=10:", " ".join(f"{v:.4f}" for v in trajectory))
print("which is exactly 10 * (15/16)^t.")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    state = PopulationState.zeros(1)
    vs, spikes = [], []
    for t in range(1, 120):
        drive = 2.0 * params.tau_u if t == 1 else 2.0
        state = lif_step(state, np.array([drive]), None, params)
        vs.append(float(state.v[0]))
        if state.spikes[0]:
            spikes.append(t)
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(range(1, 120), vs, lw=1.2)
    ax.axhline(params.theta, color="red", ls="--", lw=0.8, label="theta")
    for s in spikes:
        ax.axvline(s, color="gray", lw=0.5, alpha=0.5)
    ax.set_xlabel("step")
    ax.set_ylabel("membrane potential")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo01_lif_membrane.png", dpi=120)
    print("\nsaved demo01_lif_membrane.png")
except ImportError:
    pass
