"""Reservoir ensembles: spatial (multi-length-scale) and temporal (gated).

A multi-length-scale ensemble runs one independently wired reservoir per
distance offset d; every member sees the identical input frames through
its own receptive-field map, and their spike records are concatenated for
the readout.

A temporally partitioned ensemble splits the presentation window into
contiguous slabs, one per partition reservoir.  Each partition receives
input drive only inside its own slab, while its recurrent dynamics (and
sparse inhibitory couplings from the previous partition) run for the full
presentation.  The inter-partition inhibition decorrelates successive
partitions' outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ConfigError
from .inputs import InputMap
from .neurons import NeuronParams, PopulationState, lif_step
from .topology import GridDims, ReservoirTopology


@dataclass(frozen=True)
class MuLRESpec:
    """Spatial ensemble: one member per distance offset."""

    d_list: tuple[float, ...]
    member_dims: GridDims

    def __post_init__(self):
        if not self.d_list:
            raise ConfigError("d_list must be nonempty")

    @property
    def n_members(self) -> int:
        return len(self.d_list)


@dataclass(frozen=True)
class TEPRESpec:
    """Temporal ensemble: equal slabs of the presentation, one partition each."""

    partitions: int
    member_dims: GridDims
    inter_density: float = 0.01
    inter_weight: float = -1.0

    def __post_init__(self):
        if self.partitions < 1:
            raise ConfigError("need at least one partition")
        if not 0 <= self.inter_density <= 1:
            raise ConfigError("inter_density must lie in [0, 1]")
        if self.inter_weight >= 0:
            raise ConfigError("inter-partition connections are inhibitory; weight < 0")

    @property
    def n_members(self) -> int:
        return self.partitions


@dataclass(frozen=True)
class GatingSchedule:
    """Half-open per-partition intervals tiling [0, T)."""

    intervals: tuple[tuple[int, int], ...]
    steps: int

    def __post_init__(self):
        cursor = 0
        for start, end in self.intervals:
            if start != cursor or end <= start:
                raise ConfigError(
                    f"intervals must tile [0, {self.steps}) contiguously"
                )
            cursor = end
        if cursor != self.steps:
            raise ConfigError(f"intervals end at {cursor}, expected {self.steps}")

    @property
    def n_partitions(self) -> int:
        return len(self.intervals)

    def member_of_step(self) -> np.ndarray:
        """(T,) partition index owning each timestep."""
        owner = np.empty(self.steps, dtype=np.int64)
        for r, (start, end) in enumerate(self.intervals):
            owner[start:end] = r
        return owner


def equal_split_schedule(steps: int, partitions: int) -> GatingSchedule:
    """Balanced tiling; interval lengths differ by at most one."""
    if steps < partitions:
        raise ConfigError(f"cannot split {steps} steps into {partitions} slabs")
    bounds = [(r * steps) // partitions for r in range(partitions + 1)]
    intervals = tuple(
        (bounds[r], bounds[r + 1]) for r in range(partitions)
    )
    return GatingSchedule(intervals=intervals, steps=steps)


@dataclass
class SpikeRecord:
    """Per-member simulation output used for state extraction."""

    counts: np.ndarray  # (N,) full-window spike counts
    steps: int
    slab_counts: np.ndarray | None = None  # counts inside the member's own slab
    raster: np.ndarray | None = None  # (T, N) uint8
    drive_l1: np.ndarray | None = None  # (T,) L1 norm of injected input drive

    @property
    def size(self) -> int:
        return self.counts.shape[0]

    def mean_rate(self) -> float:
        """Mean spikes per neuron per step."""
        if self.steps == 0:
            return 0.0
        return float(self.counts.sum()) / (self.size * self.steps)


def drive_through_map(rates: np.ndarray, imap: InputMap, scale: float = 1.0) -> np.ndarray:
    """(T, N) reservoir drive from (T, n_inputs) input rates."""
    rates = np.asarray(rates, dtype=np.float64)
    if rates.ndim != 2 or rates.shape[1] != imap.n_inputs:
        raise ConfigError(
            f"rates shape {rates.shape} does not match {imap.n_inputs} inputs"
        )
    drive = imap.matrix().dot(rates.T).T
    if scale != 1.0:
        drive = drive * scale
    return np.ascontiguousarray(drive)


def simulate_population(
    weights: sparse.spmatrix | None,
    drive: np.ndarray,
    params: NeuronParams,
    *,
    slab: tuple[int, int] | None = None,
    record_raster: bool = False,
    record_drive: bool = False,
) -> SpikeRecord:
    """Run one reservoir for T steps from a zero state.

    ``drive`` is the (T, N) pre-weighted injected current.  ``slab``
    additionally accumulates spike counts inside its interval.
    """
    steps, n = drive.shape
    state = PopulationState.zeros(n)
    counts = np.zeros(n, dtype=np.int64)
    slab_counts = np.zeros(n, dtype=np.int64) if slab is not None else None
    raster = np.zeros((steps, n), dtype=np.uint8) if record_raster else None
    drive_l1 = np.zeros(steps) if record_drive else None
    for t in range(steps):
        state = lif_step(state, drive[t], weights, params)
        counts += state.spikes
        if slab is not None and slab[0] <= t < slab[1]:
            slab_counts += state.spikes
        if raster is not None:
            raster[t] = state.spikes
        if drive_l1 is not None:
            drive_l1[t] = np.abs(drive[t]).sum()
    return SpikeRecord(
        counts=counts,
        steps=steps,
        slab_counts=slab_counts,
        raster=raster,
        drive_l1=drive_l1,
    )


def run_mulre(
    rates: np.ndarray,
    members: list[tuple[ReservoirTopology, InputMap]],
    params: NeuronParams,
    *,
    input_scale: float = 1.0,
    record_raster: bool = False,
) -> list[SpikeRecord]:
    """Simulate every ensemble member independently on the same input.

    ``rates`` is the (T, n_inputs) frame-derived drive shared by all
    members; each member maps it through its own input wiring.  Members
    never interact, so zeroing one member's input silences only it.
    """
    records = []
    for topo, imap in members:
        if imap.n_reservoir != topo.size:
            raise ConfigError("input map and topology sizes disagree")
        drive = drive_through_map(rates, imap, input_scale)
        records.append(
            simulate_population(
                topo.weight_matrix(), drive, params, record_raster=record_raster
            )
        )
    return records


def build_tepre(
    members: list[ReservoirTopology],
    inter_density: float,
    inter_weight: float,
    seed: int,
) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Sample sparse inhibitory couplings between successive partitions.

    Returns one (src, dst, weight) triple per adjacent pair r -> r+1.
    Sources are the inhibitory neurons of partition r; every
    (source, target) candidate is an independent Bernoulli(inter_density)
    draw.  The couplings push successive partitions away from producing
    the same or highly correlated output.
    """
    if inter_weight >= 0:
        raise ConfigError("inter-partition connections are inhibitory; weight < 0")
    if not 0 <= inter_density <= 1:
        raise ConfigError("inter_density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    links = []
    for r in range(len(members) - 1):
        sources = members[r].inhibitory_indices()
        n_next = members[r + 1].size
        if inter_density == 0 or sources.size == 0:
            links.append(
                (
                    np.empty(0, dtype=np.int64),
                    np.empty(0, dtype=np.int64),
                    np.empty(0, dtype=np.float64),
                )
            )
            continue
        hits = rng.random((sources.size, n_next)) < inter_density
        si, di = np.nonzero(hits)
        links.append(
            (
                sources[si].astype(np.int64),
                di.astype(np.int64),
                np.full(si.shape[0], inter_weight, dtype=np.float64),
            )
        )
    return links


def _link_matrix(
    link: tuple[np.ndarray, np.ndarray, np.ndarray], n_dst: int, n_src: int
) -> sparse.csr_matrix | None:
    src, dst, weight = link
    if src.size == 0:
        return None
    return sparse.csr_matrix((weight, (dst, src)), shape=(n_dst, n_src))


def run_tepre(
    rates: np.ndarray,
    members: list[tuple[ReservoirTopology, InputMap]],
    inter_links: list[tuple[np.ndarray, np.ndarray, np.ndarray]],
    schedule: GatingSchedule,
    params: NeuronParams,
    *,
    input_scale: float = 1.0,
    record_raster: bool = False,
    record_drive: bool = False,
) -> list[SpikeRecord]:
    """Lockstep simulation of all partitions with gated input injection.

    At step t the input drive goes only into the partition whose interval
    contains t; every partition's recurrent dynamics run for all T steps
    and spikes cross the inter-partition links with the standard one-step
    delay.  With no inter links the per-partition records are bit-identical
    to independent runs on the gated drive.
    """
    n_parts = len(members)
    if schedule.n_partitions != n_parts:
        raise ConfigError(
            f"schedule has {schedule.n_partitions} slabs for {n_parts} partitions"
        )
    if len(inter_links) != max(n_parts - 1, 0):
        raise ConfigError("need one inter-link entry per adjacent partition pair")
    steps = schedule.steps
    if rates.shape[0] < steps:
        raise ConfigError(
            f"{rates.shape[0]} input steps cannot fill a {steps}-step schedule"
        )

    drives = []
    for r, (topo, imap) in enumerate(members):
        if imap.n_reservoir != topo.size:
            raise ConfigError("input map and topology sizes disagree")
        gated = np.zeros((steps, topo.size))
        start, end = schedule.intervals[r]
        full = drive_through_map(rates[:steps], imap, input_scale)
        gated[start:end] = full[start:end]
        drives.append(gated)

    weight_mats = [topo.weight_matrix() for topo, _ in members]
    link_mats = [
        _link_matrix(link, members[r + 1][0].size, members[r][0].size)
        for r, link in enumerate(inter_links)
    ]

    states = [PopulationState.zeros(topo.size) for topo, _ in members]
    counts = [np.zeros(topo.size, dtype=np.int64) for topo, _ in members]
    slab_counts = [np.zeros(topo.size, dtype=np.int64) for topo, _ in members]
    rasters = (
        [np.zeros((steps, topo.size), dtype=np.uint8) for topo, _ in members]
        if record_raster
        else None
    )
    drive_l1 = [np.zeros(steps) for _ in members] if record_drive else None

    for t in range(steps):
        prev_spikes = [s.spikes for s in states]
        new_states = []
        for r in range(n_parts):
            injected = drives[r][t]
            if r > 0 and link_mats[r - 1] is not None and prev_spikes[r - 1].any():
                crossing = link_mats[r - 1].dot(
                    prev_spikes[r - 1].astype(np.float64)
                )
                injected = injected + crossing
            new_states.append(lif_step(states[r], injected, weight_mats[r], params))
        states = new_states
        for r in range(n_parts):
            counts[r] += states[r].spikes
            start, end = schedule.intervals[r]
            if start <= t < end:
                slab_counts[r] += states[r].spikes
            if rasters is not None:
                rasters[r][t] = states[r].spikes
            if drive_l1 is not None:
                drive_l1[r][t] = np.abs(drives[r][t]).sum()

    return [
        SpikeRecord(
            counts=counts[r],
            steps=steps,
            slab_counts=slab_counts[r],
            raster=rasters[r] if rasters is not None else None,
            drive_l1=drive_l1[r] if drive_l1 is not None else None,
        )
        for r in range(n_parts)
    ]
