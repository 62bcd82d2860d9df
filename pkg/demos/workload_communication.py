"""
Communication per workload class
================================

"""

from amdahl_limits import comm

# a benchmark talks to each worker twice, an iterative solver does so every iteration
print("HPL, 1e6 workers:", comm.messages_hpl(10**6))
print("HPCG, 1e6 workers, 50 iterations:", comm.messages_hpcg(10**6, 50))

# a dense network sends m*m messages between hidden layers while computing only m nodes
for m in (250, 500, 1000):
    t = comm.AnnTopology(1, m, 2, 1)
    counts = comm.messages_ann(t)
    shared = comm.ann_profile(t, comm.BusModel("shared")).serialized_time
    print(f"m={m}: {counts.total} messages, {shared:.3g} s on a shared bus")

# brain simulation: every neuron waits for its fan-out in each grid period
b = comm.brain_profile()
print("efficiency ratio", b.efficiency_ratio, "implied gain", b.implied_gain)
better = comm.hierarchic_reduction(b, 100)
print("with hierarchic paths", better.implied_gain)

# gain rooflines of the classes
for cls in ("hpl", "hpcg", "ann", "brain"):
    print(f"{cls:6s} {comm.roofline_for_class(cls):.3g}")
