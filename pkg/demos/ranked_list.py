"""
Reading a ranked machine list
=============================

"""

from amdahl_limits.dataio import derive, format_scatter, parse_csv, sample_list_path, scatter_data

# the bundled list is synthetic: it only mimics the shape of a real ranking
records = parse_csv(sample_list_path())
print(len(records), "machines, rejected:", records.rejected)

for r in records[:5]:
    d = derive(r)
    print(f"{r.name:10s} {r.cores:>9} cores  E={d.e_hpl:.3f}  1-alpha={d.one_minus_alpha_hpl:.2e}")

# points for an efficiency-versus-cores plot, as tab-separated text
print(format_scatter(scatter_data(records)))
