"""
Hot and cold storage
====================

Clusters inside the beacon triangle are reached precisely; clusters pushed
outside it are found less reliably. Frequently used content belongs inside,
archival content outside.
"""

from dnaarchive.agent import MotilityParams
from dnaarchive.archive import default_layout, distribute_by_priority
from dnaarchive.engine import LayoutParams, SimConfig, run_retrieval

layout = default_layout("two-outside")
for c in layout.clusters:
    print(f"cluster {c.id} at ({c.centre[0]:+.3f}, {c.centre[1]:+.4f}) "
          f"{'inside ' if layout.in_hull(c) else 'outside'} priority={c.priority.value}")

# files are routed by priority, first fit; here every cluster has room for one
chunks = [("report.pdf", "high"), ("backup-2019.tar", "low"), ("notes.txt", "high")]
room = {c.id: 1 for c in layout.clusters}
print(dict(zip([name for name, _ in chunks], distribute_by_priority(chunks, layout.clusters, room))))

###############################################################################
# Same retrieval with both layouts. With enough time every cluster is still
# emptied, but far fewer retrievers find the outside clusters

for mode in ("all-inside", "two-outside"):
    cfg = SimConfig(layout=LayoutParams(mode=mode), n_retrievers_per_cluster=60,
                    motility=MotilityParams(D=17.0))
    rec = run_retrieval(cfg)
    print(f"{mode:11s} done at {rec.completion_time_s:.0f} s, "
          f"conjugations per cluster {rec.per_cluster_conjugations}")
