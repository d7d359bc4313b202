"""Chain detected events into episodes and group them into paths.

Two high-level events link when the second could plausibly be fallout
from the first: its segment continues or repeats the first one's, it
sits in the same or the next window, the two share enough cases
(Jaccard >= lambda) and its case spread nests inside the first one's.
Maximal chains of such links are episodes; stripping the window
coordinates leaves the high-level path the episode follows.
"""

from hlpaths import RunConfig, demo_spec, generate_log, run_detect, run_link

log, truth = generate_log(demo_spec(), seed=7)
config = RunConfig(window="1d", percentile=90, delay_percentile=70, lam=0.5)

detect = run_detect(log, config)
print(f"{len(detect.hles)} high-level events at p{config.percentile}")

link = run_link(detect.hles, config)

by_id = {h.id: h for h in detect.hles}
edges = [(i, j) for i, succ in sorted(link.graph.successors.items()) for j in succ]
print(f"propagation graph: {len(edges)} edges over {len(detect.hles)} events,"
      f" first few:")
for i, j in edges[:10]:
    a, b = by_id[i], by_id[j]
    shared = len(a.cases & b.cases)
    print(f"  #{i} {a.ftype.value}({a.segment.from_activity}>"
          f"{a.segment.to_activity})@{a.theta}"
          f" -> #{j} {b.ftype.value}({b.segment.from_activity}>"
          f"{b.segment.to_activity})@{b.theta}   {shared} shared cases")

print(f"\n{len(link.episodes)} episodes (maximal chains, lambda={config.lam});"
      f" the longest:")
for ep in sorted(link.episodes, key=len, reverse=True)[:8]:
    ids = " -> ".join(f"#{h.id}" for h in ep.hles)
    print(f"  {ids:<24} {ep.path.label():<60} common {len(ep.common_cases)}")

ranked = sorted(link.grouped.items(), key=lambda kv: (-len(kv[1]), kv[0].label()))
print(f"\n{len(link.grouped)} distinct paths, most frequent first:")
for path, episodes in ranked[:12]:
    print(f"  {len(episodes):3} x  {path.label()}")
if len(ranked) > 12:
    print(f"  ... and {len(ranked) - 12} more")
