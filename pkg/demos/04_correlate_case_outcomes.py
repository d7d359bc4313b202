"""Ask whether riding a high-level path goes together with case outcome.

Cases participating in a path (their low-level trace passes through the
path's activity chain while its episodes run) are compared against the
rest in a contingency table; Pearson's chi-square says whether the
split is plausibly chance, Benjamini-Hochberg keeps the family of tests
honest. The demo generator plants one burst whose cases fail more
often, so exactly that path should light up.
"""

from hlpaths import (
    AttributeBinning,
    RunConfig,
    bin_cases,
    demo_spec,
    derive_outcome,
    derive_throughput,
    generate_log,
    rank_paths,
    run_detect,
    run_link,
)

log, truth = generate_log(demo_spec(), seed=7)
config = RunConfig(window="1d", percentile=90, delay_percentile=70, lam=0.5,
                   success_activity=truth.spec.success_activity)

detect = run_detect(log, config)
link = run_link(detect.hles, config)
print(f"{len(detect.hles)} events, {len(link.episodes)} episodes, "
      f"{len(link.grouped)} paths")

# --- outcome: did the success marker ever occur ----------------------------
classes = derive_outcome(log, truth.spec.success_activity)
n_success = sum(1 for c in classes.values() if c == "success")
print(f"outcome: {n_success} success / {len(classes) - n_success} failure")

associations = rank_paths(log, link.grouped, classes)
tested = [a for a in associations if a.result is not None]
n_hits = sum(a.significant for a in tested)
print(f"\n{len(tested)} paths tested, {n_hits} significant after adjustment;"
      f" strongest:")
for assoc in sorted(tested, key=lambda a: a.result.statistic, reverse=True)[:10]:
    flag = "SIGNIFICANT" if assoc.significant else ""
    print(f"  {assoc.path.label():<55} chi2 {assoc.result.statistic:6.2f}"
          f"  p {assoc.result.p_value:8.2e}  q {assoc.q_value:8.2e} {flag}")

best = max(tested, key=lambda a: a.result.statistic)
print(f"\ncontingency table for {best.path.label()}:")
table = best.table
header = "".join(f"{c:>12}" for c in table.col_labels)
print(f"  {'':<18}{header}")
for label, row in zip(table.row_labels, table.counts):
    cells = "".join(f"{n:>12}" for n in row)
    print(f"  {label:<18}{cells}")

# --- throughput: same machinery, numeric attribute binned by quantiles -----
throughput = derive_throughput(log)  # seconds from first to last event
binning = AttributeBinning.by_quantiles(throughput.values(), k=3)
classes = bin_cases(throughput, binning)
print(f"\nthroughput bins: {binning.labels}")
tested = [a for a in rank_paths(log, link.grouped, classes,
                                class_order=binning.labels)
          if a.result is not None]
print(f"{len(tested)} paths tested, {sum(a.significant for a in tested)}"
      f" significant; strongest:")
for assoc in sorted(tested, key=lambda a: a.result.statistic, reverse=True)[:5]:
    flag = "SIGNIFICANT" if assoc.significant else ""
    print(f"  {assoc.path.label():<55} chi2 {assoc.result.statistic:6.2f}"
          f"  p {assoc.result.p_value:8.2e} {flag}")
