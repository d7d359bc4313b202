"""Generate a synthetic event log and poke around in it.

The generator builds a linear process (register -> check -> decide ->
notify), sprinkles a couple of planted anomalies on top and keeps a
ground-truth record of what it planted. Everything downstream of this
script works the same on a real log loaded with parse_csv / parse_xes.
"""

import io

from hlpaths import demo_spec, derive_steps, generate_log, parse_csv, write_csv

spec = demo_spec()
log, truth = generate_log(spec, seed=7)

print(f"cases:      {len(log.cases)}")
print(f"events:     {len(log.events)}")
print(f"activities: {', '.join(sorted({e.activity for e in log.events}))}")
print(f"span:       {log.min_time:%Y-%m-%d %H:%M} .. {log.max_time:%Y-%m-%d %H:%M}")

# what was planted, so we know what detection should find later
print("\nplanted anomalies:")
for inj in truth.injections:
    print(f"  {inj.ftype.value:>8}  {inj.segment.from_activity}>{inj.segment.to_activity}"
          f"  window {inj.theta}  {len(inj.cases)} extra cases")

# steps are directly-following event pairs; their (from, to) activity
# pair is the segment they belong to
steps, counts = derive_steps(log)
print(f"\nsteps: {len(steps)} over {len(counts)} segments")
for segment, n in counts.most_common():
    print(f"  {segment.from_activity:>10} > {segment.to_activity:<10} {n:5}")

one_case = sorted(log.cases)[0]
print(f"\ntrace of case {one_case}:")
for event in log.trace(one_case):
    print(f"  {event.time:%Y-%m-%d %H:%M}  {event.activity:<10} by {event.resource}")

# round-trips through the canonical CSV layout
buf = io.StringIO()
write_csv(log, buf)
buf.seek(0)
again = parse_csv(buf)
assert len(again.events) == len(log.events)
print(f"\nCSV round trip: {len(again.events)} events back, first line of the file:")
print("  " + buf.getvalue().splitlines()[0])
