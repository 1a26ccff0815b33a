"""Recompute the curves for a list of levels and compare them with published models.

    python3 demos/table_sweep.py 23 29 31 63
"""

import sys

from modjac import pipeline

levels = [int(x) for x in sys.argv[1:]] or [23, 29, 31, 63, 65]
records = pipeline.cmd_find(levels, pipeline.PipelineConfig())
print(pipeline.format_table(records))
for r in records:
    print(f"{r.label:7} {r.status:9} published={r.known_label}  {r.timing:.1f}s")
