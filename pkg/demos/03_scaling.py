"""How the state class graph grows with the number of suppliers.

Each extra supplier multiplies the number of interleavings of inspection,
production and delivery, so the class count grows by a factor of 30 to 60
per added supplier.
"""
import time

import numpy as np

from ptpn import build_scg
from ptpn.benchmark import ChainConfig, build_model

rows = []
for n in (1, 2, 3):
    t0 = time.perf_counter()
    g = build_scg(build_model(ChainConfig(n, 1, 6)))
    s = g.stats()
    rows.append([s["classes"], s["markings"], s["domains"], s["edges"]])
    print(f"{n} supplier(s): {s}  {time.perf_counter() - t0:.2f}s")

# %% Growth factor between consecutive supplier counts.
a = np.array(rows, dtype=float)
print("growth:", np.round(a[1:] / a[:-1], 1))

# %% Bounded exploration: a class limit returns a partial graph instead of
# running to completion, which is how the 4-supplier case can be sampled.
g = build_scg(build_model(ChainConfig(4, 1, 6)), max_classes=20000)
print("4 suppliers, partial:", g.partial, g.stop_reason, g.stats())
