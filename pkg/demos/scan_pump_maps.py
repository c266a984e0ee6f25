"""Map the pump rate and ground-state shift over the first two Rabi frequencies.

Produces the CSV consumed by the heatmap figure script: a 2D scan of R and
delta_1 over (Omega13, Omega34) around the standard operating point, plus the
iso-line R = 1 Hz that separates usable from insufficient repumping.

Writes demos/out/pump_maps.csv (+ .json sidecar).
"""

import pathlib

from srlaser.contours import contour_level
from srlaser.scan import ScanAxis, ScanSpec, run_scan
from srlaser.sr88 import SixLevelConfig

out_dir = pathlib.Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

spec = ScanSpec(
    base=SixLevelConfig.standard(),
    axes=(ScanAxis("Omega13", 1e2, 1e4, 80, log=True),
          ScanAxis("Omega34", 3e5, 3e7, 80, log=True)),
    fields=("R", "delta1"),
)
print(f"Scanning {spec.shape[0]}x{spec.shape[1]} grid on 8 threads ...")
result = run_scan(spec, threads=8)
print(f"  {len(result.failures)} failed points")

csv_path = out_dir / "pump_maps.csv"
with open(csv_path, "w") as f:
    f.write("Omega13,Omega34,R,delta1\n")
    for row in result.rows():
        f.write(",".join("%.9g" % v for v in row) + "\n")
print(f"wrote {csv_path}")

lines = contour_level(result, "R", 1.0)
print(f"R = 1 Hz iso-line: {len(lines)} polyline(s), "
      f"{sum(len(p) for p in lines)} vertices")

good = (result.values["R"] > 1.0) & (abs(result.values["delta1"]) < 0.1)
print(f"{good.sum()} of {good.size} grid points give R > 1 Hz "
      "with |delta1| < 100 mHz")
