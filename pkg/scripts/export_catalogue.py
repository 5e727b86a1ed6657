from pathlib import Path

import pandas as pd

from lapgeo import generators
from lapgeo.utils.grid_io import write_grid_csv
from lapgeo.utils.reports import write_report

# === Config ===
output_dir = Path("data/catalogue")
listing_path = output_dir / "catalogue.json"
summary_path = output_dir / "catalogue_summary.csv"
# entries exported as grid CSVs at their default parameters and grids
entries = [
    "circle",
    "gamma_eps",
    "two_circle_diagonal",
    "ellipse",
    "sphere",
    "cylinder",
    "cornu_cylinder",
    "torus_revolution",
    "helicoid",
    "clifford_torus",
    "flat_torus_E6",
]

# === Listing ===
print("🚀 Export du catalogue...")
listing = generators.catalogue_listing()
write_report({"entries": listing}, listing_path)

df = pd.DataFrame(
    [{"name": e["name"], "n": e["n"], "m": e["m"], "family": e["family"], "shape": "x".join(map(str, e["shape"]))} for e in listing]
)
df.to_csv(summary_path, index=False, encoding="utf-8")
print(f"✅ {len(df)} entrées décrites : {summary_path}")

# === Grilles ===
for name in entries:
    try:
        S = generators.generate(name)
        write_grid_csv(S, output_dir / f"{name}.csv")
        print(f"📁 {name} : {S.grid.size} échantillons")
    except Exception as e:
        print(f"❌ {name} : {e}")

print("✅ Export terminé")
