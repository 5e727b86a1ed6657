from dataclasses import asdict
from pathlib import Path

import pandas as pd

from lapgeo.config import build_run_config, resolve_workers
from lapgeo.theorems import run_theorem_table
from lapgeo.utils.log import configure_logging

# === Config ===
table_path = None  # None = the table shipped in lapgeo/data
output_path = Path("data/theorem_outcomes.csv")
fd_order = 4
workers = None  # None = LAPGEO_WORKERS or 1
only = []  # row names, empty = every row

# === Exécution ===
configure_logging()
print("🚀 Vérification de la table des théorèmes...")
run = build_run_config(subcommand="theorems", fd_order=fd_order, workers=resolve_workers(workers))
outcomes = run_theorem_table(table_path, run, names=only or None)

df = pd.DataFrame([asdict(o) for o in outcomes])
df["constants"] = df["constants"].astype(str)
output_path.parent.mkdir(parents=True, exist_ok=True)
df.to_csv(output_path, index=False, encoding="utf-8")
print(f"📁 Résultats sauvegardés : {output_path}")

failed = df[~df["passed"]]
if failed.empty:
    print(f"✅ {len(df)} vérifications conformes")
else:
    print(f"❌ {len(failed)} / {len(df)} vérifications en échec :")
    print(failed[["theorem", "check", "expected", "observed"]].to_string(index=False))
