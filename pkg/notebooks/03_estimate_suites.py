# %% [markdown]
# # Estimate suites
#
# Explicit-constant estimates are checked directly; estimates with
# unknown constants are monitored: the worst ratio over an ensemble must
# be finite, stable under grid doubling and, for the `L_p` estimate,
# roughly independent of `lambda`.

# %%
from nonlocal_lp.verify import SUITES

quick = {"resolvent-bound": {"trials": 10}, "L2": {"trials": 10}, "positivity": {"trials": 6},
         "Lp": {"trials": 6}, "holder": {"trials": 6}, "sharp-oscillation": {"trials": 6},
         "operator-continuity": {"trials": 6}}

for name, kw in quick.items():
    rep = SUITES[name](**kw)
    ref = rep.refinement
    extra = f"  refinement x{ref['factor']:.3f}" if ref else ""
    print(f"{name:20s} {rep.verdict:5s} worst ratio {rep.worst_ratio:.4g}{extra}")

# %% [markdown]
# The per-trial records are available for plotting, e.g. the `L_p`
# monitored constant against `lambda`.

# %%
rep = SUITES["Lp"](trials=6, refine=False)
header, rows = rep.csv_rows()
print(header)
for row in rows[:8]:
    print(row)
print("per-lambda worst:", rep.constants.get("per_lambda"))
