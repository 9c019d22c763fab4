"""Rate curves over the usual p grid."""
from perfectstego.rates import default_grid, n_avg, r_enc, r_typ, shannon_entropy_rate

print(f"{'p':>6} {'n_avg/5':>9} {'r_enc':>9} {'r_typ':>9} {'H/5':>9}")
for p in default_grid()[::9]:
    print(f"{p:6.3f} {n_avg(p) / 5:9.5f} {r_enc(p):9.5f} {r_typ(p):9.5f} {shannon_entropy_rate(p) / 5:9.5f}")

# where the block scheme overtakes the window encoding
cross = next(p for p in default_grid() if n_avg(p) / 5 >= r_enc(p))
print("n_avg/5 >= r_enc from p =", cross)
