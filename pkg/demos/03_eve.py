"""What Eve sees: stego traffic against honest depolarizing noise."""
from perfectstego.channel import eve_report, residual_mass
from perfectstego.protocol import EncodingClass, ProtocolConfig, run_stream

p = 0.05
cfg = ProtocolConfig(p)

tr = run_stream(10**6, cfg, seed=0, decode=False)
rep = eve_report(tr, p, "operator")
print("TV", rep.tv, "p-value", rep.p_value)
print("channel mass Alice never emits (weight >= 3):", residual_mass(p))

# misuse: one single-qubit error in every block
bad = run_stream(10**5, cfg, seed=0, decode=False, force_class=EncodingClass.SINGLE)
rep = eve_report(bad, p, "syndrome")
print("single-error stream p-value", rep.p_value)

# the largest residuals show where it gives itself away
for label, r in sorted(zip(rep.labels, rep.residuals), key=lambda t: -abs(t[1]))[:3]:
    print(label, round(float(r), 1))
