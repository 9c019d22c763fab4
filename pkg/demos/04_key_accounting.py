"""How much shared key the scheme burns per transmitted qubit."""
from perfectstego.protocol import ProtocolConfig, run_stream
from perfectstego.rates import key_rate_asymptotic, key_rate_blockwise

p = 0.01
cfg = ProtocolConfig(p)

# blockwise: 3 bits pick the class, 8 more twirl the payload when there is one
tr = run_stream(10**5, cfg, seed=0)
print("blockwise", tr.key_bits_per_qubit, "closed form", key_rate_blockwise(p))

# stream: class choices share entropy across blocks
st = run_stream(10**6, cfg, seed=0, key_mode="stream", decode=False)
print("selection bits/qubit", st.selection_bits_per_qubit, "entropy limit", key_rate_asymptotic(p).as_printed)
print("twirl bits/qubit", st.twirl_bits_total / (5 * st.blocks))
