"""The perfect code, its syndrome table, and the syndrome-swap encodings."""
from perfectstego.code import build_perfect_code, syndrome_of
from perfectstego.pauli import PauliOperator
from perfectstego.protocol import default_setup
from perfectstego.verification import verify_all

code = build_perfect_code()
for g in code.generators:
    print("generator", g)

# every single-qubit error gets its own syndrome
for q in range(5):
    for letter in "XYZ":
        e = PauliOperator.single(5, q, letter)
        print(e, syndrome_of(code, e))

# the encoder and the seven tables it induces (one single-error, six double-error)
_, encoder, circuit, tables = default_setup()
print(len(circuit), "gates in the encoding circuit")
for table in tables:
    print(table.name, len(table), "rows")

# a row: payload index -> ancilla operator (x) cover operator -> transmitted error
for row in tables[1]:
    print(row.ancilla_index, row.ancilla_op, row.cover_op, row.encoded_error, row.syndrome)

for report in verify_all():
    print(report.summary())
