"""L-infinity transfer on a random DGL: brackets, then a nonzero l_3."""

from hpt import transfer as tr

L = tr.random_dgl(0)
print("DGL carrier:", [(k, L.carrier.degree(k)) for k in L.carrier.basis])
print("l_2:", L.table(2))
res = tr.minimal_model(L, 3)
print("homology:", list(res.structure.carrier.basis))
for n in (2, 3):
    print(f"transferred l_{n}:", res.structure.table(n))
print(tr.verify_structure(res.structure, 3))
