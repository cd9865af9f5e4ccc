"""A four-dimensional DGA whose minimal model has a nonzero m_3.

Generators a(1), x(2), u(3), z(4) with du = -x, a a = -x, a u = -z.
Homology is spanned by a and z; the product a a is a boundary, so the
triple Massey product <a, a, a> is defined and equals z up to sign.
"""

from hpt import transfer as tr
from hpt.exactlin import GradedComplex

A = GradedComplex.from_generators([("a", 1), ("x", 2), ("u", 3), ("z", 4)], {"u": [(-1, "x")]})
S = tr.AInfStructure.from_products(A, {("a", "a"): {"x": -1}, ("a", "u"): {"z": -1}})

res = tr.minimal_model(S, 4)
B = res.structure.carrier
print("homology basis:", [(k, B.degree(k)) for k in B.basis])
for n in (2, 3, 4):
    print(f"m_{n}:", res.structure.table(n))

c = res.job.contraction
w = tr.massey_witness(res, c)
print("m_3 outside the indeterminacy at", w["triple"], "->", w["m3"])
x, y, z = (c.g.image(k) for k in w["triple"])
print("direct Massey computation in A is nontrivial:", tr.massey_nontrivial(S, x, y, z))
print(res.validate())
