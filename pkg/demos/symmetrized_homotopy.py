"""The symmetrized homotopy on the free commutative algebra on a disc.

D(1,2): x in degree 2, y in degree 1, dx = y.  Its homology is zero, so
the symmetric algebra on it is acyclic in positive weight.  The averaged
homotopy contracts each weight; the classical tensor homotopy does not
descend to symmetric tensors.
"""

from hpt import schur, thick

print(schur.disc_decomposition_check(4))

c = schur.disc_contraction(1, 2)
hs = thick.symmetrize_homotopy(c, 3)
H = thick.classical_tensor_formulas(c, 2)[2]
print("symmetric h on A(x)A:", hs[2].cols)
print("classical h on A(x)A:", H.cols)
print("symmetric extension is a pseudo-derivation:", thick.check_pseudo_derivation(hs).passed)
