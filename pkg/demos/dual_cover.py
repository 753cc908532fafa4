# Commuting matrices, their joint spectrum, and the dual of the pencil hypersurface.
import numpy as np

from spectralcover import HiggsTuple, joint_spectrum, pencil_determinant, verify_dual_cover
from spectralcover.duality import linear_factorization

# Build a commuting pair by conjugating two diagonal matrices with the same g.
rng = np.random.default_rng(0)
w = np.array([[1.0, 3.0], [2.0, 4.0], [-1.0, 0.5]])
g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
gi = np.linalg.inv(g)
h = HiggsTuple([g @ np.diag(w[:, j]) @ gi for j in range(2)])
print('commutator (normalized):', h.certificate.max_commutator)

# Joint eigenvalues come out of one Schur basis shared by both matrices.
spec = joint_spectrum(h)
for p in spec.points:
    print('joint eigenvalue', np.round(p.w, 10), 'multiplicity', p.multiplicity)

# det(x0 I + x1 Phi1 + x2 Phi2) is a cubic in three variables ...
f = pencil_determinant(h)
print('pencil determinant:', f)

# ... and it splits into the planes x0 + w1 x1 + w2 x2 = 0, one per joint eigenvalue.
planes, product = linear_factorization(spec)
err = np.max(np.abs(product.coefficient_vector() - f.coefficient_vector()))
print('factorization error:', err)

# Gauss images of smooth points land on the dual points [1 : w1 : w2].
rep = verify_dual_cover(h, samples=200, seed=1)
print('matched', rep.matched, 'of', rep.samples_used, 'samples; hits per point', rep.spectrum_hit_counts)
print('worst chart distance', rep.max_match_distance, '->', rep.verdict)

# A nilpotent pair has F = x0^2: every point of the surface is singular.
nil = HiggsTuple([[[0, 1], [0, 0]], [[0, 5], [0, 0]]])
rep = verify_dual_cover(nil, samples=50)
print('nilpotent pair:', pencil_determinant(nil), '| everywhere singular:',
      rep.everywhere_singular, '| verdict:', rep.verdict)
