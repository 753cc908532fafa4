# A single matrix Phi: the spectral curve det(w - Phi) = 0 read off the dual curve.
import numpy as np

from spectralcover import characteristic_polynomial, exterior_trace, hitchin_check

rng = np.random.default_rng(3)
phi = rng.standard_normal((4, 4))

# det(w I - Phi), constant coefficient first.
char = characteristic_polynomial(phi)
print('det(w - Phi):', np.round(char.coefficients, 6))

# Its coefficients are the exterior traces: sum_m (-1)^m w^(4-m) Tr(wedge^m Phi).
traces = [exterior_trace(phi, m) for m in range(5)]
print('exterior traces:', np.round(traces, 6))
print('trace, det check:', np.isclose(traces[1], np.trace(phi)), np.isclose(traces[4], np.linalg.det(phi)))

# The dual curve det(y1 - y0 Phi) in the chart y0 = 1 is the same polynomial.
rep = hitchin_check(phi)
print('dual curve in the chart:', np.round(rep.dual_chart.coefficients, 6))
print('relative deviation:', rep.deviation)
