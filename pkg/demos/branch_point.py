# The family Phi(z) = [[0, 1], [z, 0]]: two sheets w = +-sqrt(z) meeting over z = 0.
import numpy as np

from spectralcover import ChartFamily, detect_ramification, parse_grid, sweep_grid
from spectralcover.cover import track_sheets

# Entries are polynomials in z, written as {exponents: coefficient}.
fam = ChartFamily(2, 1, [[[{}, {(0,): 1.0}], [{(1,): 1.0}, {}]]], label='z')

# 101 real points on [-1, 1]: center 0, radius 1.
grid = parse_grid('0,1,101')
rep = detect_ramification(fam, grid)
print('flagged grid points:', [(i, z[0]) for i, z, _ in rep.flagged])
print('smallest normalized discriminants:', np.sort(rep.values)[:3])

# Away from the branch point each fiber holds +-sqrt(z).
slices = sweep_grid(fam, grid)
for s in slices[::25]:
    print('z =', s.z[0].real, ' sheets =', np.round(s.spectrum.as_array().ravel(), 6))

# Follow the two sheets along z in [1, 4] by optimal matching between neighbours.
sheets = track_sheets(sweep_grid(fam, parse_grid('2.5,1.5,7')))
print('tracked sheet values:')
print(np.round(sheets[:, :, 0], 6))
