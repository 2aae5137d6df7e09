"""
How rich must the excitation be?
================================

Persistence of excitation of order L is a rank condition on a matrix built
from the spectrum.  An odd-bin multisine on 20 bins excites 10 frequencies,
which supports orders up to 20 for the input alone.  Adding the phasor
channel that absorbs the leakage doubles the row count, and the 39 real
degrees of freedom of a 20-bin spectrum then cap the order at 19.
"""

from fdwfl import ExperimentConfig, check_pe, make_grid, phasor_spectrum, stack_spectra
from fdwfl.bench import input_spectrum

grid = make_grid(20)
U = input_spectrum(ExperimentConfig())

for L in (5, 10, 20, 21):
    print(f"U alone, order {L:>2}: {check_pe(U, L).is_pe}")

V = stack_spectra(U, phasor_spectrum(grid))
for L in (5, 10, 19, 20):
    rep = check_pe(V, L)
    print(f"(U, phasor), order {L:>2}: rank {rep.rank}/{rep.required_rank}, PE={rep.is_pe}")
