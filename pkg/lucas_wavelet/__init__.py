from lucas_wavelet import analysis
from lucas_wavelet import lucas_poly
from lucas_wavelet import op_matrices
from lucas_wavelet import tau_solver
from lucas_wavelet import wavelet_basis

__version__ = '0.1.0'

__all__ = ["analysis", "lucas_poly", "op_matrices", "tau_solver", "wavelet_basis"]
