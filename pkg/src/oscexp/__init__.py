"""Quadratic-phase oscillatory integrals and their summability exponents.

Modules:
    symlin          packed symmetric matrices, Jacobi eigensolver, determinant helpers
    closedform      the Gaussian-regularised integral in closed form
    oscquad         adaptive cubature for T(A, b) over boxes and simplices
    asymptotics     lower-bound parameter regions, stationary phase, tail scans
    spectralmeasure eigenvalue-side integrals and the Weyl pushforward check
    fourierdecay    indicator-function Fourier transforms and L^q estimates
    experiments     verification runners used by the command line
    cli             the ``oscexp`` command
"""

__version__ = "0.1.0"
