"""Monte Carlo reconciliation pipeline: Gaussian channel simulation,
multidimensional reconciliation, LDPC construction and decoding, FER
measurement."""

from .channel import QuadratureBlock, simulate_block
from .decode import bp_decode
from .degrees import DegreeDistribution, parse_degree_polynomials
from .matrix import ParityCheckMatrix, read_alist, write_alist
from .montecarlo import FerEstimate, measure_fer, wilson_interval
from .multidim import multidim_reconcile, rotation_matrices
from .peg import peg_construct

__all__ = [
    "QuadratureBlock",
    "simulate_block",
    "DegreeDistribution",
    "parse_degree_polynomials",
    "ParityCheckMatrix",
    "read_alist",
    "write_alist",
    "multidim_reconcile",
    "rotation_matrices",
    "peg_construct",
    "bp_decode",
    "measure_fer",
    "wilson_interval",
    "FerEstimate",
]
