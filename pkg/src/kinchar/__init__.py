"""Characteristic functions of probability measures, Fourier-side moment
bounds and a solver for the spatially homogeneous Boltzmann equation with
Maxwellian molecules."""

from .charfun import (CharFun, DomainError, QuadratureError, charfun_eval, delta_k,
                      delta_k_direct, diff_coeffs, dis_alpha_beta_eps, dis_k_alpha_beta,
                      norm_alpha, norm_Mk, norm_Mtilde)
from .measures import DiscreteMeasure, MeasureError, make_measure, membership, moment
from .quadrature import GridSpec, QuadSpec

__version__ = "0.1.0"

__all__ = [
    "CharFun", "DiscreteMeasure", "DomainError", "GridSpec", "MeasureError", "QuadSpec",
    "QuadratureError", "charfun_eval", "delta_k", "delta_k_direct", "diff_coeffs",
    "dis_alpha_beta_eps", "dis_k_alpha_beta", "make_measure", "membership", "moment",
    "norm_Mk", "norm_Mtilde", "norm_alpha",
]
