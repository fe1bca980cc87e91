"""
Double category fibrations
Finite strict double categories, their fibrations, reflections and
straightening
"""

from .constants import __version__
__author__ = "dblcat-fibrations developers"

from .core_cat import FinCategory, FinFunctor, ValidationReport, chain, validate_category, validate_functor
from .dblcat import DoubleFunctor, FinDoubleCategory, MarkedDoubleCategory, boxtimes, grid, nerve_eval
from .fibr import FibrationCertificate, check_fibration
from .reflect import Reflection, reflect_dagger, reflect_perp, reflect_top, roundtrip_iso
from .bisimp import KERNELS, ZigZag, compare_kernels, get_kernel, psi_eval
from .groth import CatValuedFunctor, copresheaf_of, straighten_1, unstraighten_1
from .two_cat import (
    FinTwoCategory,
    TwoCatValuedFunctor,
    TwoFunctor,
    is_1cocartesian_fibration,
    straighten_2,
    unstraighten_2,
)
from .workbench import FibrationWorkbench

__all__ = [
    'FinCategory',
    'FinFunctor',
    'ValidationReport',
    'chain',
    'validate_category',
    'validate_functor',
    'DoubleFunctor',
    'FinDoubleCategory',
    'MarkedDoubleCategory',
    'boxtimes',
    'grid',
    'nerve_eval',
    'FibrationCertificate',
    'check_fibration',
    'Reflection',
    'reflect_perp',
    'reflect_top',
    'reflect_dagger',
    'roundtrip_iso',
    'KERNELS',
    'ZigZag',
    'compare_kernels',
    'get_kernel',
    'psi_eval',
    'CatValuedFunctor',
    'copresheaf_of',
    'straighten_1',
    'unstraighten_1',
    'FinTwoCategory',
    'TwoCatValuedFunctor',
    'TwoFunctor',
    'is_1cocartesian_fibration',
    'straighten_2',
    'unstraighten_2',
    'FibrationWorkbench',
]
