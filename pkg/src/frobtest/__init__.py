"""Frobenius closure, Frobenius test exponents and HSL numbers over F_p.

Quick start::

    >>> from frobtest import builtin_ring, frobenius_test_exponent
    >>> R = builtin_ring("fermat2")
    >>> frobenius_test_exponent(R.ideal("x,y"), R).describe()
    '1 [CERTIFIED]'
"""

from .algebra import MonomialOrder, Polynomial, PolynomialRing, parse_polynomial
from .certificates import DEFAULT_CAPS, Caps, CertifiedValue, Status
from .cohomology import (
    CohomologyModule,
    FrobeniusMapData,
    HSLReport,
    h0_module,
    hsl_local_cohomology,
    hsl_relative_h0,
    hsl_ring,
    hsl_top,
    koszul_cohomology,
    limit_closure,
    relative_frobenius_h0,
    stable_cohomology,
)
from .errors import FrobtestError
from .frobenius import (
    ClosureResult,
    frobenius_closure,
    frobenius_power,
    frobenius_root,
    frobenius_test_exponent,
)
from .groebner import (
    GroebnerBasis,
    Ideal,
    colon_ideal,
    dimension,
    groebner_basis,
    intersect,
    length_artinian,
    normal_form,
    saturate,
    standard_monomials,
)
from .harness import cmd_batch, cmd_verify_bound, cmd_verify_properties
from .parameters import (
    ParameterSequence,
    is_filter_regular,
    is_system_of_parameters,
    make_filter_regular,
    sample_parameter_ideals,
    standardness_probe,
)
from .rings import PresentedRing, builtin_ring, load_ring

__version__ = "0.1.0"
