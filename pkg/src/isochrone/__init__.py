"""Isochrone radial potentials: classification, orbits, closed forms and bolsts."""
from ._backend import BACKEND
from .bolst import (Bolst, Ibolst, KeplerEllipse, back_to_kepler, ibolst_potential_image,
                    map_kepler_orbit, momentum_map)
from .closed_forms import (integral_I1, integral_I2, isochrone_sma, kepler3_check,
                           n_phi_analytic, radial_action_analytic, tau_r_analytic)
from .errors import InputError, IsochroneError, NumericalError
from .geometry import (ClassificationResult, CurveKind, HenonCurve, Parabola, check_property_P,
                       reduce, rotate, to_henon_curve)
from .orbits import (find_apsides, integrate_orbit, isochrony_test, orbit_integrals,
                     rosette_stats)
from .potentials import (CustomPotential, Family, PotentialSpec, bounded, finite_harmonic,
                         harmonic, henon, kepler, parse_potential)

__version__ = "0.1.0"
