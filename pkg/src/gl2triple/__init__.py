"""Exact verification of invariant trilinear forms on GL2(Qp) principal
series at finite level: coset models, new vectors, the open-orbit extension,
the torus functional, and the test-vector theorems, with every vanishing
step certified by a computed eigenspace dimension."""

from .characters import (BorelCharacter, FiniteCharacter, QuasiCharacter,
                         UnitGroup, central_check, make_principal_series)
from .exact_sequence import (OrbitFunction, PhiFunctional, TensorVector,
                             TrilinearEvaluator, V3PrincipalSeries,
                             V3SteinbergDual, build_f, detect_simple_case,
                             ext_bruteforce, ext_closed, integral_If, res_diag)
from .padic import (Mat2, PadicContext, PrecisionError, TOP, ValuedElement,
                    coset_reps, if_points, iwasawa, stratum)
from .scalars import CyclotomicField, Scalar, ScalarRing
from .series import (KModelVector, act, eigenspace, gamma_closed_form,
                     new_vector, star_vector)
from .theorems import (TrilinearCase, Verdict, plan_case,
                       vanishing_certificate, verify_theorem)

__version__ = "0.1.0"
