"""Distributed multi-user point functions over GF(q^m).

A trusted master encodes K users' point functions into N servers; each user
reads a subset of servers, gets its function value at any demanded point by
adding the servers' answers, and learns nothing about the other users'
functions from the shares it can see.
"""

from .analysis import (check_R_feasible, entropy_qary, exhaustive_correctness,
                       exhaustive_privacy, inner_bounds, outer_bounds)
from .dmuss import (AccessStructure, SchemeParams, adversarial_params, dec, enc_coordinate,
                    param_sample, param_validate)
from .errors import (AccessViolation, CapacityError, DMUPFError, ParamSearchFailed,
                     SingularMatrixError, UsageError)
from .field import GF
from .pointfn import PointFunction, build_mapping, e_map, f_eval, secret_vector
from .protocol import EXHAUSTIVE, ProtocolConfig, run

__version__ = "0.1.0"
