"""Horosphere congruences in hyperbolic space and their second envelopes."""
from .bianchi_calo import BCData, envelope_at, horosphere_lift, mobius_reparam, parallel_family, second_envelope
from .curvature import CurvatureReport, fundamental_forms, mean_gauss, node_report
from .errors import BryantError
from .grid import GridSpec
from .holomorphic import eval_jet2, parse_holomorphic, pretty
from .mesh import build_mesh, export_mesh, export_report_csv, sample_grid
from .minkowski import Point3, Vec41, Vec42, euclidean_lift, inner41, sphere_lift
from .verify import Tolerances, verify

__version__ = "0.1.0"
