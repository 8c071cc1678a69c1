"""Exterior differential systems workbench: exact forms, Pfaffian systems,
tableaux and Cartan's test, a catalog of classical systems, and
Weierstrass-type minimal submanifold numerics."""

from .cartan import AnalysisReport, analyze, prolong_system
from .catalog import CATALOG, build
from .dsl import dump_system, load_system, parse_system, print_document
from .errors import EDSError, ParseError
from .forms import CoframeDecl, Form, StructureRules, ext_d, reduce_mod
from .pfaffian import PfaffianSystem, extract_tableau_torsion, torsion_class
from .poly import ScalarPoly
from .tableau import Tableau, cartan_test, characters, prolong

__version__ = "0.1.0"
