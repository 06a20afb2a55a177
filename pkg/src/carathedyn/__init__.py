"""Carathéodory-type constructions of equilibrium measures for symbolic suspension flows."""
from .config import fixture, load_fixture, load_system_file
from .oracle import flow_equilibrium, flow_pressure, gibbs_cylinder
from .system import CylinderSet, Sft, SuspensionSystem, SymbolicPoint

__all__ = ["CylinderSet", "Sft", "SuspensionSystem", "SymbolicPoint", "fixture", "flow_equilibrium",
           "flow_pressure", "gibbs_cylinder", "load_fixture", "load_system_file"]
__version__ = "0.1.0"
