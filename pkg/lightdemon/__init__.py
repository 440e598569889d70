"""
Simulation workbench for velocity-dependent optical forces on an atom in a focused laser beam.
"""
