"""Simulation and classicality checks for pre- and post-selection paradoxes."""
