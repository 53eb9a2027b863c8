"""CODATA-2018 physical constants (SI). Use these, never inline values."""

HBAR = 1.054571817e-34  # J s
EPSILON_0 = 8.8541878128e-12  # F/m
MU_0 = 1.25663706212e-6  # N/A^2
C = 299792458.0  # m/s
