"""Exact coherent-information and statistical-mechanics analysis of CSS codes.

Builds CSS codes from classical parity checks, enumerates their error-sector
probability tables exactly under incoherent Pauli noise, evaluates coherent
information / relative entropy / optimal-decoder success, and maps each code
to its quenched-disorder classical spin model with exact and Monte Carlo
evaluation along the Nishimori line.
"""

__version__ = "0.1.0"
