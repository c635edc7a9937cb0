"""Nonequilibrium thermometry with ensembles of qubit probes.

Simulates N independent qubits thermalizing under a generalized amplitude
damping channel, tracks the quantum Fisher information for the bath's inverse
temperature over time, and provides scan/fit tooling for the transient
enhancement analysis.
"""

__version__ = "0.1.0"
