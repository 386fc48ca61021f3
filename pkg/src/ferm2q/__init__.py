"""Fermion-to-qubit resource estimation for UCCSD-VQE circuits."""

__version__ = "0.1.0"
