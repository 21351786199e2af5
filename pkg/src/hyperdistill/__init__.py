"""Single-copy entanglement distillation with polarization-frequency hyperentangled photon pairs."""

__version__ = "0.1.0"
