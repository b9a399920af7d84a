"""EEG-driven Boolean satisfiability on a simulated quantum computer, rendered as sound."""
__version__ = "0.1.0"
