"""Hardy-field growth calculus, PET induction and multiple ergodic averages at desk scale."""

__version__ = "0.1.0"
