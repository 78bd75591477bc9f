"""Open-quantum-system dynamics of a proton-transfer coordinate.

Second-order (Born-Markov) master equations, their canonically corrected
variant whose stationary state is the second-order mean-force Gibbs
state, and the numerically exact hierarchy benchmark, for an N-level
system bilinearly coupled to an Ohmic bath with Drude cutoff.
"""

__version__ = "0.1.0"
