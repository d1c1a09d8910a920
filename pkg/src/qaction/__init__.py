"""Energy-time cost of Hamiltonian computations.

Simulators for a handful of analog quantum algorithms (register
preparation, Grover search Hamiltonians, a driven directory, a driven
prime-mode cavity, a diagonal phase-shift network) and tools that report
each run's characteristic energy times computation time against the
classical step count of the same task.
"""

__version__ = "0.1.0"
