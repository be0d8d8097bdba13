"""Energy transfer from a driven two-level emitter: unitary versus correlation energy.

Library modules:

- :mod:`.timegrid` quadrature on uniform time grids
- :mod:`.photonic_state` the emitted {0, 1}-photon field and its purities
- :mod:`.energetics` energy splits for emission and homodyne transfers
- :mod:`.interferometry` beam splitter, visibilities and HOM estimators
- :mod:`.synthlab` synthetic measurements and their analysis
"""

__version__ = "0.1.0"
