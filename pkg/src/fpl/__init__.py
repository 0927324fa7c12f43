"""Linear-optics and matchgate simulation toolkit.

Subpackages: numerics (permanents, Haar sampling, fidelities), interferometer
(optical circuits, Reck decomposition, random ensembles, fixture chips), boson
(BosonSampling distributions, bunching laws, depth-3 weak simulation),
matchgate (free-fermion circuit simulation and gate algebra), tomography
(unitary reconstruction from photon statistics), validation (sampler
discrimination tests), cli (command-line front end).
"""

__version__ = "0.1.0"
