"""Length spectra of cocompact Fuchsian groups."""

from .ball import Ball, TorsionError, enumerate_ball
from .domain import DirichletDomain, dirichlet_domain
from .group import (FuchsianGroup, GroupError, GroupSpec, MobiusElement, cyclic_reduce,
                    free_reduce, load_group, trace_of_length, translation_length)
from .spectrum import (HorizonError, Spectrum, SpectrumEntry, conjugator_search,
                       empirical_counts, length_spectrum, write_csv, write_json)
from .validate import validate_bounds

__all__ = [
    "Ball", "TorsionError", "enumerate_ball", "DirichletDomain", "dirichlet_domain",
    "FuchsianGroup", "GroupError", "GroupSpec", "MobiusElement", "cyclic_reduce", "free_reduce",
    "load_group", "trace_of_length", "translation_length", "HorizonError", "Spectrum",
    "SpectrumEntry", "conjugator_search", "empirical_counts", "length_spectrum", "write_csv",
    "write_json", "validate_bounds",
]
