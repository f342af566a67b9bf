"""Exact workbench for multiplicative spectral sequences.

Subsystems:

- ``ring`` / ``snf`` / ``homology`` / ``abgroup``: exact linear algebra over
  Z localized at a prime (or F_p, or Z with a finite set of primes inverted).
- ``poly`` / ``hopf`` / ``cobar`` / ``minres``: graded Hopf algebroid
  presentations, their cobar complexes and cohomology with products and
  triple Massey products.
- ``transfer``: the rank-8 trace algebra used for the transfer table.
- ``deck`` / ``engine`` / ``omnibus``: bigraded spectral sequence state,
  differential propagation, page turning, truncated-tau group calculus.
- ``ledger``: replayable deduction store for brackets, relations and hidden
  extensions.
- ``pipeline`` / ``chart`` / ``service`` / ``cli``: end-to-end runs, SVG
  output, and the interactive session service.
"""

__version__ = "0.1.0"
