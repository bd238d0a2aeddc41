"""Certified construction and evaluation of the eight-dimensional magic function.

Subpackages by concern:

* :mod:`magic8.qseries`   - exact Laurent series in q^(1/2);
* :mod:`magic8.modforms`  - the named modular / quasimodular forms;
* :mod:`magic8.lattice`   - Z^d, D_d and E8 geometry and theta counts;
* :mod:`magic8.ball`      - arbitrary-precision enclosure arithmetic;
* :mod:`magic8.evaluator` - dual-regime and Laplace-transform evaluation;
* :mod:`magic8.certify`   - the verification suite and certificates;
* :mod:`magic8.cli`       - the `magic8` command-line entry point.
"""

__version__ = "0.1.0"
