# Copyright 2026 The coulab Authors
# SPDX-License-Identifier: Apache-2.0
"""Lattice Coulomb systems: inequality checks, Fock-space localization and scans."""

from ._core import *  # noqa: F401,F403
from ._core import CoulabError, Report

__version__ = "0.1.0"
