"""Desk-scale experiments on four evolutionary-computation benchmark studies.

Modules: :mod:`.harness` (config, seeding, records, parallel runs),
:mod:`.stats`, :mod:`.assignment` (AP solutions as ATSP tours),
:mod:`.ttp` (random TTP schedules), :mod:`.bent` (GP for bent functions),
:mod:`.byzantine` (GA with corrupted fitness) and :mod:`.cli`.
"""

__version__ = "0.1.0"
