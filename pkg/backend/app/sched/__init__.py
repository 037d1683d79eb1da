"""
Sched - Ordonnancement de workflows sensible à l'énergie (HEFT, GreenHEFT,
MOHEFT), consolidation et analyse DVFS
"""
