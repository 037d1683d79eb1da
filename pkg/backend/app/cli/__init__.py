"""
CLI - Exécutions reproductibles : estimation, ordonnancement, décalage
temporel, DVFS, consolidation et rendu de rapports
"""
