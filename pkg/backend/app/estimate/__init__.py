"""
Estimate - Estimation de l'énergie et des émissions d'exécutions de workflows
"""
