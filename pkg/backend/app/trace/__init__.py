"""
Trace - Lecture des traces d'exécution de workflows et agrégation par tâche
"""
