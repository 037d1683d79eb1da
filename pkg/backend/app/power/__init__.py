"""
Power - Modèles de puissance CPU, mémoire et stockage
"""
