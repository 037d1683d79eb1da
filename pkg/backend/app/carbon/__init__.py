"""
Carbon - Intensité carbone, émissions opérationnelles et intrinsèques,
décalage temporel des exécutions
"""
