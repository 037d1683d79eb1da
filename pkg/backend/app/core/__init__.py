"""
Core - Configuration, erreurs et journalisation partagées
"""
