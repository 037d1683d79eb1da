"""
Model - Types du domaine : unités, clusters, workflows
"""
