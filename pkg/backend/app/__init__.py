"""
Application principale - Workflow Footprint
"""
