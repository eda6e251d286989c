"""
Models package: errors, grids, tasks and pydantic schemas.
"""
