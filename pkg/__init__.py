"""
arcloop

A typed grid-transformation DSL for ARC tasks, a type-directed program
generator, and the loop that turns failed programs into new training tasks.
"""

__version__ = "0.1.0"
__description__ = "Typed DSL, program generator and learning-from-mistakes loop for ARC"
