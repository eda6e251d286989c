"""
The DSL: types, operation signatures, programs, workspaces, builtins,
the interpreter and canonical program text.
"""
