"""
Tools package: generation, policies, task engine, store and run outputs.
"""
