"""Services package initialization.

Yeh package saari numerical logic contain karta hai: kernels, cut metric,
branching process, duality, graph sampling aur experiments.

"""
