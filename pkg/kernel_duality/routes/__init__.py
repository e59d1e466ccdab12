"""Routes package initialization.

Yeh package JSON API ka blueprint contain karta hai.

"""
