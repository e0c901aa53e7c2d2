# This file makes 'glass_multistability' a Python package
