"""Finite linear sites: categories, topologies, sheaves and Z-algebras."""
