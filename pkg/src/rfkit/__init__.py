"""Exact finite-window models of Rabinowitz Floer complexes, popsicle
combinatorics, Ginzburg dg algebras of trees, Calabi-Yau pairings and
Reeb chord arithmetic."""

__version__ = "0.1.0"
