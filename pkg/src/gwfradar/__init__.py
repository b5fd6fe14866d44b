"""Interferometric multistatic radar imaging with Generalized Wirtinger Flow."""
