"""Exact tools for modular sumsets, Beatty sequences and the witness pipeline
behind the mod-1 Brunn-Minkowski inequality."""
