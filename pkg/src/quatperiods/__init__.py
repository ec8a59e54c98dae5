"""Arithmetic laboratory: class groups, quaternionic Shimura sets, Brandt
matrices, toric periods of eigenforms twisted by class-group characters, and
a Birch--Swinnerton-Dyer style bookkeeping layer."""

__version__ = "0.1.0"
