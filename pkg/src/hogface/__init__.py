"""Face recognition with layered orientation histograms and per-bin 2DPCA.

Pipeline: grayscale image -> resize -> Haar LL subband -> oriented-gradient
layers -> per-bin 2DPCA projection -> minimum-distance matching with
cross-bin voting.
"""

__version__ = "0.1.0"
