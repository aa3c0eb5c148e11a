"""Orr-Sommerfeld spectra and inviscid Rayleigh resonances on deformed contours."""

__version__ = "0.1.0"
