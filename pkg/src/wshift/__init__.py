"""Weighted shift operators: spectra, subnormality certificates and numerical oracles."""
