"""Test suite for the equicorrelated FWER toolkit."""
