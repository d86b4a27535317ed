"""
Harness Module

Command-line front end, table catalogue and run manifests.
"""
