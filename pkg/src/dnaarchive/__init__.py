"""Bacterial-nanonetwork DNA archive: codec, chemotaxis simulation and experiments."""
