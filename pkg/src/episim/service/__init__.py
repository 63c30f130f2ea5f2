"""FastAPI service wrapping the simulation package."""
