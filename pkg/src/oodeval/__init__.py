"""Selection-and-evaluation toolkit for few-shot self-rationalization
experiments: sample selection, generation parsing, label harmonization, and
the full OOD evaluation statistics."""

__version__ = "0.1.0"
