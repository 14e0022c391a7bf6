"""Experiment repositories"""
from .manifest import MANIFEST_FILE, ManifestRepository

__all__ = ["MANIFEST_FILE", "ManifestRepository"]
