"""File repositories"""
from .base import BaseFileRepository, CsvRepository, JsonLinesRepository, versioned_path

__all__ = ["BaseFileRepository", "CsvRepository", "JsonLinesRepository", "versioned_path"]
