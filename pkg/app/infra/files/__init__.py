"""File-backed persistence"""
