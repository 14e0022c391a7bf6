"""Features module"""
