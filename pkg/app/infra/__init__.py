"""Infrastructure module"""

