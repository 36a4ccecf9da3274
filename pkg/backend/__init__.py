"""Backend package: the kernel library lives in ``app``, entry points are ``cli.py`` and ``main.py``."""
