"""
Entry point for running qgamma as a module.

    python -m qgamma <command> [options]
"""

from .cli import main

if __name__ == "__main__":
    main()
