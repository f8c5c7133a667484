#!/usr/bin/env python3
"""Entry point for bernstein-lab."""

from bernstein_lab.cli import main

if __name__ == "__main__":
    main()
