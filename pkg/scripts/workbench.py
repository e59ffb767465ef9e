#!/usr/bin/env python3
"""
Command-line runner for the data-word mu-calculus workbench
"""
import os
import sys

from dotenv import load_dotenv

# Add parent directory to path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(project_root)

# Load environment variables from .env file
load_dotenv(os.path.join(project_root, '.env'))

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
