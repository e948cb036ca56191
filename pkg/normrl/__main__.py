"""Run the normrl command line: python -m normrl."""

import sys

from .cli import main

sys.exit(main())
