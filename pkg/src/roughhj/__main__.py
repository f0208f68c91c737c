"""Entry point for ``python -m roughhj``."""

import sys

from .cli import main

sys.exit(main())
