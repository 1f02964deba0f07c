"""Allow ``python -m artifact`` to reach the command-line interface."""
import sys

from .cli import main

sys.exit(main())
