"""Entry point for ``python -m betadyne``"""

import sys

from .cli import main

sys.exit(main())
