"""Allow ``python -m npmixcure``."""

import sys

from .cli import main

sys.exit(main())
