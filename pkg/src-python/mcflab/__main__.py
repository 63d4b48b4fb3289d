"""Allow `python -m mcflab`."""

import sys

from mcflab import main

sys.exit(main())
