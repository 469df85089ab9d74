"""python -m twincontract"""

import sys

from twincontract.cli import main

sys.exit(main())
