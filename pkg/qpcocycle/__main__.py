import sys

from qpcocycle.cli import main

sys.exit(main())
