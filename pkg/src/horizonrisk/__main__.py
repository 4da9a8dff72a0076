import sys

from horizonrisk.cli import main

sys.exit(main())
