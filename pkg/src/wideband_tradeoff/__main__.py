import sys

from wideband_tradeoff.cli import main

sys.exit(main())
