import sys

from eranet.cli import main

sys.exit(main())
